"""
File Schemas
Validated models for surface files, scan configurations and stability experiment specs
"""

from typing import List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.geometry.surface import StarSurface
from src.numerics.special_functions import harmonic_count, harmonic_linear_index

Term = Tuple[int, int, float]


def _check_terms(terms: List[Term], l_geom: Optional[int]) -> int:
    """Validate (ℓ, m, value) triples and return the band limit they need"""
    top = 0
    for degree, order, _ in terms:
        if degree < 0 or abs(order) > degree:
            raise ValueError(f"Invalid harmonic index (l={degree}, m={order})")
        top = max(top, degree)
    if l_geom is not None and top > l_geom:
        raise ValueError(f"Term degree {top} exceeds L_geom={l_geom}")
    return top if l_geom is None else l_geom


def _coefficient_vector(terms: List[Term], l_geom: int) -> np.ndarray:
    vector = np.zeros(harmonic_count(l_geom))
    for degree, order, value in terms:
        vector[harmonic_linear_index(degree, order)] += value
    return vector


class SurfaceFile(BaseModel):
    """Star-shaped surface: class bounds plus sparse real harmonic coefficients (ℓ, m, value)"""

    model_config = ConfigDict(populate_by_name=True)

    a0: float = Field(gt=0)
    a1: float = Field(gt=0)
    c0: float = Field(gt=0)
    l_geom: Optional[int] = Field(default=None, alias="L_geom", ge=0)
    coefficients: List[Term] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_layout(self):
        if self.a0 > self.a1:
            raise ValueError("a0 must not exceed a1")
        self.l_geom = _check_terms(self.coefficients, self.l_geom)
        return self

    def to_surface(self, validate: bool = True, check_degree: int = 64) -> StarSurface:
        vector = _coefficient_vector(self.coefficients, self.l_geom)
        return StarSurface(vector, self.a0, self.a1, self.c0, validate=validate, check_degree=check_degree)

    @classmethod
    def from_surface(cls, surface: StarSurface) -> "SurfaceFile":
        return cls.model_validate(surface.to_dict())


class EpsilonSweep(BaseModel):
    """ε schedule at one λ for the convergence table"""

    lam: List[float] = Field(min_length=3, max_length=3, alias="lambda")
    epsilons: List[float] = Field(min_length=1)

    model_config = ConfigDict(populate_by_name=True)

    @field_validator("epsilons")
    @classmethod
    def check_epsilons(cls, values):
        if any(e <= 0 for e in values):
            raise ValueError("epsilons must be positive")
        return values


class ScanConfig(BaseModel):
    """λ-lattice, regularization and voxel settings for `reconstruct`"""

    model_config = ConfigDict(extra="forbid")

    lambda_max: float = Field(default=3.0, gt=0)
    lambda_spacing: float = Field(default=0.5, gt=0)
    epsilon: float = Field(default=1e-3, gt=0)
    path: Literal["oracle", "data"] = "oracle"
    threshold: Union[float, Literal["volume"]] = 0.5
    voxels: int = Field(default=48, ge=2)
    box_half_width: float = Field(default=1.6, gt=0)
    epsilon_sweep: Optional[EpsilonSweep] = None

    def reconstruction_overrides(self) -> dict:
        """Fields set in the scan file only; the rest keep their configured values"""
        out = self.model_dump(exclude={"epsilon_sweep"}, exclude_unset=True)
        if "threshold" in out:
            out["threshold"] = str(out["threshold"])
        return out


class Perturbation(BaseModel):
    """Direction in coefficient space as (ℓ, m, value) triples"""

    coefficients: List[Term] = Field(min_length=1)

    @field_validator("coefficients")
    @classmethod
    def check_terms(cls, values):
        _check_terms(values, None)
        return values

    def vector(self) -> np.ndarray:
        return _coefficient_vector(self.coefficients, _check_terms(self.coefficients, None))


class SyntheticLaw(BaseModel):
    """Records generated exactly from ρ = c1 (ln|ln δ|/|ln δ|)^c2"""

    c1: float = Field(gt=0)
    c2: float = Field(gt=0)
    deltas: List[float] = Field(min_length=1)


class ExperimentSpec(BaseModel):
    """Pair-family experiment, or a synthetic law for checking the fit"""

    model_config = ConfigDict(populate_by_name=True)

    base_surface: Optional[SurfaceFile] = None
    perturbation: Optional[Perturbation] = None
    amplitudes: List[float] = Field(default_factory=list)
    grid_degree: Optional[int] = Field(default=None, ge=1)
    in_grid_degree: Optional[int] = Field(default=None, ge=1)
    solver_tolerance: Optional[float] = Field(default=None, gt=0)
    hausdorff_samples: int = Field(default=4000, ge=10)
    near_field: bool = True
    synthetic: Optional[SyntheticLaw] = None

    @field_validator("amplitudes")
    @classmethod
    def check_amplitudes(cls, values):
        if any(b >= a for a, b in zip(values, values[1:])):
            raise ValueError("amplitudes must be strictly decreasing")
        if any(a < 0 for a in values):
            raise ValueError("amplitudes must be non-negative")
        return values

    @model_validator(mode="after")
    def check_mode(self):
        if self.synthetic is None:
            if self.base_surface is None or self.perturbation is None or not self.amplitudes:
                raise ValueError("A measured experiment needs base_surface, perturbation and amplitudes")
        return self
