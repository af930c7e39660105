"""
Far-Field Operator Analysis
Harmonic coefficients A_ℓm(α), continuation to complex directions and the δ-metric
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np
from scipy.spatial import cKDTree

from src.core.errors import GridMismatchError, ResolutionError
from src.numerics.quadrature import SphereQuadrature
from src.numerics.special_functions import (
    check_on_variety,
    harmonic_degrees_orders,
    sph_harmonics_all,
    solid_harmonics,
)
from src.scattering.far_field import FarFieldMatrix

logger = logging.getLogger(__name__)


@dataclass
class FarFieldCoefficients:
    """A_ℓm(α) for ℓ ≤ l_trunc, one row per incident direction"""

    values: np.ndarray  # (n_incident, (l_trunc+1)²)
    l_trunc: int
    incident: np.ndarray
    tail_bound: np.ndarray
    decay_slope: np.ndarray
    grid_energy: np.ndarray

    def degree_norms(self) -> np.ndarray:
        """‖A_ℓ(α)‖ over m, shape (n_incident, l_trunc+1)"""
        degrees, _ = harmonic_degrees_orders(self.l_trunc)
        out = np.zeros((self.values.shape[0], self.l_trunc + 1))
        np.add.at(out.T, degrees, (np.abs(self.values) ** 2).T)
        return np.sqrt(out)


@dataclass
class ContinuationResult:
    """Truncated series value at θ′ with the heuristic tail bound"""

    value: complex
    bound: float
    warning: bool
    details: Dict[str, float] = field(default_factory=dict)


@dataclass
class DeltaReport:
    """Max-norm misfit between two far-field matrices on a common grid"""

    value: float
    grid_spacing: float
    caveat: str


def compute_coefficients(matrix: FarFieldMatrix, l_trunc: int, incident: List[int] = None) -> FarFieldCoefficients:
    """A_ℓm(α) = ∫ A(α′, α) conj(Y_ℓm(α′)) dα′ by the out-grid quadrature.

    Args:
        matrix: Far-field samples
        l_trunc: Truncation degree
        incident: Column indices of the incident directions (all when omitted)

    Returns:
        FarFieldCoefficients
    """
    out_grid = matrix.out_grid
    if out_grid.degree < 2 * l_trunc:
        raise ResolutionError(
            f"Out-grid exactness degree {out_grid.degree} is below 2*L_trunc={2 * l_trunc}",
            details={"grid_degree": out_grid.degree, "l_trunc": l_trunc},
        )
    columns = np.arange(matrix.values.shape[1]) if incident is None else np.atleast_1d(incident)
    samples = matrix.values[:, columns]
    basis = sph_harmonics_all(l_trunc, out_grid.nodes)
    values = ((basis.conj() * out_grid.weights[:, None]).T @ samples).T
    grid_energy = out_grid.weights @ np.abs(samples) ** 2

    result = FarFieldCoefficients(
        values=values,
        l_trunc=l_trunc,
        incident=matrix.in_grid.nodes[columns],
        tail_bound=np.zeros(columns.size),
        decay_slope=np.zeros(columns.size),
        grid_energy=grid_energy,
    )
    norms = result.degree_norms()
    result.tail_bound = norms[:, -1] + (norms[:, -2] if l_trunc >= 1 else 0.0)
    # Slope of log10 ‖A_ℓ‖ against ℓ over the non-negligible degrees
    for i, row in enumerate(norms):
        usable = np.nonzero(row > 1e-300)[0]
        if usable.size >= 2:
            result.decay_slope[i] = np.polyfit(usable, np.log10(row[usable]), 1)[0]
    logger.debug(f"Coefficients to degree {l_trunc} for {columns.size} incident directions")
    return result


def continue_far_field(coeffs: FarFieldCoefficients, theta_prime: np.ndarray, row: int = 0) -> ContinuationResult:
    """Σ_{ℓ ≤ L} A_ℓm(α) Y_ℓm(θ′) at θ′ on the variety, with a tail estimate.

    The bound is the last two degrees' contribution ‖A_ℓ‖‖Y_ℓ(θ′)‖ scaled by the growth
    ratio ‖Y_L(θ′)‖ / ‖Y_{L−1}(θ′)‖.
    """
    theta_prime = np.asarray(theta_prime, dtype=complex)
    check_on_variety(theta_prime)
    y = solid_harmonics(coeffs.l_trunc, theta_prime)
    value = complex(coeffs.values[row] @ y)

    degrees, _ = harmonic_degrees_orders(coeffs.l_trunc)
    y_norms = np.sqrt(np.bincount(degrees, weights=np.abs(y) ** 2))
    a_norms = coeffs.degree_norms()[row]
    L = coeffs.l_trunc
    if L >= 1:
        growth = y_norms[L] / y_norms[L - 1] if y_norms[L - 1] > 0 else 1.0
        bound = float((a_norms[L - 1] * y_norms[L - 1] + a_norms[L] * y_norms[L]) * growth)
    else:
        bound = float(a_norms[0] * y_norms[0])
    warning = bound > abs(value)
    if warning:
        logger.warning(f"Ill-conditioned continuation: tail bound {bound:.2e} exceeds |value| {abs(value):.2e}")
    return ContinuationResult(value=value, bound=bound, warning=warning, details={"harmonic_growth": float(y_norms[L])})


def continue_far_field_all(coeffs: FarFieldCoefficients, theta_prime: np.ndarray):
    """Continued values and tail bounds for every incident row at one θ′"""
    theta_prime = np.asarray(theta_prime, dtype=complex)
    check_on_variety(theta_prime)
    y = solid_harmonics(coeffs.l_trunc, theta_prime)
    values = coeffs.values @ y
    degrees, _ = harmonic_degrees_orders(coeffs.l_trunc)
    y_norms = np.sqrt(np.bincount(degrees, weights=np.abs(y) ** 2))
    a_norms = coeffs.degree_norms()
    L = coeffs.l_trunc
    growth = y_norms[L] / y_norms[L - 1] if L >= 1 and y_norms[L - 1] > 0 else 1.0
    bounds = (a_norms[:, L - 1] * y_norms[L - 1] + a_norms[:, L] * y_norms[L]) * growth if L >= 1 else a_norms[:, 0]
    return values, bounds


def _grid_spacing(grid: SphereQuadrature) -> float:
    if grid.nodes.shape[0] < 2:
        return float(np.pi)
    distances, _ = cKDTree(grid.nodes).query(grid.nodes, k=2)
    return float(np.max(distances[:, 1]))


def delta_metric(m1: FarFieldMatrix, m2: FarFieldMatrix) -> DeltaReport:
    """max over the product grid of |A_1 − A_2|"""
    same_out = np.array_equal(m1.out_grid.nodes, m2.out_grid.nodes)
    same_in = np.array_equal(m1.in_grid.nodes, m2.in_grid.nodes)
    if not (same_out and same_in) or m1.values.shape != m2.values.shape:
        raise GridMismatchError("Far-field matrices are sampled on different grids")
    value = float(np.max(np.abs(m1.values - m2.values))) if m1.values.size else 0.0
    spacing = max(_grid_spacing(m1.out_grid), _grid_spacing(m1.in_grid))
    return DeltaReport(
        value=value,
        grid_spacing=spacing,
        caveat=f"max over sampled directions only; grid spacing {spacing:.3g} rad",
    )
