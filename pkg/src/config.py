"""
Application Configuration
Centralized configuration management
"""

import json
import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from src.core.errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureConfig:
    """Spherical harmonic and sphere quadrature configuration"""

    l_max: int = 40
    sphere_degree: int = 82


@dataclass(frozen=True)
class GeometryConfig:
    """Star-shaped surface configuration"""

    l_geom: int = 16
    check_degree: int = 64
    hausdorff_degree: int = 48


@dataclass(frozen=True)
class SolverConfig:
    """Forward solver configuration"""

    wavenumber: float = 1.0
    coupling: float = 1.0
    bie_degree: int = 20
    polar_nodes: int = 40
    azimuth_nodes: int = 80
    tolerance: float = 1e-8
    use_mie_for_spheres: bool = False
    cache_dir: Optional[str] = None


@dataclass(frozen=True)
class FarFieldConfig:
    """Far-field grids and continuation configuration"""

    grid_degree: int = 60
    l_trunc: int = 30
    in_grid_degree: int = 31


@dataclass(frozen=True)
class ReconstructionConfig:
    """Density solve, spectrum scan and indicator inversion configuration"""

    lambda_max: float = 3.0
    lambda_spacing: float = 0.5
    epsilon: float = 1e-3
    t_margin: float = 0.1
    beta_min: float = 1e-16
    beta_max: float = 1e2
    bisection_steps: int = 40
    radial_nodes: int = 48
    voxels: int = 48
    box_half_width: float = 1.6
    threshold: str = "0.5"
    path: str = "oracle"


@dataclass(frozen=True)
class StabilityConfig:
    """Stability experiment configuration"""

    trust_factor: float = 10.0
    min_records: int = 5
    min_decades: float = 2.0
    shell_radius_factor: float = 1.5


@dataclass(frozen=True)
class RuntimeConfig:
    """Process-level settings"""

    threads: int = 1
    seed: int = 0
    log_level: str = "INFO"
    log_format: str = "text"
    log_file: Optional[str] = None


_SECTIONS = {
    "quadrature": QuadratureConfig,
    "geometry": GeometryConfig,
    "solver": SolverConfig,
    "far_field": FarFieldConfig,
    "reconstruction": ReconstructionConfig,
    "stability": StabilityConfig,
    "runtime": RuntimeConfig,
}


def _coerce(raw: str, default: Any) -> Any:
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


def _from_env(cls, prefix: str):
    """Build a section from LAB_<SECTION>_<FIELD> variables"""
    instance = cls()
    updates = {}
    for f in fields(cls):
        raw = os.getenv(f"{prefix}_{f.name.upper()}")
        if raw is None:
            continue
        default = getattr(instance, f.name)
        try:
            updates[f.name] = _coerce(raw, default) if default is not None else raw
        except ValueError as e:
            raise ConfigError(f"Invalid value for {prefix}_{f.name.upper()}: {raw!r}") from e
    return replace(instance, **updates)


class Config:
    """Main application configuration"""

    def __init__(self, load_env: bool = True):
        if load_env:
            load_dotenv()

        self.environment = os.getenv("LAB_ENVIRONMENT", "development")

        self.quadrature = _from_env(QuadratureConfig, "LAB_QUADRATURE")
        self.geometry = _from_env(GeometryConfig, "LAB_GEOMETRY")
        self.solver = _from_env(SolverConfig, "LAB_SOLVER")
        self.far_field = _from_env(FarFieldConfig, "LAB_FAR_FIELD")
        self.reconstruction = _from_env(ReconstructionConfig, "LAB_RECONSTRUCTION")
        self.stability = _from_env(StabilityConfig, "LAB_STABILITY")
        self.runtime = _from_env(RuntimeConfig, "LAB_RUNTIME")

        # Short aliases used in operations docs
        if os.getenv("LAB_LOG_LEVEL"):
            self.runtime = replace(self.runtime, log_level=os.environ["LAB_LOG_LEVEL"])
        if os.getenv("LAB_LOG_FORMAT"):
            self.runtime = replace(self.runtime, log_format=os.environ["LAB_LOG_FORMAT"])

        logger.debug(f"Configuration loaded for environment: {self.environment}")

    @classmethod
    def from_file(cls, path: str, load_env: bool = True) -> "Config":
        """Load defaults and environment, then apply a JSON or TOML override file.

        The file maps section names (quadrature, solver, ...) to field overrides.
        """
        config = cls(load_env=load_env)
        file_path = Path(path)
        if not file_path.exists():
            raise ConfigError(f"Config file not found: {path}")

        try:
            if file_path.suffix.lower() == ".toml":
                with open(file_path, "rb") as f:
                    data = tomllib.load(f)
            else:
                with open(file_path, "r", encoding="utf-8") as f:
                    data = json.load(f)
        except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
            raise ConfigError(f"Cannot parse config file {path}: {e}") from e

        config.apply(data)
        logger.info(f"Configuration overrides loaded from {path}")
        return config

    def apply(self, overrides: Dict[str, Dict[str, Any]]) -> "Config":
        """Apply per-section overrides in place"""
        for section, values in overrides.items():
            if section not in _SECTIONS:
                # Unknown top-level keys belong to the command payload (scan, experiment)
                continue
            if not isinstance(values, dict):
                raise ConfigError(f"Section {section!r} must be a table")
            current = getattr(self, section)
            known = {f.name for f in fields(current)}
            unknown = set(values) - known
            if unknown:
                raise ConfigError(f"Unknown keys in section {section!r}: {sorted(unknown)}")
            setattr(self, section, replace(current, **values))
        return self

    def with_runtime(self, threads: Optional[int] = None, seed: Optional[int] = None) -> "Config":
        if threads is not None:
            self.runtime = replace(self.runtime, threads=threads)
        if seed is not None:
            self.runtime = replace(self.runtime, seed=seed)
        return self

    def with_tolerance(self, tolerance: float) -> "Config":
        self.solver = replace(self.solver, tolerance=tolerance)
        return self

    def validate(self) -> None:
        """Raise ConfigError on inconsistent settings"""
        q, g, s, ff, r = self.quadrature, self.geometry, self.solver, self.far_field, self.reconstruction
        if q.l_max < 1 or q.sphere_degree < 1:
            raise ConfigError("quadrature.l_max and quadrature.sphere_degree must be positive")
        if g.l_geom < 0 or g.l_geom > q.l_max:
            raise ConfigError(f"geometry.l_geom must lie in [0, {q.l_max}]")
        if s.wavenumber <= 0:
            raise ConfigError("solver.wavenumber must be positive")
        if s.tolerance <= 0:
            raise ConfigError("solver.tolerance must be positive")
        if s.bie_degree < g.l_geom:
            raise ConfigError("solver.bie_degree must be at least geometry.l_geom")
        if ff.grid_degree < 2 * ff.l_trunc:
            raise ConfigError("far_field.grid_degree must be at least 2 * far_field.l_trunc")
        if ff.l_trunc > q.l_max:
            raise ConfigError("far_field.l_trunc must not exceed quadrature.l_max")
        if r.epsilon <= 0 or r.lambda_max <= 0 or r.lambda_spacing <= 0:
            raise ConfigError("reconstruction epsilon, lambda_max and lambda_spacing must be positive")
        if r.path not in ("oracle", "data"):
            raise ConfigError("reconstruction.path must be 'oracle' or 'data'")
        if self.runtime.threads < 1:
            raise ConfigError("runtime.threads must be at least 1")

    def to_dict(self) -> Dict[str, Dict[str, Any]]:
        return {name: asdict(getattr(self, name)) for name in _SECTIONS}
