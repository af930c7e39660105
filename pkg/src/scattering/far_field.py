"""
Far-Field Matrices
A(α′_p, α_q) on product direction grids, plus reciprocity and optical-theorem residuals
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from src.config import SolverConfig
from src.core.errors import NumericalError
from src.geometry.surface import StarSurface
from src.numerics.quadrature import SphereQuadrature
from src.scattering.bie import solve_traces
from src.scattering.mie import mie_far_field_matrix
from src.scattering.trace import TraceSet

logger = logging.getLogger(__name__)


@dataclass
class FarFieldMatrix:
    """Samples of A(α′, α): rows follow out_grid, columns follow in_grid"""

    out_grid: SphereQuadrature
    in_grid: SphereQuadrature
    values: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def shape(self):
        return self.values.shape


def assemble_far_field_matrix(
    surface: StarSurface,
    out_grid: SphereQuadrature,
    in_grid: SphereQuadrature,
    config: Optional[SolverConfig] = None,
    threads: int = 1,
    traces: Optional[TraceSet] = None,
) -> FarFieldMatrix:
    """One solve per incident direction, then the far-field integral per output direction.

    Args:
        surface: Obstacle boundary
        out_grid: Observation directions α′
        in_grid: Incident directions α
        config: Solver settings
        threads: Assembly workers
        traces: Previously solved traces for in_grid, reused when given

    Returns:
        FarFieldMatrix with surface hash and solver settings in its metadata
    """
    config = config or SolverConfig()
    method = "bie"
    if config.use_mie_for_spheres and surface.is_sphere and traces is None:
        values = mie_far_field_matrix(surface.sphere_radius, out_grid.nodes, in_grid.nodes, config.wavenumber)
        method = "series"
        tolerance = 1e-13
    else:
        if traces is None:
            try:
                traces = solve_traces(surface, in_grid.nodes, config, weights=in_grid.weights, threads=threads)
            except NumericalError as e:
                e.details.setdefault("stage", "far_field_matrix")
                logger.error(f"Forward solve failed: {e} ({e.details})")
                raise
        values = traces.far_field(out_grid.nodes)
        tolerance = traces.solver_tolerance

    logger.info(f"Far-field matrix {values.shape} assembled by {method}")
    return FarFieldMatrix(
        out_grid=out_grid,
        in_grid=in_grid,
        values=values,
        metadata={
            "surface_hash": surface.surface_hash(),
            "method": method,
            "wavenumber": config.wavenumber,
            "solver_tolerance": tolerance,
            "bie_degree": config.bie_degree,
            "coupling": config.coupling,
        },
    )


def reciprocity_residual(
    surface: StarSurface, directions: np.ndarray, config: Optional[SolverConfig] = None, threads: int = 1
) -> float:
    """max |A(α′, α) − A(−α, −α′)| over pairs drawn from `directions`"""
    directions = np.atleast_2d(directions)
    both = np.concatenate([directions, -directions], axis=0)
    traces = solve_traces(surface, both, config, threads=threads)
    values = traces.far_field(both)
    n = directions.shape[0]
    residual = float(np.max(np.abs(values[:n, :n] - values[n:, n:].T)))
    logger.info(f"Reciprocity residual {residual:.2e} over {n} directions")
    return residual


def optical_theorem_residual(traces: TraceSet, out_grid: SphereQuadrature) -> float:
    """max over incident α of |Im A(α, α) − (k/4π) ∫ |A(α′, α)|² dα′|"""
    forward = np.diag(traces.far_field(traces.directions))
    values = traces.far_field(out_grid.nodes)
    flux = out_grid.weights @ np.abs(values) ** 2
    residual = float(np.max(np.abs(forward.imag - traces.wavenumber * flux / (4.0 * np.pi))))
    logger.info(f"Optical theorem residual {residual:.2e}")
    return residual
