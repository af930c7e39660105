"""
Stability Experiments
Far-field misfit δ against the Hausdorff distance ρ along a one-parameter obstacle family
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from src.analysis.far_field_operator import delta_metric
from src.config import Config
from src.core.errors import ClassViolationError, DomainError, NumericalError
from src.geometry.hausdorff import hausdorff_distance
from src.geometry.surface import StarSurface
from src.numerics.quadrature import build_sphere_quadrature
from src.scattering.bie import solve_traces
from src.scattering.far_field import FarFieldMatrix, assemble_far_field_matrix
from src.scattering.trace import TraceSet
from src.stability.near_field import near_field_difference
from src.stability.rate_fit import N_DOMAIN_LIMIT, epsilon_of_delta

logger = logging.getLogger(__name__)

RECORD_COLUMNS = [
    "index",
    "amplitude",
    "delta",
    "rho_one_sided",
    "rho_symmetric",
    "hausdorff_bound",
    "solver_tolerance",
    "near_field_gap",
    "epsilon_bound",
    "trustworthy",
    "status",
]


@dataclass
class StabilityRecord:
    """One amplitude of a pair family"""

    index: int
    amplitude: float
    delta: float = np.nan
    rho_one_sided: float = np.nan
    rho_symmetric: float = np.nan
    hausdorff_bound: float = np.nan
    solver_tolerance: float = np.nan
    near_field_gap: float = np.nan
    epsilon_bound: float = np.nan
    trustworthy: bool = False
    status: str = "ok"

    @property
    def rho(self) -> float:
        return self.rho_one_sided

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class StabilityExperiment:
    """Base surface, perturbation direction in coefficient space and per-amplitude records"""

    base: StarSurface
    direction: np.ndarray
    amplitudes: np.ndarray
    records: List[StabilityRecord] = field(default_factory=list)
    shell_radius: Optional[float] = None

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=float)
        if self.amplitudes.size and np.any(np.diff(self.amplitudes) >= 0):
            raise DomainError("Amplitudes must be strictly decreasing")
        if np.any(self.amplitudes < 0):
            raise DomainError("Amplitudes must be non-negative")

    @property
    def trustworthy_records(self) -> List[StabilityRecord]:
        return [r for r in self.records if r.trustworthy]

    def rows(self) -> List[Dict[str, Any]]:
        return [r.to_dict() for r in self.records]


def _forward(surface: StarSurface, out_grid, in_grid, config: Config):
    """Far-field matrix and the traces behind it"""
    solver = config.solver
    traces = solve_traces(surface, in_grid.nodes, solver, weights=in_grid.weights)
    if solver.use_mie_for_spheres and surface.is_sphere:
        matrix = assemble_far_field_matrix(surface, out_grid, in_grid, solver)
    else:
        matrix = assemble_far_field_matrix(surface, out_grid, in_grid, solver, traces=traces)
    return matrix, traces


def _record(
    index: int,
    amplitude: float,
    experiment: StabilityExperiment,
    base_matrix: FarFieldMatrix,
    base_traces: TraceSet,
    config: Config,
    samples: int,
    seed: int,
) -> StabilityRecord:
    record = StabilityRecord(index=index, amplitude=float(amplitude))
    try:
        perturbed = experiment.base.perturbed(experiment.direction, amplitude)
    except ClassViolationError as e:
        record.status = f"skipped: {e}"
        logger.warning(f"Amplitude {amplitude:.3e} skipped: {e}")
        return record

    try:
        matrix, traces = _forward(perturbed, base_matrix.out_grid, base_matrix.in_grid, config)
    except NumericalError as e:
        record.status = f"solver_failed: {e}"
        logger.warning(f"Amplitude {amplitude:.3e} flagged: {e}")
        return record

    record.delta = delta_metric(base_matrix, matrix).value
    record.solver_tolerance = max(
        float(base_matrix.metadata["solver_tolerance"]), float(matrix.metadata["solver_tolerance"])
    )
    hausdorff = hausdorff_distance(experiment.base, perturbed, symmetric=True, samples=samples, seed=seed)
    record.rho_one_sided = hausdorff.forward
    record.rho_symmetric = hausdorff.distance
    record.hausdorff_bound = hausdorff.error_bound

    if experiment.shell_radius is not None:
        record.near_field_gap = near_field_difference(base_traces, traces, experiment.shell_radius)
        if 0.0 < record.delta < N_DOMAIN_LIMIT:
            record.epsilon_bound = epsilon_of_delta(record.delta, experiment.base.a1, experiment.shell_radius)

    record.trustworthy = bool(record.solver_tolerance * config.stability.trust_factor <= record.delta)
    logger.debug(
        f"Amplitude {amplitude:.3e}: delta={record.delta:.3e}, rho={record.rho_one_sided:.3e}, "
        f"trustworthy={record.trustworthy}"
    )
    return record


def run_pair_family(
    base: StarSurface,
    direction: np.ndarray,
    amplitudes: Sequence[float],
    config: Optional[Config] = None,
    threads: int = 1,
    seed: int = 0,
    samples: int = 4000,
    near_field: bool = True,
) -> StabilityExperiment:
    """δ and ρ between the base surface and base + amplitude·direction, per amplitude.

    Args:
        base: Admissible base surface
        direction: Perturbation direction in the real harmonic coefficient space
        amplitudes: Strictly decreasing amplitudes
        config: Grids, solver and stability settings
        threads: Records computed concurrently
        seed: Start points of the Hausdorff refinement
        samples: Radial samples per Hausdorff evaluation
        near_field: Also record the scattered-field gap on the shell |x| = factor·a1

    Returns:
        StabilityExperiment with records in amplitude order
    """
    config = config or Config(load_env=False)
    shell = config.stability.shell_radius_factor * base.a1 if near_field else None
    experiment = StabilityExperiment(
        base=base, direction=np.asarray(direction, dtype=float), amplitudes=amplitudes, shell_radius=shell
    )
    out_grid = build_sphere_quadrature(config.far_field.grid_degree)
    in_grid = build_sphere_quadrature(config.far_field.in_grid_degree)
    logger.info(
        f"Pair family: {experiment.amplitudes.size} amplitudes, "
        f"{out_grid.size} x {in_grid.size} far-field grid, {threads} workers"
    )
    base_matrix, base_traces = _forward(base, out_grid, in_grid, config)

    records = Parallel(n_jobs=threads, prefer="threads")(
        delayed(_record)(i, a, experiment, base_matrix, base_traces, config, samples, seed)
        for i, a in enumerate(experiment.amplitudes)
    )
    experiment.records = sorted(records, key=lambda r: r.index)
    logger.info(
        f"Pair family done: {len(experiment.trustworthy_records)} of {len(records)} records trustworthy"
    )
    return experiment
