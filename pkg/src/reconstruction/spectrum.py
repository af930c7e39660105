"""
Spectrum Scan
Pointwise χ̃_D(λ) estimates over a Cartesian λ-lattice with Hermitian symmetrization
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from joblib import Parallel, delayed

from src.analysis.directions import make_direction_pair, minimal_imag_scale
from src.analysis.far_field_operator import FarFieldCoefficients, continue_far_field_all
from src.config import ReconstructionConfig
from src.core.errors import LabError
from src.geometry.surface import StarSurface
from src.reconstruction.density import DensitySolver, target_trace
from src.reconstruction.inversion import inversion_formula_estimate, volume_transform
from src.scattering.trace import TraceSet

logger = logging.getLogger(__name__)


@dataclass
class SpectrumGrid:
    """χ̃ estimates on the lattice λ = h·(i, j, k), |λ| ≤ Λ_max"""

    indices: np.ndarray
    spacing: float
    lambda_max: float
    values: np.ndarray
    raw_values: np.ndarray
    residuals: np.ndarray
    bounds: np.ndarray
    symmetry_residuals: np.ndarray
    failures: Dict[int, str] = field(default_factory=dict)

    @property
    def lambdas(self) -> np.ndarray:
        return self.indices * self.spacing

    @property
    def zero_index(self) -> int:
        return int(np.nonzero(np.all(self.indices == 0, axis=1))[0][0])

    @property
    def volume(self) -> float:
        return float(self.values[self.zero_index].real)


def lattice_indices(lambda_max: float, spacing: float) -> np.ndarray:
    """Integer lattice points with |h·n| ≤ Λ_max, in lexicographic order"""
    n = int(np.floor(lambda_max / spacing + 1e-9))
    axis = np.arange(-n, n + 1)
    grid = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    keep = np.linalg.norm(grid * spacing, axis=1) <= lambda_max * (1.0 + 1e-12)
    return grid[keep]


def _estimate_point(
    lam: np.ndarray,
    solver: DensitySolver,
    traces: TraceSet,
    epsilon: float,
    config: ReconstructionConfig,
    coefficients: Optional[FarFieldCoefficients],
):
    t = minimal_imag_scale(float(np.linalg.norm(lam)), config.t_margin)
    pair = make_direction_pair(lam, t)
    target = target_trace(traces.quadrature, pair.theta)
    density = solver.solve(target, epsilon, pair)

    oracle = traces.far_field(pair.theta_prime)[0]
    data = bounds = None
    if coefficients is not None:
        data, bounds = continue_far_field_all(coefficients, pair.theta_prime)
    phase = np.exp(-1j * traces.quadrature.points @ pair.theta_prime)
    phase_norm = float(np.sqrt(traces.quadrature.weights @ np.abs(phase) ** 2))

    estimate = inversion_formula_estimate(
        density,
        oracle_far_field=oracle,
        data_far_field=data,
        data_bounds=bounds,
        path=config.path,
        phase_norm=phase_norm,
    )
    bound = estimate.error_bound + (estimate.continuation_bound or 0.0)
    return estimate.value, density.residual, bound


def spectrum_scan(
    traces: TraceSet,
    surface: StarSurface,
    config: Optional[ReconstructionConfig] = None,
    epsilon: Optional[float] = None,
    coefficients: Optional[FarFieldCoefficients] = None,
    threads: int = 1,
    sphere_degree: int = 82,
) -> SpectrumGrid:
    """Estimate χ̃_D on the λ-lattice; λ = 0 is the volume.

    Args:
        traces: u_N traces over the incident grid
        surface: Obstacle, used for the λ = 0 volume
        config: Lattice, regularization and path settings
        epsilon: Misfit tolerance (config.epsilon when omitted)
        coefficients: Far-field coefficients for the data path
        threads: Worker count
        sphere_degree: Quadrature degree of the volume integral

    Returns:
        SpectrumGrid with per-point diagnostics; failed points are recorded, not raised
    """
    config = config or ReconstructionConfig()
    epsilon = epsilon or config.epsilon
    indices = lattice_indices(config.lambda_max, config.lambda_spacing)
    lambdas = indices * config.lambda_spacing
    solver = DensitySolver(traces, config)
    logger.info(f"Spectrum scan over {len(indices)} lattice points, epsilon={epsilon:.1e}, path={config.path}")

    def work(i: int):
        if not np.any(indices[i]):
            volume = volume_transform(surface, np.zeros(3), sphere_degree, config.radial_nodes)
            return i, complex(volume.real, 0.0), 0.0, 0.0, None
        try:
            value, residual, bound = _estimate_point(lambdas[i], solver, traces, epsilon, config, coefficients)
            return i, value, residual, bound, None
        except (LabError, np.linalg.LinAlgError) as e:
            return i, np.nan + 0j, np.nan, np.nan, str(e)

    results = Parallel(n_jobs=threads, prefer="threads")(delayed(work)(i) for i in range(len(indices)))

    raw = np.full(len(indices), np.nan + 0j)
    residuals = np.full(len(indices), np.nan)
    bounds = np.full(len(indices), np.nan)
    failures: Dict[int, str] = {}
    for i, value, residual, bound, error in results:
        raw[i], residuals[i], bounds[i] = value, residual, bound
        if error is not None:
            failures[i] = error
            logger.warning(f"Spectrum point {indices[i].tolist()} failed: {error}")

    values, symmetry = _hermitian_average(indices, raw)
    logger.info(f"Spectrum scan done: {len(failures)} failures, max symmetry residual {np.nanmax(symmetry):.2e}")
    return SpectrumGrid(
        indices=indices,
        spacing=config.lambda_spacing,
        lambda_max=config.lambda_max,
        values=values,
        raw_values=raw,
        residuals=residuals,
        bounds=bounds,
        symmetry_residuals=symmetry,
        failures=failures,
    )


def _hermitian_average(indices: np.ndarray, raw: np.ndarray):
    """(χ̃(λ) + conj χ̃(−λ))/2 and the pre-averaging residual |χ̃(λ) − conj χ̃(−λ)|"""
    position = {tuple(idx): i for i, idx in enumerate(indices.tolist())}
    partner = np.array([position[tuple((-idx).tolist())] for idx in indices])
    mirrored = np.conj(raw[partner])
    symmetry = np.abs(raw - mirrored)
    values = np.where(np.isnan(raw), mirrored, np.where(np.isnan(mirrored), raw, 0.5 * (raw + mirrored)))
    return values, symmetry


def epsilon_sweep(
    traces: TraceSet,
    lam: np.ndarray,
    epsilons: List[float],
    config: Optional[ReconstructionConfig] = None,
    reference: Optional[complex] = None,
):
    """χ̃(λ) across a decreasing ε schedule: rows of (ε, residual, ‖ν‖, estimate, error)"""
    config = config or ReconstructionConfig()
    lam = np.asarray(lam, dtype=float)
    solver = DensitySolver(traces, config)
    pair = make_direction_pair(lam, minimal_imag_scale(float(np.linalg.norm(lam)), config.t_margin))
    target = target_trace(traces.quadrature, pair.theta)
    oracle = traces.far_field(pair.theta_prime)[0]

    rows = []
    for eps in epsilons:
        density = solver.solve(target, eps, pair)
        estimate = inversion_formula_estimate(density, oracle_far_field=oracle)
        error = abs(estimate.value - reference) if reference is not None else np.nan
        rows.append(
            {
                "epsilon": eps,
                "residual": density.residual,
                "density_norm": density.norm,
                "estimate_real": estimate.value.real,
                "estimate_imag": estimate.value.imag,
                "error": error,
                "unattainable": density.unattainable,
            }
        )
        logger.info(f"epsilon={eps:.1e}: residual={density.residual:.2e}, estimate={estimate.value:.6f}")
    return rows
