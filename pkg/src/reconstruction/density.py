"""
Herglotz Densities
Tikhonov-regularized ν with ∫ u_N(s, α) ν(α) dα ≈ ∂_N exp(iθ·s) on Γ, penalty chosen by discrepancy
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import svd

from src.analysis.directions import ComplexDirectionPair
from src.config import ReconstructionConfig
from src.core.errors import DomainError, NumericalError
from src.geometry.surface import SurfaceQuadrature
from src.numerics.special_functions import check_on_variety
from src.scattering.trace import TraceSet

logger = logging.getLogger(__name__)


@dataclass
class HerglotzDensity:
    """ν_j ≈ ν_ε(α_j, θ) on the incident grid, with the misfit actually achieved"""

    directions: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    pair: Optional[ComplexDirectionPair]
    epsilon: float
    residual: float
    beta: float
    unattainable: bool

    @property
    def norm(self) -> float:
        """L²(S²) norm of ν"""
        return float(np.sqrt(np.sum(self.weights * np.abs(self.values) ** 2)))


def target_trace(quadrature: SurfaceQuadrature, theta: np.ndarray) -> np.ndarray:
    """∂_N exp(iθ·s) = i(θ·N_s) exp(iθ·s) at every surface node"""
    theta = np.asarray(theta, dtype=complex)
    check_on_variety(theta)
    return 1j * (quadrature.normals @ theta) * np.exp(1j * (quadrature.points @ theta))


class DensitySolver:
    """SVD of the weighted operator B = diag(√w_Γ) U diag(√w_α), reused across targets.

    U[i, j] = u_N(s_i, α_j). With b = √w_Γ · target, μ(β) = V diag(σ/(σ²+β)) Uᴴ b minimizes
    ‖Bμ − b‖² + β‖μ‖², and ν = μ/√w_α.
    """

    def __init__(self, traces: TraceSet, config: Optional[ReconstructionConfig] = None):
        self.traces = traces
        self.config = config or ReconstructionConfig()
        self.sqrt_surface = np.sqrt(traces.quadrature.weights)
        self.sqrt_directions = np.sqrt(traces.direction_weights)
        operator = self.sqrt_surface[:, None] * traces.un_values * self.sqrt_directions[None, :]
        if not np.all(np.isfinite(operator)):
            raise NumericalError("Density operator contains non-finite entries")
        self.left, self.sigma, self.right_h = svd(operator, full_matrices=False)
        if self.sigma.size == 0 or self.sigma[0] == 0.0:
            raise NumericalError("Density operator is identically zero")
        logger.info(
            f"Density operator SVD: {operator.shape}, sigma range [{self.sigma[-1]:.2e}, {self.sigma[0]:.2e}]"
        )

    def _residual(self, beta: float, coeffs: np.ndarray, outside: float) -> float:
        filt = beta / (self.sigma**2 + beta)
        return float(np.sqrt(np.sum((filt * np.abs(coeffs)) ** 2) + outside**2))

    def solve(self, target: np.ndarray, epsilon: float, pair: Optional[ComplexDirectionPair] = None):
        """Largest penalty whose misfit stays within ε (bisection on log β).

        Args:
            target: ∂_N exp(iθ·s) at the surface nodes
            epsilon: Misfit tolerance in L²(Γ)
            pair: Direction pair the target was built from

        Returns:
            HerglotzDensity; `unattainable` is set when even the smallest penalty misses ε
        """
        if epsilon <= 0:
            raise DomainError("epsilon must be positive")
        cfg = self.config
        b = self.sqrt_surface * target
        b_norm = float(np.linalg.norm(b))
        coeffs = self.left.conj().T @ b
        outside = float(np.sqrt(max(b_norm**2 - np.sum(np.abs(coeffs) ** 2), 0.0)))

        directions = self.traces.directions
        weights = self.traces.direction_weights
        if b_norm <= epsilon:
            return HerglotzDensity(
                directions=directions,
                weights=weights,
                values=np.zeros(directions.shape[0], dtype=complex),
                pair=pair,
                epsilon=epsilon,
                residual=b_norm,
                beta=np.inf,
                unattainable=False,
            )

        log_lo, log_hi = np.log(cfg.beta_min), np.log(cfg.beta_max)
        unattainable = False
        if self._residual(cfg.beta_min, coeffs, outside) > epsilon:
            beta = cfg.beta_min
            unattainable = True
        elif self._residual(cfg.beta_max, coeffs, outside) <= epsilon:
            beta = cfg.beta_max
        else:
            for _ in range(cfg.bisection_steps):
                mid = 0.5 * (log_lo + log_hi)
                if self._residual(np.exp(mid), coeffs, outside) <= epsilon:
                    log_lo = mid
                else:
                    log_hi = mid
            beta = float(np.exp(log_lo))

        mu = self.right_h.conj().T @ (self.sigma / (self.sigma**2 + beta) * coeffs)
        values = mu / self.sqrt_directions
        operator_mu = self.left @ (self.sigma * (self.right_h @ mu))
        residual = float(np.linalg.norm(operator_mu - b))
        if unattainable:
            logger.warning(f"Misfit {residual:.2e} cannot reach epsilon={epsilon:.1e}")
        logger.debug(f"Density beta={beta:.3e}, residual={residual:.3e}, epsilon={epsilon:.1e}")
        return HerglotzDensity(
            directions=directions,
            weights=weights,
            values=values,
            pair=pair,
            epsilon=epsilon,
            residual=residual,
            beta=beta,
            unattainable=unattainable,
        )


def solve_density(
    traces: TraceSet,
    target: np.ndarray,
    epsilon: float,
    pair: Optional[ComplexDirectionPair] = None,
    config: Optional[ReconstructionConfig] = None,
) -> HerglotzDensity:
    return DensitySolver(traces, config).solve(target, epsilon, pair)
