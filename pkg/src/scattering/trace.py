"""
Scattering Solution Traces
Normal derivative of the total field on Γ and the integrals built from it
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from src.geometry.surface import SurfaceQuadrature
from src.numerics.special_functions import check_on_variety

logger = logging.getLogger(__name__)


@dataclass
class ScatteringSolutionTrace:
    """u_N(s_i, α) on a surface quadrature for one incident direction"""

    quadrature: SurfaceQuadrature
    direction: np.ndarray
    un_values: np.ndarray
    wavenumber: float = 1.0
    solver_tolerance: float = 0.0
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not np.all(np.isfinite(self.un_values)):
            raise ValueError("Trace contains non-finite values")


@dataclass
class TraceSet:
    """Traces for many incident directions on one shared surface quadrature"""

    quadrature: SurfaceQuadrature
    directions: np.ndarray
    direction_weights: np.ndarray
    un_values: np.ndarray  # (n_nodes, n_directions)
    wavenumber: float = 1.0
    solver_tolerance: float = 0.0
    surface_hash: Optional[str] = None

    def trace(self, index: int) -> ScatteringSolutionTrace:
        return ScatteringSolutionTrace(
            quadrature=self.quadrature,
            direction=self.directions[index],
            un_values=self.un_values[:, index],
            wavenumber=self.wavenumber,
            solver_tolerance=self.solver_tolerance,
        )

    def far_field(self, theta_out: np.ndarray) -> np.ndarray:
        """A(θ′, α_j) for rows of θ′ (real or on the variety), shape (n_out, n_directions)"""
        theta_out = np.atleast_2d(np.asarray(theta_out))
        phase = np.exp(-1j * self.wavenumber * theta_out @ self.quadrature.points.T)
        return -(phase * self.quadrature.weights) @ self.un_values / (4.0 * np.pi)

    def scattered_field(self, points: np.ndarray) -> np.ndarray:
        """u_s(x, α_j) for points outside Γ, shape (n_points, n_directions)"""
        return _single_layer(self.wavenumber, self.quadrature, points, self.un_values)


def far_field_from_trace(trace: ScatteringSolutionTrace, theta_out: np.ndarray, check: bool = True) -> complex:
    """A(θ′, α) = −(1/4π) Σ_i exp(−ik θ′·s_i) u_N(s_i) w_i.

    The same expression serves real α′ ∈ S² and complex θ′ on the variety.
    """
    theta_out = np.asarray(theta_out)
    if check:
        if np.iscomplexobj(theta_out) and np.any(theta_out.imag != 0):
            check_on_variety(theta_out)
        elif abs(np.linalg.norm(theta_out.real) - 1.0) > 1e-10:
            check_on_variety(theta_out)
    q = trace.quadrature
    phase = np.exp(-1j * trace.wavenumber * (q.points @ theta_out))
    return complex(-np.sum(phase * trace.un_values * q.weights) / (4.0 * np.pi))


def green_function(k: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Φ(x, y) = e^{ik|x−y|}/(4π|x−y|), broadcast over leading axes"""
    dist = np.linalg.norm(x - y, axis=-1)
    return np.exp(1j * k * dist) / (4.0 * np.pi * dist)


def _single_layer(k: float, quadrature: SurfaceQuadrature, points: np.ndarray, un_values: np.ndarray) -> np.ndarray:
    """−Σ_i Φ(x, s_i) u_N(s_i) w_i; un_values may carry a trailing direction axis"""
    points = np.atleast_2d(points)
    kernel = green_function(k, points[:, None, :], quadrature.points[None, :, :])
    weights = quadrature.weights if un_values.ndim == 1 else quadrature.weights[:, None]
    return -kernel @ (un_values * weights)


def scattered_field(trace: ScatteringSolutionTrace, points: np.ndarray) -> np.ndarray:
    """u_s(x) = −∫_Γ Φ(x, s) u_N(s) ds for points outside Γ"""
    return _single_layer(trace.wavenumber, trace.quadrature, points, trace.un_values)
