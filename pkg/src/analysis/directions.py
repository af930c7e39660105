"""
Complex Direction Pairs
θ, θ′ on the variety θ·θ = 1 with θ′ − θ = λ
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.core.errors import DomainError, InfeasiblePairError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComplexDirectionPair:
    """θ = −λ/2 + aη + itζ and θ′ = λ/2 + aη + itζ"""

    theta: np.ndarray
    theta_prime: np.ndarray
    lam: np.ndarray
    imag_scale: float

    @property
    def lambda_norm(self) -> float:
        return float(np.linalg.norm(self.lam))


def orthonormal_frame(lam: np.ndarray):
    """Unit vectors η ⊥ ζ, both orthogonal to λ (e3 stands in for λ = 0).

    η comes from the coordinate axis where |u_k| is smallest (first index on ties), made
    orthogonal to u = λ/|λ|; ζ = u × η.
    """
    norm = np.linalg.norm(lam)
    u = lam / norm if norm > 0 else np.array([0.0, 0.0, 1.0])
    pivot = int(np.argmin(np.abs(u)))
    e = np.zeros(3)
    e[pivot] = 1.0
    eta = e - (e @ u) * u
    eta /= np.linalg.norm(eta)
    zeta = np.cross(u, eta)
    return eta, zeta


def minimal_imag_scale(lambda_norm: float, margin: float = 0.1) -> float:
    """Smallest t the pair needs: 0 up to |λ| = 2, then √(|λ|²/4 − 1) + margin"""
    if lambda_norm <= 2.0:
        return 0.0
    return float(np.sqrt(lambda_norm**2 / 4.0 - 1.0) + margin)


def make_direction_pair(lam: np.ndarray, t: float) -> ComplexDirectionPair:
    """Symmetric pair θ, θ′ ∈ M with θ′ − θ = λ and imaginary parts of norm t.

    Args:
        lam: Real 3-vector λ
        t: Imaginary scale, t ≥ 0

    Returns:
        ComplexDirectionPair
    """
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (3,):
        raise DomainError("lambda must be a real 3-vector")
    if t < 0:
        raise DomainError("Imaginary scale t must be non-negative")

    a_squared = 1.0 + t * t - float(lam @ lam) / 4.0
    if a_squared < 0:
        raise InfeasiblePairError(
            f"No pair for |lambda|={np.linalg.norm(lam):.4g} at t={t:.4g}; need t >= {np.sqrt(-a_squared + t * t):.4g}",
            details={"lambda": lam.tolist(), "t": t},
        )
    a = np.sqrt(a_squared)
    eta, zeta = orthonormal_frame(lam)
    centre = a * eta + 1j * t * zeta
    theta = -lam / 2.0 + centre
    # θ′ − θ = λ up to one rounding per component
    theta_prime = theta + lam
    return ComplexDirectionPair(theta=theta, theta_prime=theta_prime, lam=lam.copy(), imag_scale=float(t))
