"""
Inversion Formula
χ̃_D(λ) from −4π ∫ A(θ′, α) ν(α, θ) dα = −(|λ|²/2) χ̃_D(λ), and the exact Green-identity check
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.analysis.directions import ComplexDirectionPair
from src.core.errors import DivisionDegenerateError
from src.geometry.surface import StarSurface
from src.numerics.quadrature import build_sphere_quadrature, gauss_legendre
from src.reconstruction.density import HerglotzDensity

logger = logging.getLogger(__name__)


@dataclass
class InversionEstimate:
    """χ̃ estimate with both evaluation paths and the a-priori misfit bound"""

    value: complex
    path: str
    oracle_value: Optional[complex]
    data_value: Optional[complex]
    discrepancy: Optional[float]
    continuation_bound: Optional[float]
    error_bound: Optional[float]
    warning: bool = False


@dataclass
class GreenIdentityReport:
    lhs: complex
    rhs: complex
    discrepancy: float
    relative: bool


def ball_transform(lam_norm: float, radius: float = 1.0) -> float:
    """χ̃ of the ball: 4π(sin(|λ|a) − |λ|a cos(|λ|a))/|λ|³, and 4πa³/3 at λ = 0"""
    if lam_norm == 0:
        return 4.0 * np.pi * radius**3 / 3.0
    x = lam_norm * radius
    return float(4.0 * np.pi * (np.sin(x) - x * np.cos(x)) / lam_norm**3)


def volume_transform(surface: StarSurface, lam: np.ndarray, sphere_degree: int = 82, radial_nodes: int = 48):
    """χ̃_D(λ) = ∫_D exp(−iλ·x) dx by radial Gauss–Legendre over the star-shaped interior"""
    lam = np.atleast_2d(np.asarray(lam, dtype=float))
    sphere = build_sphere_quadrature(sphere_degree)
    radii = surface.radius(sphere.nodes)
    t, tw = gauss_legendre(radial_nodes, 0.0, 1.0)
    # ρ = r(x̂)·t, dρ = r dt, integrand ρ² exp(−iλ·ρx̂)
    projection = sphere.nodes @ lam.T  # (n_dirs, n_lambda)
    total = np.zeros(lam.shape[0], dtype=complex)
    for tk, wk in zip(t, tw):
        rho = radii * tk
        total += (sphere.weights * rho**2 * radii * wk) @ np.exp(-1j * rho[:, None] * projection)
    return total if total.size > 1 else complex(total[0])


def inversion_formula_estimate(
    density: HerglotzDensity,
    oracle_far_field: Optional[np.ndarray] = None,
    data_far_field: Optional[np.ndarray] = None,
    data_bounds: Optional[np.ndarray] = None,
    path: str = "oracle",
    phase_norm: Optional[float] = None,
) -> InversionEstimate:
    """χ̃ = (−4π Σ_j A(θ′, α_j) ν_j w_j) / (−|λ|²/2).

    Args:
        density: ν for the pair (θ, θ′)
        oracle_far_field: A(θ′, α_j) by the direct surface integral
        data_far_field: A(θ′, α_j) by the continued harmonic series
        data_bounds: Tail bounds of the continued values
        path: Which value to report ("oracle" or "data")
        phase_norm: ‖exp(−iθ′·s)‖ in L²(Γ), for the misfit error bound

    Returns:
        InversionEstimate
    """
    pair = density.pair
    lam_sq = float(pair.lam @ pair.lam)
    if lam_sq == 0.0:
        raise DivisionDegenerateError("lambda = 0: both sides vanish; use the volume instead")
    scale = -0.5 * lam_sq
    weighted = density.values * density.weights

    def estimate(far_field):
        return complex(-4.0 * np.pi * np.sum(far_field * weighted) / scale)

    oracle_value = estimate(oracle_far_field) if oracle_far_field is not None else None
    data_value = estimate(data_far_field) if data_far_field is not None else None
    continuation_bound = None
    warning = False
    if data_bounds is not None:
        continuation_bound = float(4.0 * np.pi * np.sum(np.abs(weighted) * data_bounds) / abs(scale))
        warning = bool(data_value is not None and continuation_bound > abs(data_value))

    discrepancy = None
    if oracle_value is not None and data_value is not None:
        discrepancy = abs(oracle_value - data_value)

    if path == "data" and data_value is not None:
        value = data_value
    elif oracle_value is not None:
        value = oracle_value
        path = "oracle"
    elif data_value is not None:
        value, path = data_value, "data"
    else:
        raise ValueError("No far-field values supplied")

    error_bound = phase_norm * density.residual / abs(scale) if phase_norm is not None else None
    return InversionEstimate(
        value=value,
        path=path,
        oracle_value=oracle_value,
        data_value=data_value,
        discrepancy=discrepancy,
        continuation_bound=continuation_bound,
        error_bound=error_bound,
        warning=warning,
    )


def green_identity_check(
    surface: StarSurface,
    pair: ComplexDirectionPair,
    sphere_degree: int = 82,
    radial_nodes: int = 48,
) -> GreenIdentityReport:
    """Compare ∫_Γ exp(−iθ′·s) ∂_N exp(iθ·s) ds with −(|λ|²/2) χ̃_D(λ).

    The surface side uses the surface quadrature, the volume side the radial quadrature; the
    discrepancy is relative to max(|lhs|, |rhs|, |λ|²|D|/2), absolute when λ = 0.
    """
    quadrature = surface.quadrature(sphere_degree)
    theta, theta_prime = pair.theta, pair.theta_prime
    integrand = 1j * (quadrature.normals @ theta) * np.exp(1j * quadrature.points @ (theta - theta_prime))
    lhs = complex(quadrature.weights @ integrand)

    lam_sq = float(pair.lam @ pair.lam)
    transform = volume_transform(surface, pair.lam, sphere_degree, radial_nodes)
    rhs = complex(-0.5 * lam_sq * transform)

    if lam_sq == 0.0:
        discrepancy, relative = abs(lhs - rhs), False
    else:
        volume = abs(volume_transform(surface, np.zeros(3), sphere_degree, radial_nodes))
        denominator = max(abs(lhs), abs(rhs), 0.5 * lam_sq * volume)
        discrepancy, relative = abs(lhs - rhs) / denominator, True
    logger.debug(f"Identity check |lambda|={np.sqrt(lam_sq):.3f}: lhs={lhs:.6e}, rhs={rhs:.6e}, disc={discrepancy:.2e}")
    return GreenIdentityReport(lhs=lhs, rhs=rhs, discrepancy=discrepancy, relative=relative)
