"""
Surface Generators
Spheres, single-harmonic perturbations, seeded random perturbations and ellipsoid fits
"""

import logging
from typing import Optional, Sequence

import numpy as np

from src.geometry.surface import StarSurface
from src.numerics.quadrature import build_sphere_quadrature
from src.numerics.special_functions import harmonic_count, harmonic_linear_index, real_harmonics_all

logger = logging.getLogger(__name__)


def _class_bounds(r_min: float, r_max: float, a0: Optional[float], a1: Optional[float]):
    return (0.5 * r_min if a0 is None else a0), (2.0 * r_max if a1 is None else a1)


def sphere(radius: float, a0: Optional[float] = None, a1: Optional[float] = None, c0: float = 10.0, l_geom: int = 0):
    """Round sphere of the given radius (only the ℓ = 0 coefficient is non-zero)"""
    coefficients = np.zeros(harmonic_count(l_geom))
    coefficients[0] = radius * np.sqrt(4.0 * np.pi)
    a0, a1 = _class_bounds(radius, radius, a0, a1)
    return StarSurface(coefficients, a0, a1, c0)


def perturbed_sphere(
    radius: float,
    degree: int,
    order: int,
    amplitude: float,
    a0: Optional[float] = None,
    a1: Optional[float] = None,
    c0: float = 10.0,
    l_geom: Optional[int] = None,
    validate: bool = True,
) -> StarSurface:
    """r = radius + amplitude · S_degree^order (real orthonormal harmonic)"""
    l_geom = degree if l_geom is None else l_geom
    coefficients = np.zeros(harmonic_count(l_geom))
    coefficients[0] = radius * np.sqrt(4.0 * np.pi)
    coefficients[harmonic_linear_index(degree, order)] += amplitude
    bound = abs(amplitude) * np.sqrt((2 * degree + 1) / (4.0 * np.pi))
    a0, a1 = _class_bounds(radius - bound, radius + bound, a0, a1)
    return StarSurface(coefficients, a0, a1, c0, validate=validate)


def random_perturbed_sphere(
    base_radius: float,
    amplitude: float,
    l_max: int,
    seed: int,
    decay: float = 2.0,
    c0: float = 10.0,
) -> StarSurface:
    """Seeded random perturbation with coefficients decaying like (1+ℓ)^(-decay).

    Coefficients are rescaled so that max |r − base_radius| on a fine grid equals amplitude.
    """
    rng = np.random.default_rng(seed)
    size = harmonic_count(l_max)
    degrees = np.concatenate([np.full(2 * l + 1, l) for l in range(l_max + 1)])
    direction = rng.standard_normal(size) * (1.0 + degrees) ** (-decay)
    direction[0] = 0.0

    grid = build_sphere_quadrature(max(2 * l_max, 8))
    peak = np.max(np.abs(real_harmonics_all(l_max, grid.nodes) @ direction))
    direction *= amplitude / peak

    coefficients = direction.copy()
    coefficients[0] = base_radius * np.sqrt(4.0 * np.pi)
    # Margin absorbs the gap between the fitting grid and the admissibility grid
    a0, a1 = _class_bounds(base_radius - 1.5 * amplitude, base_radius + 1.5 * amplitude, None, None)
    surface = StarSurface(coefficients, a0, a1, c0)
    logger.debug(f"Random perturbed sphere seed={seed}: {surface}")
    return surface


def ellipsoid_radius(axes: Sequence[float], directions: np.ndarray) -> np.ndarray:
    """Exact ray-cast radius of the ellipsoid Σ x_i²/a_i² = 1"""
    axes = np.asarray(axes, dtype=float)
    return 1.0 / np.sqrt(np.sum((directions / axes) ** 2, axis=-1))


def ellipsoid_surface(axes: Sequence[float], l_geom: int = 16, c0: float = 10.0, degree: Optional[int] = None):
    """Band-limited fit of an ellipsoid's radial function by quadrature projection"""
    grid = build_sphere_quadrature(degree or 4 * l_geom + 8)
    basis = real_harmonics_all(l_geom, grid.nodes)
    r = ellipsoid_radius(axes, grid.nodes)
    coefficients = basis.T @ (grid.weights * r)
    a0, a1 = _class_bounds(min(axes), max(axes), None, None)
    return StarSurface(coefficients, a0, a1, c0)
