"""
Sphere Quadrature
Gauss–Legendre in the polar angle times the trapezoidal rule in azimuth
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from src.core.errors import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SphereQuadrature:
    """Product quadrature on S², exact for spherical polynomials up to `degree`"""

    nodes: np.ndarray
    weights: np.ndarray
    degree: int
    cos_polar: np.ndarray
    azimuths: np.ndarray

    @property
    def size(self) -> int:
        return int(self.weights.size)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Integrate node values (leading axis = nodes)"""
        return np.tensordot(self.weights, values, axes=(0, 0))


def gauss_legendre(n: int, a: float = -1.0, b: float = 1.0):
    """Gauss–Legendre nodes and weights on [a, b]"""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


@lru_cache(maxsize=32)
def build_sphere_quadrature(degree: int) -> SphereQuadrature:
    """Build a product rule exact for spherical polynomials of total degree ≤ degree.

    Args:
        degree: Polynomial exactness degree, at least 1

    Returns:
        SphereQuadrature whose weights sum to 4π
    """
    if degree < 1:
        raise DomainError(f"Quadrature degree must be >= 1, got {degree}")

    n_polar = degree // 2 + 1
    n_azimuth = degree + 1
    cos_polar, polar_weights = gauss_legendre(n_polar)
    azimuths = 2.0 * np.pi * np.arange(n_azimuth) / n_azimuth

    sin_polar = np.sqrt(1.0 - cos_polar**2)
    ct = np.repeat(cos_polar, n_azimuth)
    st = np.repeat(sin_polar, n_azimuth)
    ph = np.tile(azimuths, n_polar)
    nodes = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=1)
    weights = np.repeat(polar_weights, n_azimuth) * (2.0 * np.pi / n_azimuth)

    logger.debug(f"Sphere quadrature degree {degree}: {n_polar} x {n_azimuth} = {weights.size} nodes")
    for arr in (nodes, weights, cos_polar, azimuths):
        arr.setflags(write=False)
    return SphereQuadrature(nodes=nodes, weights=weights, degree=degree, cos_polar=cos_polar, azimuths=azimuths)


def direction_set(nodes: np.ndarray) -> SphereQuadrature:
    """Wrap arbitrary unit directions with equal-area weights (no exactness claimed)"""
    nodes = np.asarray(nodes, dtype=float)
    norms = np.linalg.norm(nodes, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-10):
        raise DomainError("Direction set must contain unit vectors")
    weights = np.full(nodes.shape[0], 4.0 * np.pi / nodes.shape[0])
    return SphereQuadrature(nodes=nodes, weights=weights, degree=0, cos_polar=np.empty(0), azimuths=np.empty(0))


def fibonacci_directions(n: int) -> np.ndarray:
    """Nearly uniform unit directions on the golden-angle spiral"""
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    golden_angle = np.pi * (3.0 - np.sqrt(5.0))
    phi = golden_angle * k
    rho = np.sqrt(1.0 - z * z)
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)
