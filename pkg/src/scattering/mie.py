"""
Sound-Soft Sphere Series
Partial-wave solution for the ball: far field, normal-derivative trace, scattered field
"""

import logging
from functools import lru_cache

import numpy as np

from src.core.errors import DomainError
from src.geometry.surface import SurfaceQuadrature
from src.numerics.quadrature import build_sphere_quadrature
from src.numerics.special_functions import RADIAL_L_MAX, legendre_all, spherical_hn1_all, spherical_jn_all
from src.scattering.trace import ScatteringSolutionTrace

logger = logging.getLogger(__name__)

SERIES_CUTOFF = 1e-17
MIE_TOLERANCE = 1e-13


@lru_cache(maxsize=64)
def _series(radius: float, wavenumber: float):
    """j_ℓ(ka), h_ℓ(ka) for every degree that can contribute above the cutoff"""
    if radius <= 0 or wavenumber <= 0:
        raise DomainError("Sphere radius and wavenumber must be positive")
    x = wavenumber * radius
    l_top = min(RADIAL_L_MAX, int(x + 10.0 * x ** (1.0 / 3.0)) + 30)
    j = spherical_jn_all(l_top, x)[:, 0]
    h = spherical_hn1_all(l_top, x)[:, 0]
    return j, h


def _truncated(j: np.ndarray, h: np.ndarray, terms: np.ndarray):
    """Drop the tail where |terms| falls below the cutoff relative to the largest term"""
    magnitude = np.abs(terms)
    keep = np.nonzero(magnitude > SERIES_CUTOFF * magnitude.max())[0]
    n_terms = int(keep[-1]) + 1 if keep.size else 1
    return j[:n_terms], h[:n_terms]


def mie_coefficients(radius: float, wavenumber: float = 1.0) -> np.ndarray:
    """c_ℓ with A_ℓm(α) = c_ℓ conj(Y_ℓ^m(α)): c_ℓ = 4πi j_ℓ(ka) / (k h_ℓ(ka))"""
    j, h = _series(radius, wavenumber)
    j, h = _truncated(j, h, j / h)
    return 4.0 * np.pi * 1j * j / (wavenumber * h)


def mie_far_field(radius: float, out_direction: np.ndarray, in_direction: np.ndarray, wavenumber: float = 1.0):
    """A(α′, α) = (i/k) Σ (2ℓ+1) j_ℓ(ka)/h_ℓ(ka) P_ℓ(α′·α); α′ may lie on the complex variety.

    Both arguments broadcast over leading axes.
    """
    j, h = _series(radius, wavenumber)
    ell = np.arange(j.size)
    j, h = _truncated(j, h, (2 * ell + 1) * j / h)
    ell = ell[: j.size]
    cosines = np.sum(np.asarray(out_direction) * np.asarray(in_direction), axis=-1)
    legendre = legendre_all(j.size - 1, cosines)
    weights = (2 * ell + 1) * j / h
    return (1j / wavenumber) * np.tensordot(weights, legendre, axes=(0, 0))


def mie_far_field_matrix(radius: float, out_nodes: np.ndarray, in_nodes: np.ndarray, wavenumber: float = 1.0):
    return mie_far_field(radius, out_nodes[:, None, :], in_nodes[None, :, :], wavenumber)


def sphere_quadrature(radius: float, degree: int) -> SurfaceQuadrature:
    sphere = build_sphere_quadrature(degree)
    return SurfaceQuadrature(
        points=radius * sphere.nodes,
        normals=sphere.nodes,
        weights=radius**2 * sphere.weights,
        directions=sphere.nodes,
        jacobians=np.full(sphere.size, radius**2),
        degree=degree,
    )


def mie_un_values(radius: float, normals: np.ndarray, in_direction: np.ndarray, wavenumber: float = 1.0):
    """u_N = −i/(k a²) Σ i^ℓ (2ℓ+1)/h_ℓ(ka) P_ℓ(α·ŝ), from the Wronskian j'h − jh' = −i/x²"""
    j, h = _series(radius, wavenumber)
    ell = np.arange(h.size)
    j, h = _truncated(j, h, (2 * ell + 1) / h)
    ell = ell[: h.size]
    cosines = np.asarray(normals) @ np.asarray(in_direction)
    legendre = legendre_all(h.size - 1, cosines)
    weights = (1j**ell) * (2 * ell + 1) / h
    return (-1j / (wavenumber * radius**2)) * np.tensordot(weights, legendre, axes=(0, 0))


def mie_un_trace(radius: float, in_direction: np.ndarray, degree: int = 82, wavenumber: float = 1.0):
    """Normal-derivative trace of the total field on the sphere of the given radius"""
    quadrature = sphere_quadrature(radius, degree)
    values = mie_un_values(radius, quadrature.normals, in_direction, wavenumber)
    return ScatteringSolutionTrace(
        quadrature=quadrature,
        direction=np.asarray(in_direction, dtype=float),
        un_values=values,
        wavenumber=wavenumber,
        solver_tolerance=MIE_TOLERANCE,
        diagnostics={"method": "series", "series_degree": int(_series(radius, wavenumber)[0].size - 1)},
    )


def mie_scattered_field(radius: float, points: np.ndarray, in_direction: np.ndarray, wavenumber: float = 1.0):
    """u_s(x) = −Σ i^ℓ (2ℓ+1) j_ℓ(ka)/h_ℓ(ka) h_ℓ(k|x|) P_ℓ(α·x̂) for |x| > a"""
    j, h = _series(radius, wavenumber)
    j, h = _truncated(j, h, (2 * np.arange(j.size) + 1) * j / h)
    points = np.atleast_2d(points)
    r = np.linalg.norm(points, axis=1)
    ell = np.arange(j.size)
    h_r = spherical_hn1_all(j.size - 1, wavenumber * r)
    legendre = legendre_all(j.size - 1, (points / r[:, None]) @ in_direction)
    weights = (1j**ell) * (2 * ell + 1) * j / h
    return -np.sum(weights[:, None] * h_r * legendre, axis=0)
