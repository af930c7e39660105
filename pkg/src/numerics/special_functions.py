"""
Special Functions
Spherical harmonics on S² and on the complex variety θ·θ = 1, spherical Bessel/Hankel functions
"""

import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from src.core.errors import DomainError, OffVarietyError, UnsupportedDegreeError

logger = logging.getLogger(__name__)

DEFAULT_L_MAX = 40
# Radial functions are not tied to the harmonic band limit
RADIAL_L_MAX = 120

UNIT_TOLERANCE = 1e-10
VARIETY_TOLERANCE = 1e-10

ArrayLike = Union[np.ndarray, float, complex]


@dataclass(frozen=True)
class HarmonicIndex:
    """Degree/order pair (ℓ, m) of an orthonormal spherical harmonic"""

    degree: int
    order: int

    def __post_init__(self):
        if self.degree < 0 or abs(self.order) > self.degree:
            raise DomainError(f"Invalid harmonic index (l={self.degree}, m={self.order})")

    @property
    def linear(self) -> int:
        """Position in the (ℓ, m) ordering used by all coefficient arrays"""
        return harmonic_linear_index(self.degree, self.order)


def harmonic_linear_index(degree: int, order: int) -> int:
    return degree * degree + degree + order


def harmonic_count(l_max: int) -> int:
    return (l_max + 1) ** 2


def harmonic_degrees_orders(l_max: int) -> Tuple[np.ndarray, np.ndarray]:
    """Degree and order arrays in linear-index order"""
    degrees = np.concatenate([np.full(2 * l + 1, l) for l in range(l_max + 1)])
    orders = np.concatenate([np.arange(-l, l + 1) for l in range(l_max + 1)])
    return degrees, orders


def _check_degree(degree: int, l_max: int) -> None:
    if degree > l_max:
        raise UnsupportedDegreeError(f"Degree {degree} exceeds configured maximum {l_max}")


def _recurrence_coefficients(l: int, m: int) -> Tuple[float, float]:
    a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
    b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
    return a, b


def solid_harmonics(l_max: int, points: np.ndarray, gradient: bool = False):
    """Evaluate the homogeneous harmonic polynomials p_ℓ^m for all ℓ ≤ l_max.

    p_ℓ^m(x) = Y_ℓ^m(x/|x|)|x|^ℓ for real x, and the same polynomial for complex x. Orthonormal
    basis with the Condon–Shortley phase.

    Args:
        l_max: Highest degree
        points: Array of shape (..., 3), real or complex
        gradient: Also return the Cartesian gradient of every polynomial

    Returns:
        values of shape (..., (l_max+1)²), and gradients of shape (..., (l_max+1)², 3) if requested
    """
    x = np.asarray(points)
    dtype = np.complex128
    x1, x2, z = x[..., 0].astype(dtype), x[..., 1].astype(dtype), x[..., 2].astype(dtype)
    s = x1 * x1 + x2 * x2 + z * z
    w_plus = x1 + 1j * x2
    w_minus = x1 - 1j * x2

    shape = x.shape[:-1]
    values = np.zeros(shape + (harmonic_count(l_max),), dtype=dtype)
    grads = np.zeros(shape + (harmonic_count(l_max), 3), dtype=dtype) if gradient else None

    e_plus = np.array([1.0, 1j, 0.0])
    e_minus = np.array([1.0, -1j, 0.0])
    e3 = np.array([0.0, 0.0, 1.0])
    xc = np.stack([x1, x2, z], axis=-1)

    c_mm = 1.0 / np.sqrt(4.0 * np.pi)
    pow_plus = np.ones(shape, dtype=dtype)
    pow_minus = np.ones(shape, dtype=dtype)
    pow_plus_prev = np.zeros(shape, dtype=dtype)
    pow_minus_prev = np.zeros(shape, dtype=dtype)

    for m in range(l_max + 1):
        if m > 0:
            c_mm = -np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * c_mm
            pow_plus_prev, pow_minus_prev = pow_plus, pow_minus
            pow_plus = pow_plus * w_plus
            pow_minus = pow_minus * w_minus

        # Q_ℓ^m(z, s) for ℓ = m, m+1, ... and its partial derivatives
        q_prev2 = np.zeros(shape, dtype=dtype)
        q_prev = np.full(shape, c_mm, dtype=dtype)
        qz_prev2 = np.zeros(shape, dtype=dtype)
        qz_prev = np.zeros(shape, dtype=dtype)
        qs_prev2 = np.zeros(shape, dtype=dtype)
        qs_prev = np.zeros(shape, dtype=dtype)

        for l in range(m, l_max + 1):
            if l == m:
                q, qz, qs = q_prev, qz_prev, qs_prev
            elif l == m + 1:
                factor = np.sqrt(2.0 * m + 3.0)
                q = factor * z * q_prev
                qz = factor * q_prev
                qs = np.zeros(shape, dtype=dtype)
            else:
                a, b = _recurrence_coefficients(l, m)
                q = a * (z * q_prev - b * s * q_prev2)
                if gradient:
                    qz = a * (q_prev + z * qz_prev - b * s * qz_prev2)
                    qs = a * (z * qs_prev - b * q_prev2 - b * s * qs_prev2)

            if l > m:
                q_prev2, q_prev = q_prev, q
                if gradient:
                    qz_prev2, qz_prev = qz_prev, qz
                    qs_prev2, qs_prev = qs_prev, qs

            idx_pos = harmonic_linear_index(l, m)
            values[..., idx_pos] = q * pow_plus
            if m > 0:
                sign = -1.0 if m % 2 else 1.0
                values[..., harmonic_linear_index(l, -m)] = sign * q * pow_minus

            if gradient:
                radial = qz[..., None] * e3 + 2.0 * qs[..., None] * xc
                grads[..., idx_pos, :] = radial * pow_plus[..., None]
                if m > 0:
                    grads[..., idx_pos, :] += (q * m * pow_plus_prev)[..., None] * e_plus
                    minus = radial * pow_minus[..., None] + (q * m * pow_minus_prev)[..., None] * e_minus
                    grads[..., harmonic_linear_index(l, -m), :] = sign * minus

    if gradient:
        return values, grads
    return values


def sph_harmonics_all(l_max: int, directions: np.ndarray) -> np.ndarray:
    """All orthonormal Y_ℓ^m up to l_max at real unit directions, shape (..., (l_max+1)²)"""
    return solid_harmonics(l_max, np.asarray(directions, dtype=float))


def sph_harmonic(idx: HarmonicIndex, x: np.ndarray, l_max: int = DEFAULT_L_MAX) -> complex:
    """Orthonormal spherical harmonic Y_ℓ^m at a real unit vector.

    Args:
        idx: Degree and order
        x: Real unit 3-vector
        l_max: Configured maximum degree

    Returns:
        Complex value of Y_ℓ^m(x)
    """
    _check_degree(idx.degree, l_max)
    x = np.asarray(x, dtype=float)
    if abs(np.linalg.norm(x) - 1.0) > UNIT_TOLERANCE:
        raise DomainError(f"Direction is not a unit vector: |x| = {np.linalg.norm(x)}")
    return complex(solid_harmonics(idx.degree, x)[idx.linear])


def check_on_variety(theta: np.ndarray, tolerance: float = VARIETY_TOLERANCE) -> None:
    """Raise OffVarietyError unless the bilinear product θ·θ equals 1"""
    theta = np.asarray(theta, dtype=complex)
    product = np.sum(theta * theta, axis=-1)
    scale = np.maximum(1.0, np.sum(np.abs(theta) ** 2, axis=-1))
    deviation = np.abs(product - 1.0) / scale
    if np.any(deviation > tolerance):
        raise OffVarietyError(f"theta.theta deviates from 1 by {float(np.max(deviation)):.3e}")


def sph_harmonic_complex(idx: HarmonicIndex, theta: np.ndarray, l_max: int = DEFAULT_L_MAX) -> complex:
    """Analytic continuation of Y_ℓ^m to θ ∈ ℂ³ with θ·θ = 1 (bilinear product)"""
    _check_degree(idx.degree, l_max)
    check_on_variety(theta)
    return complex(solid_harmonics(idx.degree, np.asarray(theta, dtype=complex))[idx.linear])


def sph_harmonics_complex_all(l_max: int, theta: np.ndarray) -> np.ndarray:
    """All continued harmonics up to l_max at points of the variety"""
    check_on_variety(theta)
    return solid_harmonics(l_max, np.asarray(theta, dtype=complex))


def real_harmonics_all(l_max: int, directions: np.ndarray, gradient: bool = False):
    """Real orthonormal harmonics S_ℓ^m, with surface gradients when requested.

    S_ℓ^m = √2 (−1)^m Re Y_ℓ^m for m > 0, √2 (−1)^m Im Y_ℓ^{|m|} for m < 0, Y_ℓ^0 for m = 0.
    Surface gradients are tangential (directions must be unit vectors).
    """
    degrees, orders = harmonic_degrees_orders(l_max)
    sign = np.where(orders % 2 == 0, 1.0, -1.0) * np.sqrt(2.0)
    positive_idx = degrees * degrees + degrees + np.abs(orders)

    directions = np.asarray(directions, dtype=float)
    if gradient:
        values, grads = solid_harmonics(l_max, directions, gradient=True)
        # Tangential part: ∇p − ℓ p x on the unit sphere
        grads = grads - (degrees[:, None] * values[..., None]) * directions[..., None, :]
    else:
        values = solid_harmonics(l_max, directions)

    pos_vals = values[..., positive_idx]
    real_vals = np.where(orders > 0, sign * pos_vals.real, np.where(orders < 0, sign * pos_vals.imag, pos_vals.real))
    if not gradient:
        return real_vals

    pos_grads = grads[..., positive_idx, :]
    o = orders[:, None]
    sg = sign[:, None]
    real_grads = np.where(o > 0, sg * pos_grads.real, np.where(o < 0, sg * pos_grads.imag, pos_grads.real))
    return real_vals, real_grads


def real_to_complex_coefficients(real_coefficients: np.ndarray) -> np.ndarray:
    """Convert coefficients in the real basis S_ℓ^m to the complex basis Y_ℓ^m"""
    real_coefficients = np.asarray(real_coefficients, dtype=float)
    l_max = int(round(np.sqrt(real_coefficients.size))) - 1
    out = np.zeros(real_coefficients.shape, dtype=complex)
    for l in range(l_max + 1):
        out[harmonic_linear_index(l, 0)] = real_coefficients[harmonic_linear_index(l, 0)]
        for m in range(1, l + 1):
            a = real_coefficients[harmonic_linear_index(l, m)]
            b = real_coefficients[harmonic_linear_index(l, -m)]
            sign = -1.0 if m % 2 else 1.0
            out[harmonic_linear_index(l, m)] = sign * (a - 1j * b) / np.sqrt(2.0)
            out[harmonic_linear_index(l, -m)] = (a + 1j * b) / np.sqrt(2.0)
    return out


def legendre_all(l_max: int, t: ArrayLike) -> np.ndarray:
    """Legendre polynomials P_0..P_l_max at real or complex t, shape (l_max+1, ...)"""
    t = np.asarray(t)
    out = np.zeros((l_max + 1,) + t.shape, dtype=np.result_type(t, float))
    out[0] = 1.0
    if l_max >= 1:
        out[1] = t
    for l in range(1, l_max):
        out[l + 1] = ((2 * l + 1) * t * out[l] - l * out[l - 1]) / (l + 1)
    return out


# Spherical Bessel and Hankel functions


def _check_radial_argument(x: np.ndarray) -> None:
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("Spherical Bessel functions require x > 0")


def spherical_jn_all(l_max: int, x: ArrayLike) -> np.ndarray:
    """j_0..j_l_max at positive x by Miller's downward recurrence, shape (l_max+1, ...)"""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _check_radial_argument(x)

    start = int(max(l_max, np.ceil(x.max()))) + 40 + int(2.0 * np.sqrt(max(l_max, x.max())))
    out = np.zeros((l_max + 1,) + x.shape)
    f_next = np.zeros_like(x)
    f = np.full_like(x, 1e-30)
    for n in range(start, 0, -1):
        f_prev = (2.0 * n + 1.0) / x * f - f_next
        f_next, f = f, f_prev
        big = np.abs(f) > 1e100
        if np.any(big):
            f[big] *= 1e-100
            f_next[big] *= 1e-100
            out[:, big] *= 1e-100
        if n - 1 <= l_max:
            out[n - 1] = f
        if n <= l_max:
            out[n] = f_next

    # Normalize against whichever closed form is better conditioned
    sin_x, cos_x = np.sin(x), np.cos(x)
    j0 = sin_x / x
    small = x < 1e-3
    j1 = np.where(small, x / 3.0 - x**3 / 30.0, (sin_x / x - cos_x) / np.where(small, 1.0, x))
    use_j0 = np.abs(j0) >= np.abs(j1)
    scale = np.where(use_j0, j0 / out[0], j1 / np.where(out[1] == 0, 1.0, out[1]) if l_max >= 1 else j0 / out[0])
    return out * scale


def spherical_yn_all(l_max: int, x: ArrayLike) -> np.ndarray:
    """y_0..y_l_max at positive x by upward recurrence, shape (l_max+1, ...)"""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _check_radial_argument(x)
    out = np.zeros((l_max + 1,) + x.shape)
    out[0] = -np.cos(x) / x
    if l_max >= 1:
        out[1] = -np.cos(x) / x**2 - np.sin(x) / x
    for n in range(1, l_max):
        out[n + 1] = (2.0 * n + 1.0) / x * out[n] - out[n - 1]
    return out


def spherical_hn1_all(l_max: int, x: ArrayLike) -> np.ndarray:
    """h_ℓ^{(1)} = j_ℓ + i y_ℓ for ℓ = 0..l_max"""
    return spherical_jn_all(l_max, x) + 1j * spherical_yn_all(l_max, x)


def derivative_from_recurrence(values: np.ndarray, x: ArrayLike) -> np.ndarray:
    """f_ℓ' = f_{ℓ−1} − (ℓ+1)/x f_ℓ, f_0' = −f_1, for any spherical Bessel family.

    The highest degree in `values` is used only as input for the degree below it.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros((values.shape[0] - 1,) + values.shape[1:], dtype=values.dtype)
    out[0] = -values[1]
    for n in range(1, values.shape[0] - 1):
        out[n] = values[n - 1] - (n + 1.0) / x * values[n]
    return out


def spherical_bessel_j(degree: int, x: float, l_max: int = RADIAL_L_MAX) -> float:
    """Spherical Bessel function j_ℓ(x), x > 0"""
    _check_degree(degree, l_max)
    return float(spherical_jn_all(degree, x)[degree, 0])


def spherical_bessel_y(degree: int, x: float, l_max: int = RADIAL_L_MAX) -> float:
    _check_degree(degree, l_max)
    return float(spherical_yn_all(degree, x)[degree, 0])


def spherical_hankel_h1(degree: int, x: float, l_max: int = RADIAL_L_MAX) -> complex:
    """Spherical Hankel function of the first kind h_ℓ^{(1)}(x), x > 0"""
    _check_degree(degree, l_max)
    return complex(spherical_hn1_all(degree, x)[degree, 0])


def bessel_wronskian(degree: int, x: float) -> float:
    """j_ℓ y_ℓ' − j_ℓ' y_ℓ, which equals 1/x²"""
    j = spherical_jn_all(degree + 1, x)
    y = spherical_yn_all(degree + 1, x)
    dj = derivative_from_recurrence(j, x)
    dy = derivative_from_recurrence(y, x)
    return float(j[degree, 0] * dy[degree, 0] - dj[degree, 0] * y[degree, 0])


def hankel_large_order_asymptotic(degree: int, r: float) -> complex:
    """Large-order form i √(1/((ℓ+½) r)) ((2ℓ+1)/(e r))^{(2ℓ+1)/2} of h_ℓ^{(1)}(r).

    The exact function is −i times a positive number to leading order, so only the modulus of
    this form is meaningful for comparisons.
    """
    if degree < 1:
        raise DomainError("Asymptotic form requires degree >= 1")
    if r < 1.0:
        raise DomainError("Asymptotic form requires r >= 1")
    log_modulus = -0.5 * np.log((degree + 0.5) * r) + (degree + 0.5) * np.log((2.0 * degree + 1.0) / (np.e * r))
    return 1j * float(np.exp(log_modulus))
