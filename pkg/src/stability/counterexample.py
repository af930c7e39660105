"""
Hankel Counterexample
Outgoing fields v_ℓ Y_ℓ with unit boundary norm whose annulus norm decays like a2^{−(ℓ+1)}
"""

import logging
from dataclasses import asdict, dataclass
from typing import List, Sequence

import numpy as np

from src.core.errors import DomainError
from src.numerics.quadrature import build_sphere_quadrature, gauss_legendre
from src.numerics.special_functions import (
    hankel_large_order_asymptotic,
    harmonic_linear_index,
    solid_harmonics,
    spherical_hn1_all,
)

logger = logging.getLogger(__name__)

ANNULUS_NODES = 128


@dataclass
class CounterexampleRow:
    degree: int
    boundary_norm: float
    annulus_norm: float
    scaled_product: float
    root_ratio: float
    asymptotic_error: float


def radial_ratio(degree: int, r: np.ndarray) -> np.ndarray:
    """v_ℓ(r) = h_ℓ(r) / h_ℓ(1)"""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    h = spherical_hn1_all(degree, np.concatenate([[1.0], r]))[degree]
    return h[1:] / h[0]


def boundary_norm(degree: int) -> float:
    """‖v_ℓ(1) Y_ℓ^0‖ in L²(S²) by sphere quadrature"""
    sphere = build_sphere_quadrature(2 * degree + 2)
    y = solid_harmonics(degree, sphere.nodes)[:, harmonic_linear_index(degree, 0)]
    v = radial_ratio(degree, 1.0)[0]
    return float(abs(v) * np.sqrt(sphere.weights @ np.abs(y) ** 2))


def annulus_norm(degree: int, a2: float, b: float, nodes: int = ANNULUS_NODES) -> float:
    """‖v_ℓ Y_ℓ‖ in L² of a2 ≤ |x| ≤ b: (∫ |v_ℓ(r)|² r² dr)^{1/2} by Gauss–Legendre in ln r"""
    s, w = gauss_legendre(nodes, np.log(a2), np.log(b))
    r = np.exp(s)
    v = radial_ratio(degree, r)
    return float(np.sqrt(w @ (np.abs(v) ** 2 * r**3)))


def example1_demo(degrees: Sequence[int], a2: float = 1.5, b: float = 3.0) -> List[CounterexampleRow]:
    """Boundary norm, annulus norm and a2^{ℓ+1}-scaled product per degree.

    Args:
        degrees: Harmonic degrees ℓ ≥ 1
        a2: Inner annulus radius, > 1
        b: Outer annulus radius, > a2

    Returns:
        One CounterexampleRow per degree, in input order
    """
    if not 1.0 < a2 < b:
        raise DomainError(f"Need 1 < a2 < b, got a2={a2}, b={b}")
    rows = []
    for degree in degrees:
        if degree < 1:
            raise DomainError(f"Degree {degree} must be at least 1")
        norm = annulus_norm(degree, a2, b)
        exact = abs(spherical_hn1_all(degree, 1.0)[degree, 0])
        asymptotic = abs(hankel_large_order_asymptotic(degree, 1.0))
        row = CounterexampleRow(
            degree=int(degree),
            boundary_norm=boundary_norm(degree),
            annulus_norm=norm,
            scaled_product=norm * a2 ** (degree + 1),
            root_ratio=norm ** (1.0 / degree) * a2,
            asymptotic_error=float(abs(asymptotic / exact) - 1.0),
        )
        logger.debug(f"l={degree}: annulus norm {norm:.3e}, scaled {row.scaled_product:.4f}")
        rows.append(row)
    logger.info(f"Counterexample rows for degrees {list(degrees)} at a2={a2}, b={b}")
    return rows


def rows_as_dicts(rows: Sequence[CounterexampleRow]) -> List[dict]:
    return [asdict(row) for row in rows]
