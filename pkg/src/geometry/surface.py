"""
Star-Shaped Surfaces
Radial graphs r(x⁰) over the unit sphere, surface quadrature and admissibility checks
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.core.errors import ClassViolationError, DomainError, NumericalError
from src.numerics.quadrature import build_sphere_quadrature
from src.numerics.special_functions import (
    harmonic_count,
    harmonic_degrees_orders,
    harmonic_linear_index,
    real_harmonics_all,
    real_to_complex_coefficients,
)

logger = logging.getLogger(__name__)

DEFAULT_CHECK_DEGREE = 64


@dataclass(frozen=True)
class SurfaceQuadrature:
    """Quadrature on Γ: points, outward unit normals and surface-measure weights"""

    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    directions: np.ndarray
    jacobians: np.ndarray
    degree: int

    @property
    def size(self) -> int:
        return int(self.weights.size)

    @property
    def area(self) -> float:
        return float(np.sum(self.weights))

    def integrate(self, values: np.ndarray) -> np.ndarray:
        return np.tensordot(self.weights, values, axes=(0, 0))


@dataclass
class AdmissibilityReport:
    """Per-condition result of the admissible-class checks"""

    min_radius: float
    max_radius: float
    a0: float
    a1: float
    smoothness_proxy: float
    c0: float
    annulus_ok: bool
    smoothness_ok: bool
    messages: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.annulus_ok and self.smoothness_ok

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "annulus_ok": self.annulus_ok,
            "smoothness_ok": self.smoothness_ok,
            "min_radius": self.min_radius,
            "max_radius": self.max_radius,
            "a0": self.a0,
            "a1": self.a1,
            "smoothness_proxy": self.smoothness_proxy,
            "c0": self.c0,
            "messages": list(self.messages),
        }


def smoothness_proxy(coefficients: np.ndarray) -> float:
    """Coefficient bound on the C² norm of r: Σ |a_ℓm| √((2ℓ+1)/4π) (1 + ℓ(ℓ+1)).

    Each real harmonic satisfies |S_ℓ^m| ≤ √((2ℓ+1)/4π) and its second derivatives scale with
    ℓ(ℓ+1), so this dominates max|r| + max|Δ_S r|. For a sphere of radius a it equals a.
    """
    l_geom = int(round(np.sqrt(coefficients.size))) - 1
    degrees, _ = harmonic_degrees_orders(l_geom)
    weights = np.sqrt((2.0 * degrees + 1.0) / (4.0 * np.pi)) * (1.0 + degrees * (degrees + 1.0))
    return float(np.sum(np.abs(coefficients) * weights))


class StarSurface:
    """Star-shaped obstacle boundary r = r(x⁰) with real harmonic coefficients up to l_geom"""

    def __init__(
        self,
        coefficients: np.ndarray,
        a0: float,
        a1: float,
        c0: float,
        validate: bool = True,
        check_degree: int = DEFAULT_CHECK_DEGREE,
    ):
        coefficients = np.asarray(coefficients, dtype=float).copy()
        l_geom = int(round(np.sqrt(coefficients.size))) - 1
        if harmonic_count(l_geom) != coefficients.size:
            raise DomainError(f"Coefficient vector of length {coefficients.size} is not (L+1)^2")
        if not (0 < a0 <= a1) or c0 <= 0:
            raise DomainError(f"Need 0 < a0 <= a1 and c0 > 0, got a0={a0}, a1={a1}, c0={c0}")

        coefficients.setflags(write=False)
        self.coefficients = coefficients
        self.l_geom = l_geom
        self.a0 = float(a0)
        self.a1 = float(a1)
        self.c0 = float(c0)
        self.check_degree = check_degree

        if validate:
            report = self.admissibility_check()
            if not report.passed:
                raise ClassViolationError(f"Surface is not admissible: {'; '.join(report.messages)}", report=report)

    @classmethod
    def from_terms(
        cls,
        terms: List[Tuple[int, int, float]],
        a0: float,
        a1: float,
        c0: float,
        l_geom: Optional[int] = None,
        **kwargs,
    ) -> "StarSurface":
        """Build from sparse (ℓ, m, value) triples"""
        top = max((t[0] for t in terms), default=0)
        l_geom = top if l_geom is None else l_geom
        if top > l_geom:
            raise DomainError(f"Coefficient degree {top} exceeds L_geom={l_geom}")
        coefficients = np.zeros(harmonic_count(l_geom))
        for degree, order, value in terms:
            if abs(order) > degree:
                raise DomainError(f"Invalid harmonic index (l={degree}, m={order})")
            coefficients[harmonic_linear_index(degree, order)] += value
        return cls(coefficients, a0, a1, c0, **kwargs)

    def terms(self) -> List[Tuple[int, int, float]]:
        degrees, orders = harmonic_degrees_orders(self.l_geom)
        return [(int(l), int(m), float(v)) for l, m, v in zip(degrees, orders, self.coefficients) if v != 0.0]

    @property
    def complex_coefficients(self) -> np.ndarray:
        return real_to_complex_coefficients(self.coefficients)

    @property
    def is_sphere(self) -> bool:
        return bool(np.all(self.coefficients[1:] == 0.0))

    @property
    def sphere_radius(self) -> float:
        if not self.is_sphere:
            raise DomainError("Surface is not a sphere")
        return float(self.coefficients[0] / np.sqrt(4.0 * np.pi))

    def radius(self, directions: np.ndarray) -> np.ndarray:
        """r(x⁰) at unit directions of shape (..., 3)"""
        return real_harmonics_all(self.l_geom, directions) @ self.coefficients

    def radius_and_gradient(self, directions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """r and its tangential (surface) gradient ∇_S r"""
        values, grads = real_harmonics_all(self.l_geom, directions, gradient=True)
        return values @ self.coefficients, np.einsum("...kc,k->...c", grads, self.coefficients)

    def geometry(self, directions: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Points, outward unit normals and Jacobians relative to dS on S²"""
        directions = np.asarray(directions, dtype=float)
        r, grad = self.radius_and_gradient(directions)
        return surface_frame(directions, r, grad)

    def quadrature(self, degree: int) -> SurfaceQuadrature:
        sphere = build_sphere_quadrature(degree)
        points, normals, jacobians = self.geometry(sphere.nodes)
        return SurfaceQuadrature(
            points=points,
            normals=normals,
            weights=sphere.weights * jacobians,
            directions=sphere.nodes,
            jacobians=jacobians,
            degree=degree,
        )

    def volume(self, degree: Optional[int] = None) -> float:
        """|D| = (1/3) ∮ r³ dS, exact for degree ≥ 3 L_geom"""
        sphere = build_sphere_quadrature(degree or max(3 * self.l_geom, 2))
        return float(sphere.weights @ self.radius(sphere.nodes) ** 3 / 3.0)

    def admissibility_check(self, check_degree: Optional[int] = None) -> AdmissibilityReport:
        """Annulus and smoothness-proxy checks on a fine grid"""
        sphere = build_sphere_quadrature(check_degree or self.check_degree)
        r = self.radius(sphere.nodes)
        r_min, r_max = float(np.min(r)), float(np.max(r))
        proxy = float(smoothness_proxy(self.coefficients))

        messages = []
        annulus_ok = self.a0 <= r_min and r_max <= self.a1 and r_min > 0
        if not annulus_ok:
            messages.append(f"radius range [{r_min:.6g}, {r_max:.6g}] leaves annulus [{self.a0:.6g}, {self.a1:.6g}]")
        smoothness_ok = bool(proxy <= self.c0)
        if not smoothness_ok:
            messages.append(f"smoothness proxy {proxy:.6g} exceeds c0={self.c0:.6g}")

        return AdmissibilityReport(
            min_radius=r_min,
            max_radius=r_max,
            a0=self.a0,
            a1=self.a1,
            smoothness_proxy=proxy,
            c0=self.c0,
            annulus_ok=annulus_ok,
            smoothness_ok=smoothness_ok,
            messages=messages,
        )

    def perturbed(self, direction: np.ndarray, amplitude: float, validate: bool = True) -> "StarSurface":
        """Surface with coefficients shifted by amplitude × direction (zero-padded to the larger band)"""
        direction = np.asarray(direction, dtype=float)
        size = max(direction.size, self.coefficients.size)
        coefficients = np.zeros(size)
        coefficients[: self.coefficients.size] += self.coefficients
        coefficients[: direction.size] += amplitude * direction
        return StarSurface(coefficients, self.a0, self.a1, self.c0, validate=validate, check_degree=self.check_degree)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "a0": self.a0,
            "a1": self.a1,
            "c0": self.c0,
            "L_geom": self.l_geom,
            "coefficients": [list(t) for t in self.terms()],
        }

    def surface_hash(self) -> str:
        """Stable SHA-256 of the canonical JSON form"""
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def __repr__(self) -> str:
        return f"StarSurface(L_geom={self.l_geom}, a0={self.a0}, a1={self.a1}, c0={self.c0}, terms={len(self.terms())})"


def surface_frame(directions: np.ndarray, r: np.ndarray, grad: np.ndarray):
    """Point, normal and Jacobian of the radial graph from r and ∇_S r"""
    stretch = np.sqrt(r**2 + np.sum(grad**2, axis=-1))
    if np.any(r <= 0) or np.any(stretch <= 0):
        raise NumericalError("Degenerate radial function: non-positive radius")
    points = r[..., None] * directions
    normals = (r[..., None] * directions - grad) / stretch[..., None]
    jacobians = r * stretch
    return points, normals, jacobians


def eval_radius(surface: StarSurface, direction: np.ndarray) -> float:
    """r(x⁰) at one unit direction"""
    direction = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(direction) - 1.0) > 1e-10:
        raise DomainError("Direction must be a unit vector")
    return float(surface.radius(direction))


def surface_point_and_normal(surface: StarSurface, direction: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
    """Point r(x⁰)x⁰, outward unit normal and surface-measure factor at one direction"""
    direction = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(direction) - 1.0) > 1e-10:
        raise DomainError("Direction must be a unit vector")
    points, normals, jacobians = surface.geometry(direction[None, :])
    return points[0], normals[0], float(jacobians[0])


def admissibility_check(surface: StarSurface) -> AdmissibilityReport:
    return surface.admissibility_check()
