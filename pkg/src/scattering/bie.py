"""
Boundary Integral Solver
Direct combined-field equation (½I + K' − iηS) u_N = ∂_N u^i − iη u^i for the sound-soft obstacle
"""

import hashlib
import logging
from pathlib import Path
from typing import Optional

import joblib
import numpy as np
from joblib import Parallel, delayed
from scipy.linalg import lu_factor, lu_solve

from src.config import SolverConfig
from src.core.errors import NonConvergenceError, ResolutionError
from src.geometry.surface import StarSurface, SurfaceQuadrature, surface_frame
from src.numerics.quadrature import build_sphere_quadrature, gauss_legendre
from src.numerics.special_functions import harmonic_count, harmonic_degrees_orders, solid_harmonics
from src.scattering.mie import MIE_TOLERANCE, mie_un_values, sphere_quadrature
from src.scattering.trace import ScatteringSolutionTrace, TraceSet

logger = logging.getLogger(__name__)

# Relative mismatch between the polar-grid area and the primary-grid area that signals under-resolution
AREA_CHECK_TOLERANCE = 1e-6


def _rotation_y(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rotation_z(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


class BIESolver:
    """Nyström discretization on the parameter sphere, assembled and LU-factored once per surface.

    Each collocation row integrates over a polar grid centred at its own node, which turns the
    1/R kernel singularity into a smooth integrand. The density is interpolated onto the polar
    grid through its spherical-harmonic projection of degree `bie_degree`.
    """

    def __init__(self, surface: StarSurface, config: Optional[SolverConfig] = None, threads: int = 1):
        self.surface = surface
        self.config = config or SolverConfig()
        self.threads = threads
        self.degree = self.config.bie_degree
        if surface.l_geom > self.degree:
            raise ResolutionError(
                f"Surface band limit L_geom={surface.l_geom} exceeds solver degree {self.degree}",
                details={"l_geom": surface.l_geom, "bie_degree": self.degree},
            )

        self.primary = build_sphere_quadrature(2 * self.degree)
        self.quadrature = surface.quadrature(2 * self.degree)
        self._assemble()

    def _polar_grid(self):
        cfg = self.config
        polar, polar_w = gauss_legendre(cfg.polar_nodes, 0.0, np.pi)
        azimuth = 2.0 * np.pi * np.arange(cfg.azimuth_nodes) / cfg.azimuth_nodes
        sin_p = np.sin(polar)
        q0 = np.stack(
            [
                np.repeat(sin_p, azimuth.size) * np.tile(np.cos(azimuth), polar.size),
                np.repeat(sin_p, azimuth.size) * np.tile(np.sin(azimuth), polar.size),
                np.repeat(np.cos(polar), azimuth.size),
            ],
            axis=1,
        )
        weights = np.repeat(polar_w * sin_p, azimuth.size) * (2.0 * np.pi / azimuth.size)
        return q0, weights

    def _ring_rows(self, ring: int, q0: np.ndarray, q_weights: np.ndarray):
        """Coefficient-space rows for every collocation node on one latitude ring"""
        n_az = self.primary.azimuths.size
        cos_ring = self.primary.cos_polar[ring]
        rotation = _rotation_y(np.arccos(cos_ring))
        q_ring = q0 @ rotation.T

        y_ring = solid_harmonics(self.degree, q_ring)
        y_geom, g_geom = solid_harmonics(self.l_geom, q_ring, gradient=True)
        g_geom = g_geom - (self.geom_degrees[:, None] * y_geom[..., None]) * q_ring[:, None, :]

        k, eta = self.config.wavenumber, self.config.coupling
        rows = np.zeros((n_az, self.n_harm), dtype=complex)
        area_deviation = 0.0
        for a, phi in enumerate(self.primary.azimuths):
            node = ring * n_az + a
            phase = np.exp(1j * self.orders * phi)
            rot_z = _rotation_z(phi)
            coeffs = self.geom_coefficients * phase[: self.n_geom]

            directions = q_ring @ rot_z.T
            r = (y_geom @ coeffs).real
            grad = np.einsum("qkc,k->qc", g_geom, coeffs).real @ rot_z.T
            points, _, jac = surface_frame(directions, r, grad)

            x = self.quadrature.points[node]
            normal = self.quadrature.normals[node]
            diff = x - points
            dist = np.linalg.norm(diff, axis=1)
            wave = np.exp(1j * k * dist) / (4.0 * np.pi * dist)
            double = (diff @ normal) * (1j * k * dist - 1.0) * wave / dist**2
            g = (double - 1j * eta * wave) * jac * q_weights

            rows[a] = phase * (g @ y_ring)
            area = float(np.sum(jac * q_weights))
            area_deviation = max(area_deviation, abs(area - self.quadrature.area) / self.quadrature.area)
        return ring, rows, area_deviation

    def _assemble(self) -> None:
        logger.info(f"Assembling BIE system: degree {self.degree}, {self.quadrature.size} nodes")
        self.n_harm = harmonic_count(self.degree)
        self.l_geom = self.surface.l_geom
        self.n_geom = harmonic_count(self.l_geom)
        self.geom_degrees, _ = harmonic_degrees_orders(self.l_geom)
        _, self.orders = harmonic_degrees_orders(self.degree)
        self.geom_coefficients = self.surface.complex_coefficients

        y_primary = solid_harmonics(self.degree, self.primary.nodes)
        projection = (y_primary.conj() * self.primary.weights[:, None]).T

        q0, q_weights = self._polar_grid()
        n_rings = self.primary.cos_polar.size
        results = Parallel(n_jobs=self.threads, prefer="threads")(
            delayed(self._ring_rows)(ring, q0, q_weights) for ring in range(n_rings)
        )

        n_az = self.primary.azimuths.size
        coefficient_rows = np.zeros((self.quadrature.size, self.n_harm), dtype=complex)
        deviation = 0.0
        for ring, rows, ring_deviation in results:
            coefficient_rows[ring * n_az : (ring + 1) * n_az] = rows
            deviation = max(deviation, ring_deviation)

        self.area_deviation = deviation
        if deviation > AREA_CHECK_TOLERANCE:
            raise ResolutionError(
                f"Polar quadrature misses the surface area by {deviation:.2e}; raise polar_nodes/azimuth_nodes",
                details={"area_deviation": deviation},
            )

        self.matrix = 0.5 * np.eye(self.quadrature.size) + coefficient_rows @ projection
        self._lu = lu_factor(self.matrix)
        logger.info(f"BIE system factored (area check {deviation:.1e})")

    def right_hand_sides(self, directions: np.ndarray) -> np.ndarray:
        """∂_N u^i − iη u^i at the nodes for plane waves along each direction"""
        k, eta = self.config.wavenumber, self.config.coupling
        incident = np.exp(1j * k * self.quadrature.points @ directions.T)
        normal_derivative = 1j * k * (self.quadrature.normals @ directions.T) * incident
        return normal_derivative - 1j * eta * incident

    def solve_many(self, directions: np.ndarray) -> TraceSet:
        directions = np.atleast_2d(np.asarray(directions, dtype=float))
        rhs = self.right_hand_sides(directions)
        solution = lu_solve(self._lu, rhs)

        residual = np.linalg.norm(self.matrix @ solution - rhs, axis=0) / np.linalg.norm(rhs, axis=0)
        worst = int(np.argmax(residual))
        if residual[worst] > self.config.tolerance:
            raise NonConvergenceError(
                f"BIE residual {residual[worst]:.2e} above tolerance {self.config.tolerance:.1e}",
                details={"residual": float(residual[worst]), "direction": directions[worst].tolist()},
            )
        logger.debug(f"Solved {directions.shape[0]} incident directions, max residual {residual.max():.2e}")
        return TraceSet(
            quadrature=self.quadrature,
            directions=directions,
            direction_weights=np.full(directions.shape[0], 4.0 * np.pi / directions.shape[0]),
            un_values=solution,
            wavenumber=self.config.wavenumber,
            solver_tolerance=self.config.tolerance,
            surface_hash=self.surface.surface_hash(),
        )

    def solve(self, direction: np.ndarray) -> ScatteringSolutionTrace:
        return self.solve_many(np.asarray(direction, dtype=float)[None, :]).trace(0)


def _cache_path(cache_dir: str, surface: StarSurface, directions: np.ndarray, config: SolverConfig) -> Path:
    digest = hashlib.sha256()
    digest.update(surface.surface_hash().encode())
    digest.update(np.ascontiguousarray(directions, dtype=float).tobytes())
    digest.update(repr(config).encode())
    return Path(cache_dir) / f"traces-{digest.hexdigest()[:32]}.joblib"


def solve_traces(
    surface: StarSurface,
    directions: np.ndarray,
    config: Optional[SolverConfig] = None,
    weights: Optional[np.ndarray] = None,
    threads: int = 1,
) -> TraceSet:
    """u_N traces for many incident directions; series solution for spheres when enabled.

    Args:
        surface: Obstacle boundary
        directions: Incident directions, shape (n, 3)
        config: Solver settings
        weights: Quadrature weights of the direction grid, stored on the result
        threads: Workers for the assembly

    Returns:
        TraceSet on the solver's surface quadrature
    """
    config = config or SolverConfig()
    directions = np.atleast_2d(np.asarray(directions, dtype=float))

    cache_file = None
    if config.cache_dir:
        cache_file = _cache_path(config.cache_dir, surface, directions, config)
        if cache_file.exists():
            logger.info(f"Loading cached traces from {cache_file}")
            traces = joblib.load(cache_file)
            if weights is not None:
                traces.direction_weights = np.asarray(weights, dtype=float)
            return traces

    if config.use_mie_for_spheres and surface.is_sphere:
        radius = surface.sphere_radius
        quadrature = sphere_quadrature(radius, 2 * config.bie_degree)
        values = np.stack(
            [mie_un_values(radius, quadrature.normals, d, config.wavenumber) for d in directions], axis=1
        )
        traces = TraceSet(
            quadrature=quadrature,
            directions=directions,
            direction_weights=np.full(directions.shape[0], 4.0 * np.pi / directions.shape[0]),
            un_values=values,
            wavenumber=config.wavenumber,
            solver_tolerance=MIE_TOLERANCE,
            surface_hash=surface.surface_hash(),
        )
    else:
        traces = BIESolver(surface, config, threads=threads).solve_many(directions)

    if weights is not None:
        traces.direction_weights = np.asarray(weights, dtype=float)

    if cache_file is not None:
        cache_file.parent.mkdir(parents=True, exist_ok=True)
        joblib.dump(traces, cache_file)
        logger.info(f"Cached traces at {cache_file}")
    return traces


def bie_solve(surface: StarSurface, direction: np.ndarray, config: Optional[SolverConfig] = None):
    """Single-direction solve of the exterior Dirichlet problem"""
    return solve_traces(surface, np.asarray(direction, dtype=float)[None, :], config).trace(0)


def surface_trace_quadrature(surface: StarSurface, config: SolverConfig) -> SurfaceQuadrature:
    """The quadrature solve_traces will place its values on"""
    if config.use_mie_for_spheres and surface.is_sphere:
        return sphere_quadrature(surface.sphere_radius, 2 * config.bie_degree)
    return surface.quadrature(2 * config.bie_degree)
