"""
Hausdorff Distance
sup_{x∈Γ1} inf_{y∈Γ2} |x − y| by dense radial sampling with shrinking-patch refinement
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from src.geometry.surface import StarSurface
from src.numerics.quadrature import fibonacci_directions

logger = logging.getLogger(__name__)

PATCH_SIZE = 5
INNER_STEPS = 14
OUTER_STEPS = 12
SHRINK = 0.5


@dataclass
class HausdorffResult:
    """Distance estimate with the sampling error bound"""

    distance: float
    error_bound: float
    forward: float
    backward: Optional[float]
    samples: int
    symmetric: bool


def _tangent_basis(directions: np.ndarray):
    """Two unit vectors orthogonal to each direction (smallest-component pivot)"""
    pivot = np.argmin(np.abs(directions), axis=-1)
    e = np.zeros_like(directions)
    np.put_along_axis(e, pivot[..., None], 1.0, axis=-1)
    t1 = e - np.sum(e * directions, axis=-1, keepdims=True) * directions
    t1 /= np.linalg.norm(t1, axis=-1, keepdims=True)
    t2 = np.cross(directions, t1)
    return t1, t2


def _patch(directions: np.ndarray, half_width: np.ndarray) -> np.ndarray:
    """PATCH_SIZE² directions around each centre, shape (n, PATCH_SIZE², 3)"""
    offsets = np.linspace(-1.0, 1.0, PATCH_SIZE)
    u, v = np.meshgrid(offsets, offsets, indexing="ij")
    u, v = u.ravel(), v.ravel()
    t1, t2 = _tangent_basis(directions)
    h = half_width[:, None, None]
    cand = directions[:, None, :] + h * (u[None, :, None] * t1[:, None, :] + v[None, :, None] * t2[:, None, :])
    return cand / np.linalg.norm(cand, axis=-1, keepdims=True)


def _refine_infimum(surface: StarSurface, points: np.ndarray, start: np.ndarray, half_width: float):
    """Local minimization of |x − y(d)| over directions d of `surface`, vectorized over points"""
    directions = start.copy()
    width = np.full(points.shape[0], half_width)
    best = np.linalg.norm(points - surface.radius(directions)[:, None] * directions, axis=-1)
    for _ in range(INNER_STEPS):
        cand = _patch(directions, width)
        y = surface.radius(cand)[..., None] * cand
        dist = np.linalg.norm(points[:, None, :] - y, axis=-1)
        idx = np.argmin(dist, axis=1)
        rows = np.arange(points.shape[0])
        improved = dist[rows, idx] <= best
        directions[improved] = cand[rows, idx][improved]
        best = np.minimum(best, dist[rows, idx])
        width *= SHRINK
    return best


def one_sided_hausdorff(
    gamma1: StarSurface,
    gamma2: StarSurface,
    samples: int = 4000,
    candidates: int = 6,
    seed: int = 0,
    random_starts: int = 4,
):
    """sup over Γ1 of the distance to Γ2, with an error bound from the sampling density.

    Returns:
        (distance, error_bound)
    """
    dirs = fibonacci_directions(samples)
    p1 = gamma1.radius(dirs)[:, None] * dirs
    p2 = gamma2.radius(dirs)[:, None] * dirs
    tree2 = cKDTree(p2)
    coarse, nearest = tree2.query(p1)

    spacing = np.sqrt(4.0 * np.pi / samples)
    # Covering radius of the Γ1 sample set bounds what the outer search can miss
    neighbour, _ = cKDTree(p1).query(p1, k=2)
    error_bound = float(np.max(neighbour[:, 1]))

    order = np.argsort(-coarse, kind="stable")[:candidates]
    rng = np.random.default_rng(seed)
    extra = rng.normal(size=(random_starts, 3))
    extra /= np.linalg.norm(extra, axis=1, keepdims=True)
    centres = np.concatenate([dirs[order], extra], axis=0)

    width = np.full(centres.shape[0], spacing)
    best_dirs = centres.copy()
    best_vals = np.full(centres.shape[0], -np.inf)
    for _ in range(OUTER_STEPS):
        cand = _patch(best_dirs, width)
        flat = cand.reshape(-1, 3)
        x = gamma1.radius(flat)[:, None] * flat
        _, idx = tree2.query(x)
        vals = _refine_infimum(gamma2, x, dirs[idx], spacing).reshape(cand.shape[:2])
        pick = np.argmax(vals, axis=1)
        rows = np.arange(cand.shape[0])
        improved = vals[rows, pick] >= best_vals
        best_dirs[improved] = cand[rows, pick][improved]
        best_vals = np.maximum(best_vals, vals[rows, pick])
        width *= SHRINK

    distance = float(max(np.max(best_vals), 0.0))
    logger.debug(f"One-sided Hausdorff {distance:.3e} (coarse {float(coarse.max()):.3e}, bound {error_bound:.2e})")
    return distance, error_bound


def hausdorff_distance(
    gamma1: StarSurface,
    gamma2: StarSurface,
    symmetric: bool = False,
    samples: int = 4000,
    seed: int = 0,
) -> HausdorffResult:
    """Hausdorff distance between two star-shaped surfaces.

    Args:
        gamma1: Surface the supremum runs over
        gamma2: Surface the infimum runs over
        symmetric: Return the max of both one-sided distances
        samples: Radial samples per surface
        seed: Only moves the extra random start points of the refinement

    Returns:
        HausdorffResult with distance and error bound
    """
    forward, bound = one_sided_hausdorff(gamma1, gamma2, samples=samples, seed=seed)
    backward = None
    distance = forward
    if symmetric:
        backward, bound2 = one_sided_hausdorff(gamma2, gamma1, samples=samples, seed=seed)
        distance = max(forward, backward)
        bound = max(bound, bound2)
    return HausdorffResult(
        distance=distance,
        error_bound=bound,
        forward=forward,
        backward=backward,
        samples=samples,
        symmetric=symmetric,
    )
