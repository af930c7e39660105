"""
Indicator Inversion
Truncated inverse Fourier sum of χ̃ on a voxel box, thresholding and surface extraction
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Union

import numpy as np

from src.core.errors import DomainError, ReconstructionFailedError
from src.geometry.hausdorff import HausdorffResult, hausdorff_distance
from src.geometry.surface import StarSurface
from src.numerics.quadrature import build_sphere_quadrature
from src.numerics.special_functions import real_harmonics_all
from src.reconstruction.spectrum import SpectrumGrid

logger = logging.getLogger(__name__)

RAY_SAMPLES = 321
EXTRACTION_DEGREE = 8


@dataclass
class IndicatorResult:
    """Voxelized indicator estimate and its diagnostics"""

    values: np.ndarray
    axis: np.ndarray
    level: float
    threshold: Union[float, str]
    interior: np.ndarray
    volume: float
    mass: float
    target_volume: float
    diffraction_bound: float
    ray_directions: Optional[np.ndarray] = None
    ray_radii: Optional[np.ndarray] = None
    surface: Optional[StarSurface] = None
    hausdorff: Optional[HausdorffResult] = None
    failed: bool = False
    messages: list = field(default_factory=list)

    @property
    def voxel_volume(self) -> float:
        step = self.axis[1] - self.axis[0]
        return float(step**3)

    @property
    def volume_error(self) -> float:
        """|V_rec − V_true| / V_true against the λ = 0 volume"""
        return abs(self.volume - self.target_volume) / self.target_volume

    def summary(self) -> Dict[str, Any]:
        out = {
            "threshold": self.threshold,
            "level": self.level,
            "volume": self.volume,
            "target_volume": self.target_volume,
            "volume_error": self.volume_error,
            "mass": self.mass,
            "diffraction_bound": self.diffraction_bound,
            "failed": self.failed,
            "messages": list(self.messages),
        }
        if self.ray_radii is not None:
            out["mean_radius"] = float(np.mean(self.ray_radii))
        if self.hausdorff is not None:
            out["hausdorff"] = self.hausdorff.distance
            out["hausdorff_error_bound"] = self.hausdorff.error_bound
        return out


def voxel_axis(box_half_width: float, voxels: int) -> np.ndarray:
    """Voxel centres along one axis of [−B, B]"""
    step = 2.0 * box_half_width / voxels
    return -box_half_width + step * (np.arange(voxels) + 0.5)


def _coefficient_cube(grid: SpectrumGrid) -> np.ndarray:
    n = int(np.max(np.abs(grid.indices)))
    cube = np.zeros((2 * n + 1,) * 3, dtype=complex)
    values = np.where(np.isfinite(grid.values), grid.values, 0.0)
    i, j, k = (grid.indices + n).T
    cube[i, j, k] = values
    return cube


def indicator_field(grid: SpectrumGrid, axis: np.ndarray) -> np.ndarray:
    """(h³/(2π)³) Re Σ χ̃(λ) exp(iλ·x) on the tensor grid axis³, one axis at a time"""
    cube = _coefficient_cube(grid)
    n = (cube.shape[0] - 1) // 2
    phases = np.exp(1j * grid.spacing * np.outer(np.arange(-n, n + 1), axis))  # (2n+1, n_vox)
    total = np.einsum("ijk,ia,jb,kc->abc", cube, phases, phases, phases, optimize=True)
    return (grid.spacing / (2.0 * np.pi)) ** 3 * total.real


def indicator_at(grid: SpectrumGrid, points: np.ndarray, chunk: int = 512) -> np.ndarray:
    """The same truncated sum at arbitrary points"""
    points = np.atleast_2d(points)
    lambdas = grid.lambdas
    values = np.where(np.isfinite(grid.values), grid.values, 0.0)
    out = np.empty(points.shape[0])
    for start in range(0, points.shape[0], chunk):
        block = points[start : start + chunk]
        out[start : start + chunk] = (np.exp(1j * block @ lambdas.T) @ values).real
    return (grid.spacing / (2.0 * np.pi)) ** 3 * out


def _volume_level(values: np.ndarray, target_volume: float, voxel_volume: float) -> float:
    """Level whose super-level set has the target volume"""
    count = int(round(target_volume / voxel_volume))
    ordered = np.sort(values.ravel())[::-1]
    count = min(max(count, 1), ordered.size)
    return float(ordered[count - 1])


def _ray_radii(grid: SpectrumGrid, directions: np.ndarray, level: float, r_max: float) -> np.ndarray:
    """First crossing of the level along each ray from the origin, linearly interpolated"""
    r = np.linspace(0.0, r_max, RAY_SAMPLES)
    points = (directions[:, None, :] * r[None, :, None]).reshape(-1, 3)
    values = indicator_at(grid, points).reshape(directions.shape[0], r.size)
    radii = np.empty(directions.shape[0])
    for i, row in enumerate(values):
        below = np.nonzero(row < level)[0]
        if below.size == 0:
            radii[i] = r_max
        elif below[0] == 0:
            radii[i] = 0.0
        else:
            k = below[0]
            f0, f1 = row[k - 1], row[k]
            radii[i] = r[k - 1] + (f0 - level) / (f0 - f1) * (r[k] - r[k - 1])
    return radii


def extract_surface(
    grid: SpectrumGrid, level: float, r_max: float, degree: int = EXTRACTION_DEGREE
) -> tuple:
    """Star-shaped surface fitted to the ray radii by harmonic projection"""
    sphere = build_sphere_quadrature(2 * degree)
    radii = _ray_radii(grid, sphere.nodes, level, r_max)
    basis = real_harmonics_all(degree, sphere.nodes)
    coefficients = (basis * sphere.weights[:, None]).T @ radii
    positive = radii[radii > 0]
    a0 = 0.5 * float(positive.min()) if positive.size else 1e-3
    surface = StarSurface(coefficients, a0=a0, a1=max(2.0 * r_max, a0), c0=1e6, validate=False)
    return sphere.nodes, radii, surface


def invert_to_indicator(
    grid: SpectrumGrid,
    box_half_width: float = 1.6,
    voxels: int = 48,
    threshold: Union[float, str] = 0.5,
    truth: Optional[StarSurface] = None,
    raise_on_failure: bool = False,
) -> IndicatorResult:
    """Voxelize the truncated inverse transform and threshold it.

    Args:
        grid: Hermitian-symmetrized χ̃ lattice
        box_half_width: Half-width B of the box [−B, B]³
        voxels: Voxels per axis
        threshold: Fixed level in (0, 1), or "volume" for the level matching χ̃(0)
        truth: Surface for the Hausdorff comparison
        raise_on_failure: Raise ReconstructionFailedError instead of flagging the result

    Returns:
        IndicatorResult
    """
    if box_half_width <= 0 or voxels < 2:
        raise DomainError("Box half-width must be positive and voxels >= 2")
    axis = voxel_axis(box_half_width, voxels)
    field_values = indicator_field(grid, axis)
    voxel_volume = float((axis[1] - axis[0]) ** 3)
    target_volume = grid.volume
    mass = float(field_values.sum() * voxel_volume)

    if threshold == "volume":
        level = _volume_level(field_values, target_volume, voxel_volume)
    else:
        try:
            level = float(threshold)
        except ValueError as e:
            raise DomainError(f"Threshold {threshold!r} is neither a number nor \"volume\"") from e
        if not 0.0 < level < 1.0:
            raise DomainError(f"Threshold {level} must lie in (0, 1)")

    interior = field_values >= level
    result = IndicatorResult(
        values=field_values,
        axis=axis,
        level=level,
        threshold=threshold,
        interior=interior,
        volume=float(interior.sum() * voxel_volume),
        mass=mass,
        target_volume=target_volume,
        diffraction_bound=float(np.pi / grid.lambda_max),
    )
    logger.info(
        f"Indicator on {voxels}^3 voxels: level={level:.3f}, volume={result.volume:.4f} "
        f"(target {target_volume:.4f}), mass={mass:.4f}"
    )

    if not interior.any():
        result.failed = True
        result.messages.append("Empty interior after thresholding")
    elif indicator_at(grid, np.zeros(3))[0] < level:
        result.failed = True
        result.messages.append("Origin lies outside the thresholded set; ray extraction skipped")

    if result.failed:
        logger.error(f"Reconstruction failed: {'; '.join(result.messages)}")
        if raise_on_failure:
            raise ReconstructionFailedError("; ".join(result.messages), details=result.summary())
        return result

    result.ray_directions, result.ray_radii, result.surface = extract_surface(grid, level, box_half_width)
    if truth is not None:
        result.hausdorff = hausdorff_distance(result.surface, truth, symmetric=True, samples=2000)
        logger.info(f"Hausdorff distance to truth {result.hausdorff.distance:.4f}")
    return result
