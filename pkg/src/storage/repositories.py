"""
Artifact Repositories
File-backed save/load for every artifact the lab writes, with bit-exact float round-trips
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Generic, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
import pandas as pd
import pydantic

from src.analysis.far_field_operator import FarFieldCoefficients
from src.core.errors import ValidationError
from src.geometry.surface import StarSurface
from src.numerics.quadrature import SphereQuadrature, build_sphere_quadrature, direction_set
from src.numerics.special_functions import harmonic_degrees_orders
from src.reconstruction.indicator import IndicatorResult
from src.reconstruction.spectrum import SpectrumGrid
from src.scattering.far_field import FarFieldMatrix
from src.stability.rate_fit import RateFit
from src.storage.schemas import SurfaceFile

logger = logging.getLogger(__name__)

T = TypeVar("T")

FLOAT_FORMAT = "%.17g"


def write_csv(frame: pd.DataFrame, path: Path, header: Optional[Dict[str, Any]] = None) -> None:
    """CSV with optional `# key=value` lines ahead of the column header"""
    with open(path, "w", encoding="utf-8", newline="") as f:
        for key, value in (header or {}).items():
            f.write(f"# {key}={value}\n")
        frame.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def read_csv(path: Path) -> Tuple[pd.DataFrame, Dict[str, str]]:
    header: Dict[str, str] = {}
    skip = 0
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if not line.startswith("# "):
                break
            key, _, value = line[2:].rstrip("\n").partition("=")
            header[key] = value
            skip += 1
    frame = pd.read_csv(path, skiprows=skip, float_precision="round_trip", keep_default_na=True)
    return frame, header


def write_json(payload: Dict[str, Any], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def read_json(path: Path) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


class BaseRepository(Generic[T]):
    """Base repository: one artifact per name under a root directory"""

    suffix = ".json"

    def __init__(self, root: str):
        self.root = Path(root)

    def path(self, name: str) -> Path:
        return self.root / f"{name}{self.suffix}"

    def exists(self, name: str) -> bool:
        return self.path(name).exists()

    def save(self, item: T, name: str) -> Path:
        """Write an artifact, creating the root directory when needed"""
        self.root.mkdir(parents=True, exist_ok=True)
        path = self.path(name)
        self._write(item, path)
        logger.info(f"Wrote {path}")
        return path

    def load(self, name: str) -> T:
        """Read an artifact back"""
        path = self.path(name)
        if not path.exists():
            raise ValidationError(f"Artifact not found: {path}")
        return self._read(path)

    def names(self) -> List[str]:
        """Names of stored artifacts"""
        if not self.root.exists():
            return []
        return sorted(p.name[: -len(self.suffix)] for p in self.root.glob(f"*{self.suffix}"))

    def _write(self, item: T, path: Path) -> None:
        raise NotImplementedError

    def _read(self, path: Path) -> T:
        raise NotImplementedError


class SurfaceRepository(BaseRepository[StarSurface]):
    """Surface JSON {a0, a1, c0, L_geom, coefficients: [(ℓ, m, value)]}"""

    def __init__(self, root: str, validate: bool = True):
        super().__init__(root)
        self.validate = validate

    def _write(self, item: StarSurface, path: Path) -> None:
        write_json(item.to_dict(), path)

    def _read(self, path: Path) -> StarSurface:
        try:
            surface_file = SurfaceFile.model_validate(read_json(path))
        except (pydantic.ValidationError, json.JSONDecodeError) as e:
            raise ValidationError(f"Invalid surface file {path}: {e}") from e
        return surface_file.to_surface(validate=self.validate)


def _grid_metadata(grid: SphereQuadrature) -> Dict[str, Any]:
    if grid.degree > 0:
        return {"degree": grid.degree, "size": grid.size}
    return {"degree": 0, "size": grid.size, "nodes": grid.nodes.tolist()}


def _grid_from_metadata(meta: Dict[str, Any]) -> SphereQuadrature:
    if meta["degree"] > 0:
        return build_sphere_quadrature(int(meta["degree"]))
    return direction_set(np.asarray(meta["nodes"], dtype=float))


class FarFieldRepository(BaseRepository[FarFieldMatrix]):
    """Metadata JSON (grids, surface hash, solver settings) plus CSV of (p, q, Re A, Im A)"""

    def _write(self, item: FarFieldMatrix, path: Path) -> None:
        metadata = {
            "out_grid": _grid_metadata(item.out_grid),
            "in_grid": _grid_metadata(item.in_grid),
            "metadata": item.metadata,
        }
        write_json(metadata, path)
        p, q = np.indices(item.values.shape)
        frame = pd.DataFrame(
            {"p": p.ravel(), "q": q.ravel(), "re": item.values.real.ravel(), "im": item.values.imag.ravel()}
        )
        write_csv(frame, path.with_suffix(".csv"))

    def _read(self, path: Path) -> FarFieldMatrix:
        metadata = read_json(path)
        out_grid = _grid_from_metadata(metadata["out_grid"])
        in_grid = _grid_from_metadata(metadata["in_grid"])
        frame, _ = read_csv(path.with_suffix(".csv"))
        values = np.zeros((out_grid.size, in_grid.size), dtype=complex)
        values[frame["p"].to_numpy(), frame["q"].to_numpy()] = frame["re"].to_numpy() + 1j * frame["im"].to_numpy()
        return FarFieldMatrix(out_grid=out_grid, in_grid=in_grid, values=values, metadata=metadata["metadata"])


class CoefficientRepository(BaseRepository[FarFieldCoefficients]):
    """Long-form CSV of A_ℓm(α) with per-row incident direction and tail diagnostics"""

    suffix = ".csv"

    def _write(self, item: FarFieldCoefficients, path: Path) -> None:
        degrees, orders = harmonic_degrees_orders(item.l_trunc)
        n_rows, n_coeffs = item.values.shape
        rows = np.repeat(np.arange(n_rows), n_coeffs)
        frame = pd.DataFrame(
            {
                "row": rows,
                "alpha_x": item.incident[rows, 0],
                "alpha_y": item.incident[rows, 1],
                "alpha_z": item.incident[rows, 2],
                "l": np.tile(degrees, n_rows),
                "m": np.tile(orders, n_rows),
                "re": item.values.real.ravel(),
                "im": item.values.imag.ravel(),
                "tail_bound": item.tail_bound[rows],
                "decay_slope": item.decay_slope[rows],
                "grid_energy": item.grid_energy[rows],
            }
        )
        write_csv(frame, path, header={"l_trunc": item.l_trunc})

    def _read(self, path: Path) -> FarFieldCoefficients:
        frame, header = read_csv(path)
        l_trunc = int(header["l_trunc"])
        n_coeffs = (l_trunc + 1) ** 2
        first = frame.groupby("row", sort=True).first()
        values = (frame["re"].to_numpy() + 1j * frame["im"].to_numpy()).reshape(-1, n_coeffs)
        return FarFieldCoefficients(
            values=values,
            l_trunc=l_trunc,
            incident=first[["alpha_x", "alpha_y", "alpha_z"]].to_numpy(),
            tail_bound=first["tail_bound"].to_numpy(),
            decay_slope=first["decay_slope"].to_numpy(),
            grid_energy=first["grid_energy"].to_numpy(),
        )


class SpectrumRepository(BaseRepository[SpectrumGrid]):
    """CSV of (λ₁, λ₂, λ₃, Re χ̃, Im χ̃, residual, bound) plus symmetry and failure columns"""

    suffix = ".csv"

    def _write(self, item: SpectrumGrid, path: Path) -> None:
        lambdas = item.lambdas
        frame = pd.DataFrame(
            {
                "lambda_1": lambdas[:, 0],
                "lambda_2": lambdas[:, 1],
                "lambda_3": lambdas[:, 2],
                "re": item.values.real,
                "im": item.values.imag,
                "residual": item.residuals,
                "bound": item.bounds,
                "symmetry_residual": item.symmetry_residuals,
                "raw_re": item.raw_values.real,
                "raw_im": item.raw_values.imag,
                "failure": [item.failures.get(i, "") for i in range(len(item.values))],
            }
        )
        write_csv(frame, path, header={"spacing": item.spacing, "lambda_max": item.lambda_max})

    def _read(self, path: Path) -> SpectrumGrid:
        frame, header = read_csv(path)
        spacing = float(header["spacing"])
        lambdas = frame[["lambda_1", "lambda_2", "lambda_3"]].to_numpy()
        failures = {
            i: str(message) for i, message in enumerate(frame["failure"].fillna("").tolist()) if str(message)
        }
        return SpectrumGrid(
            indices=np.rint(lambdas / spacing).astype(int),
            spacing=spacing,
            lambda_max=float(header["lambda_max"]),
            values=frame["re"].to_numpy() + 1j * frame["im"].to_numpy(),
            raw_values=frame["raw_re"].to_numpy() + 1j * frame["raw_im"].to_numpy(),
            residuals=frame["residual"].to_numpy(),
            bounds=frame["bound"].to_numpy(),
            symmetry_residuals=frame["symmetry_residual"].to_numpy(),
            failures=failures,
        )


@dataclass
class VoxelVolume:
    """Indicator field on the voxel grid with its header"""

    values: np.ndarray
    header: Dict[str, Any]

    @classmethod
    def from_indicator(cls, result: IndicatorResult) -> "VoxelVolume":
        half_width = float(result.axis[-1] + 0.5 * (result.axis[1] - result.axis[0]))
        header = {
            "dims": list(result.values.shape),
            "box": [[-half_width, half_width]] * 3,
            "threshold": result.threshold,
            "level": result.level,
            "dtype": "<f8",
            "order": "C",
        }
        return cls(values=result.values, header=header)

    @property
    def interior(self) -> np.ndarray:
        return self.values >= self.header["level"]


class VoxelRepository(BaseRepository[VoxelVolume]):
    """JSON header (dims, box, threshold) plus flat little-endian float64 payload"""

    def _write(self, item: VoxelVolume, path: Path) -> None:
        write_json(item.header, path)
        np.ascontiguousarray(item.values, dtype="<f8").tofile(path.with_suffix(".bin"))

    def _read(self, path: Path) -> VoxelVolume:
        header = read_json(path)
        values = np.fromfile(path.with_suffix(".bin"), dtype=header.get("dtype", "<f8"))
        return VoxelVolume(values=values.reshape(header["dims"]), header=header)


class TableRepository(BaseRepository[List[Dict[str, Any]]]):
    """Rows of scalars as CSV, columns in a fixed order"""

    suffix = ".csv"

    def __init__(self, root: str, columns: Optional[Sequence[str]] = None):
        super().__init__(root)
        self.columns = list(columns) if columns else None

    def _write(self, item: List[Dict[str, Any]], path: Path) -> None:
        frame = pd.DataFrame(item, columns=self.columns)
        write_csv(frame, path)

    def _read(self, path: Path) -> List[Dict[str, Any]]:
        frame, _ = read_csv(path)
        return frame.to_dict(orient="records")


class RateFitRepository(BaseRepository[RateFit]):
    def _write(self, item: RateFit, path: Path) -> None:
        write_json(item.to_dict(), path)

    def _read(self, path: Path) -> RateFit:
        payload = read_json(path)
        payload.pop("decades", None)
        return RateFit(**payload)
