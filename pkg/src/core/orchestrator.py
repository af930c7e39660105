"""
Lab Orchestrator
Coordinates the numerical modules behind each command-line subcommand
"""

import json
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pydantic

from src.analysis.directions import make_direction_pair, minimal_imag_scale
from src.analysis.far_field_operator import compute_coefficients, continue_far_field_all
from src.config import Config
from src.core.errors import ConfigError, NumericalError, ReconstructionFailedError, ValidationError
from src.geometry.generators import perturbed_sphere, sphere
from src.numerics.quadrature import build_sphere_quadrature
from src.reconstruction.indicator import invert_to_indicator
from src.reconstruction.inversion import ball_transform, green_identity_check
from src.reconstruction.spectrum import epsilon_sweep, spectrum_scan
from src.scattering.bie import solve_traces
from src.scattering.far_field import assemble_far_field_matrix
from src.scattering.mie import mie_far_field_matrix
from src.stability.counterexample import example1_demo, rows_as_dicts
from src.stability.experiments import RECORD_COLUMNS, StabilityRecord, run_pair_family
from src.stability.rate_fit import fit_rate, rate_variable
from src.storage.repositories import (
    CoefficientRepository,
    FarFieldRepository,
    RateFitRepository,
    SpectrumRepository,
    SurfaceRepository,
    TableRepository,
    VoxelRepository,
    VoxelVolume,
    read_json,
    write_json,
)
from src.storage.schemas import ExperimentSpec, ScanConfig

logger = logging.getLogger(__name__)

CHECK_LAMBDAS = [
    (0.0, 0.0, 0.0),
    (1.5, 0.0, 0.0),
    (0.3, -1.1, 0.7),
    (1.2, 1.2, 1.2),
    (-2.5, 0.4, 1.0),
]
IDENTITY_TOLERANCE = 1e-7
MIE_AGREEMENT_TOLERANCE = 1e-6


def _load_payload(path: str) -> Dict[str, Any]:
    """JSON or TOML file as a dict"""
    file_path = Path(path)
    if not file_path.exists():
        raise ValidationError(f"File not found: {path}")
    try:
        if file_path.suffix.lower() == ".toml":
            with open(file_path, "rb") as f:
                return tomllib.load(f)
        return read_json(file_path)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot parse {path}: {e}") from e


def _validated(model, path: str):
    """Schema-checked payload; schema violations are validation errors"""
    try:
        return model.model_validate(_load_payload(path))
    except pydantic.ValidationError as e:
        raise ConfigError(f"Invalid {model.__name__} in {path}: {e}") from e


def _split_path(path: str):
    """Repository root and artifact name of an existing file"""
    file_path = Path(path)
    return str(file_path.parent), file_path.stem


class LabOrchestrator:
    """Runs one lab command end to end and writes its artifacts"""

    def __init__(self, config: Config, out_dir: str = "out"):
        self.config = config
        self.out_dir = Path(out_dir)
        self.threads = config.runtime.threads
        self.seed = config.runtime.seed

    # Shared stages

    def _initialize_grids(self):
        ff = self.config.far_field
        return build_sphere_quadrature(ff.grid_degree), build_sphere_quadrature(ff.in_grid_degree)

    def _load_surface(self, path: str):
        root, name = _split_path(path)
        surface = SurfaceRepository(root).load(name)
        logger.info(f"Loaded {surface!r} from {path}")
        return surface

    # Commands

    def forward(self, surface_path: str) -> Dict[str, Any]:
        """Surface file → far-field matrix and harmonic coefficients"""
        surface = self._load_surface(surface_path)
        out_grid, in_grid = self._initialize_grids()
        matrix = assemble_far_field_matrix(surface, out_grid, in_grid, self.config.solver, threads=self.threads)
        coefficients = compute_coefficients(matrix, self.config.far_field.l_trunc)

        far_field_path = FarFieldRepository(self.out_dir).save(matrix, "far_field")
        CoefficientRepository(self.out_dir).save(coefficients, "coefficients")
        return {
            "command": "forward",
            "far_field": str(far_field_path),
            "shape": list(matrix.shape),
            "method": matrix.metadata["method"],
            "surface_hash": matrix.metadata["surface_hash"],
        }

    def continue_far_field(self, far_field_path: str, lam: Sequence[float], t: float) -> Dict[str, Any]:
        """Far-field file + (λ, t) → continued values A(θ′, α) with tail bounds"""
        root, name = _split_path(far_field_path)
        matrix = FarFieldRepository(root).load(name)
        coefficients = compute_coefficients(matrix, self.config.far_field.l_trunc)
        pair = make_direction_pair(np.asarray(lam, dtype=float), t)
        values, bounds = continue_far_field_all(coefficients, pair.theta_prime)

        rows = [
            {
                "alpha_x": a[0],
                "alpha_y": a[1],
                "alpha_z": a[2],
                "re": v.real,
                "im": v.imag,
                "bound": b,
                "warning": bool(b > abs(v)),
            }
            for a, v, b in zip(coefficients.incident, values, bounds)
        ]
        path = TableRepository(self.out_dir).save(rows, "continued")
        warnings = sum(r["warning"] for r in rows)
        if warnings:
            logger.warning(f"{warnings} of {len(rows)} continued values have tail bounds above their modulus")
        return {"command": "continue", "values": str(path), "count": len(rows), "warnings": warnings}

    def reconstruct(self, surface_path: str, scan_path: Optional[str] = None) -> Dict[str, Any]:
        """Surface file + scan config → spectrum CSV, voxel file and reconstruction summary"""
        surface = self._load_surface(surface_path)
        scan = _validated(ScanConfig, scan_path) if scan_path else None
        if scan is not None:
            self.config.apply({"reconstruction": scan.reconstruction_overrides()})
        recon = self.config.reconstruction

        out_grid, in_grid = self._initialize_grids()
        traces = solve_traces(surface, in_grid.nodes, self.config.solver, weights=in_grid.weights, threads=self.threads)
        coefficients = None
        if recon.path == "data":
            matrix = assemble_far_field_matrix(surface, out_grid, in_grid, self.config.solver, traces=traces)
            coefficients = compute_coefficients(matrix, self.config.far_field.l_trunc)

        grid = spectrum_scan(
            traces,
            surface,
            recon,
            coefficients=coefficients,
            threads=self.threads,
            sphere_degree=self.config.quadrature.sphere_degree,
        )
        spectrum_path = SpectrumRepository(self.out_dir).save(grid, "spectrum")

        indicator = invert_to_indicator(
            grid,
            box_half_width=recon.box_half_width,
            voxels=recon.voxels,
            threshold=recon.threshold,
            truth=surface,
        )
        VoxelRepository(self.out_dir).save(VoxelVolume.from_indicator(indicator), "voxels")
        summary = {"command": "reconstruct", "spectrum": str(spectrum_path), "failures": len(grid.failures)}
        summary.update(indicator.summary())

        if scan is not None and scan.epsilon_sweep is not None:
            lam = np.asarray(scan.epsilon_sweep.lam, dtype=float)
            reference = ball_transform(float(np.linalg.norm(lam)), surface.sphere_radius) if surface.is_sphere else None
            rows = epsilon_sweep(traces, lam, scan.epsilon_sweep.epsilons, recon, reference=reference)
            summary["epsilon_sweep"] = str(TableRepository(self.out_dir).save(rows, "epsilon_sweep"))

        write_json(summary, self.out_dir / "reconstruction.json")
        if indicator.failed:
            raise ReconstructionFailedError("; ".join(indicator.messages), details=summary)
        return summary

    def stability(self, spec_path: str) -> Dict[str, Any]:
        """Experiment spec → records CSV and rate-fit JSON"""
        spec = _validated(ExperimentSpec, spec_path)
        if spec.synthetic is not None:
            records = self._synthetic_records(spec)
        else:
            self._apply_experiment_overrides(spec)
            base = spec.base_surface.to_surface(check_degree=self.config.geometry.check_degree)
            experiment = run_pair_family(
                base,
                spec.perturbation.vector(),
                spec.amplitudes,
                self.config,
                threads=self.threads,
                seed=self.seed,
                samples=spec.hausdorff_samples,
                near_field=spec.near_field,
            )
            records = experiment.records

        rows = [r.to_dict() for r in records]
        stab = self.config.stability
        try:
            fit = fit_rate(rows, min_records=stab.min_records, min_decades=stab.min_decades)
        except ValidationError:
            TableRepository(self.out_dir, RECORD_COLUMNS).save(rows, "records")
            raise

        for row in rows:
            row["c1_hat"] = fit.c1_hat
            row["c2_hat"] = fit.c2_hat
        records_path = TableRepository(self.out_dir, RECORD_COLUMNS + ["c1_hat", "c2_hat"]).save(rows, "records")
        fit_path = RateFitRepository(self.out_dir).save(fit, "ratefit")
        return {
            "command": "stability",
            "records": str(records_path),
            "ratefit": str(fit_path),
            "c1_hat": fit.c1_hat,
            "c2_hat": fit.c2_hat,
            "low_confidence": fit.low_confidence,
        }

    def example1(self, degrees: Sequence[int], a2: float, b: float) -> Dict[str, Any]:
        """ℓ-list → boundary norm, annulus norm and scaled product per degree"""
        rows = rows_as_dicts(example1_demo(degrees, a2, b))
        path = TableRepository(self.out_dir).save(rows, "example1")
        return {"command": "example1", "report": str(path), "degrees": list(degrees)}

    def check(self) -> Dict[str, Any]:
        """Exact volume identity on two surfaces and BIE-versus-series agreement on the unit sphere"""
        degree = self.config.quadrature.sphere_degree
        radial = self.config.reconstruction.radial_nodes
        surfaces = {"ball": sphere(1.0), "perturbed": perturbed_sphere(1.0, 2, 0, 0.1)}
        identity: List[Dict[str, Any]] = []
        for label, surface in surfaces.items():
            for lam in CHECK_LAMBDAS:
                lam = np.asarray(lam)
                norm = float(np.linalg.norm(lam))
                pair = make_direction_pair(lam, minimal_imag_scale(norm, self.config.reconstruction.t_margin))
                report = green_identity_check(surface, pair, degree, radial)
                identity.append({"surface": label, "lambda_norm": norm, "discrepancy": report.discrepancy})
        worst_identity = max(row["discrepancy"] for row in identity)

        out_grid = build_sphere_quadrature(8)
        in_grid = build_sphere_quadrature(3)
        solver = replace(self.config.solver, use_mie_for_spheres=False)
        bie = assemble_far_field_matrix(surfaces["ball"], out_grid, in_grid, solver, threads=self.threads)
        series = mie_far_field_matrix(1.0, out_grid.nodes, in_grid.nodes, solver.wavenumber)
        mie_error = float(np.max(np.abs(bie.values - series)) / np.max(np.abs(series)))

        summary = {
            "command": "check",
            "identity_max_discrepancy": worst_identity,
            "mie_relative_error": mie_error,
            "passed": bool(worst_identity <= IDENTITY_TOLERANCE and mie_error <= MIE_AGREEMENT_TOLERANCE),
        }
        TableRepository(self.out_dir).save(identity, "check_identity")
        logger.info(f"Self-test: identity {worst_identity:.2e}, series agreement {mie_error:.2e}")
        if not summary["passed"]:
            raise NumericalError("Self-test failed", details=summary)
        return summary

    # Helpers

    def _apply_experiment_overrides(self, spec: ExperimentSpec) -> None:
        far_field = {}
        if spec.grid_degree is not None:
            far_field["grid_degree"] = spec.grid_degree
        if spec.in_grid_degree is not None:
            far_field["in_grid_degree"] = spec.in_grid_degree
        overrides: Dict[str, Dict[str, Any]] = {"far_field": far_field}
        if spec.solver_tolerance is not None:
            overrides["solver"] = {"tolerance": spec.solver_tolerance}
        self.config.apply(overrides)

    def _synthetic_records(self, spec: ExperimentSpec) -> List[StabilityRecord]:
        law = spec.synthetic
        deltas = np.asarray(law.deltas, dtype=float)
        rhos = law.c1 * rate_variable(deltas) ** law.c2
        logger.info(f"Synthetic law c1={law.c1}, c2={law.c2} over {deltas.size} deltas")
        return [
            StabilityRecord(
                index=i,
                amplitude=float(d),
                delta=float(d),
                rho_one_sided=float(r),
                rho_symmetric=float(r),
                hausdorff_bound=0.0,
                solver_tolerance=0.0,
                trustworthy=True,
                status="synthetic",
            )
            for i, (d, r) in enumerate(zip(deltas, rhos))
        ]
