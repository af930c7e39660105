"""
Integration Tests for the Command-Line Interface
Subcommands end to end through cli_main, with exit codes and written artifacts
"""

import json

import numpy as np
import pandas as pd
import pytest

from src.main import cli_main

UNIT_SPHERE = {"a0": 0.5, "a1": 2.0, "c0": 10.0, "L_geom": 0, "coefficients": [[0, 0, float(np.sqrt(4 * np.pi))]]}

FAST_CONFIG = {
    "solver": {"use_mie_for_spheres": True},
    "far_field": {"grid_degree": 20, "l_trunc": 10, "in_grid_degree": 11},
    "reconstruction": {"voxels": 16},
}


def write_json(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture
def lab_files(tmp_path):
    return {
        "surface": write_json(tmp_path / "sphere.json", UNIT_SPHERE),
        "config": write_json(tmp_path / "config.json", FAST_CONFIG),
    }


@pytest.mark.integration
class TestExitCodes:
    """0 on success, 1 on invalid input, 2 on numerical failure"""

    def test_unknown_flag(self, tmp_out_dir):
        assert cli_main(["example1", "--bogus", "--out", str(tmp_out_dir)]) == 1

    def test_missing_subcommand(self):
        assert cli_main([]) == 1

    def test_missing_file(self, tmp_out_dir):
        assert cli_main(["forward", str(tmp_out_dir / "absent.json"), "--out", str(tmp_out_dir)]) == 1

    def test_inadmissible_surface(self, tmp_path, tmp_out_dir, capsys):
        big = {**UNIT_SPHERE, "coefficients": [[0, 0, 12.0]]}
        path = write_json(tmp_path / "big.json", big)
        assert cli_main(["forward", path, "--out", str(tmp_out_dir)]) == 1
        report = json.loads(capsys.readouterr().out)
        assert report["report"]["passed"] is False

    def test_bad_config_key(self, tmp_path, lab_files, tmp_out_dir):
        config = write_json(tmp_path / "bad.json", {"solver": {"speed": 2}})
        assert cli_main(["forward", lab_files["surface"], "--config", config, "--out", str(tmp_out_dir)]) == 1


@pytest.mark.integration
class TestForwardAndContinue:
    def test_forward_then_continue(self, lab_files, tmp_out_dir):
        common = ["--config", lab_files["config"], "--out", str(tmp_out_dir)]
        assert cli_main(["forward", lab_files["surface"], *common]) == 0
        assert (tmp_out_dir / "far_field.json").exists()
        assert (tmp_out_dir / "far_field.csv").exists()
        assert (tmp_out_dir / "coefficients.csv").exists()

        far_field = str(tmp_out_dir / "far_field.json")
        assert cli_main(["continue", far_field, "--lambda", "0", "0", "1", *common]) == 0
        continued = pd.read_csv(tmp_out_dir / "continued.csv")
        assert len(continued) == 72
        assert np.all(np.isfinite(continued["re"]))

    def test_continue_rejects_infeasible_pair(self, lab_files, tmp_out_dir):
        common = ["--config", lab_files["config"], "--out", str(tmp_out_dir)]
        assert cli_main(["forward", lab_files["surface"], *common]) == 0
        far_field = str(tmp_out_dir / "far_field.json")
        assert cli_main(["continue", far_field, "--lambda", "0", "0", "3", "--t", "0.1", *common]) == 1


@pytest.mark.integration
@pytest.mark.slow
class TestReconstruct:
    def test_ball_reconstruction(self, tmp_path, lab_files, tmp_out_dir):
        scan = write_json(tmp_path / "scan.json", {"lambda_max": 1.0, "lambda_spacing": 0.5, "epsilon": 1e-4})
        argv = ["reconstruct", lab_files["surface"], "--scan", scan, "--config", lab_files["config"]]
        assert cli_main([*argv, "--out", str(tmp_out_dir)]) == 0
        summary = json.loads((tmp_out_dir / "reconstruction.json").read_text())
        assert summary["failures"] == 0
        assert (tmp_out_dir / "spectrum.csv").exists()
        assert (tmp_out_dir / "voxels.bin").stat().st_size == 16**3 * 8

    def test_spectrum_table_is_deterministic(self, tmp_path, lab_files):
        scan = write_json(tmp_path / "scan.json", {"lambda_max": 1.0, "lambda_spacing": 0.5, "epsilon": 1e-4})
        argv = ["reconstruct", lab_files["surface"], "--scan", scan, "--config", lab_files["config"]]
        first, second = tmp_path / "a", tmp_path / "b"
        assert cli_main([*argv, "--out", str(first)]) == 0
        assert cli_main([*argv, "--out", str(second)]) == 0
        assert (first / "spectrum.csv").read_bytes() == (second / "spectrum.csv").read_bytes()


@pytest.mark.integration
class TestStability:
    """Synthetic rate law through the records and fit writers"""

    def test_synthetic_law_recovered(self, tmp_path, tmp_out_dir):
        spec = {"synthetic": {"c1": 1.5, "c2": 2.0, "deltas": [1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-3]}}
        path = write_json(tmp_path / "spec.json", spec)
        assert cli_main(["stability", path, "--out", str(tmp_out_dir)]) == 0

        records = pd.read_csv(tmp_out_dir / "records.csv")
        assert len(records) == 6
        assert "c2_hat" in records.columns
        fit = json.loads((tmp_out_dir / "ratefit.json").read_text())
        assert fit["c2_hat"] == pytest.approx(2.0, rel=1e-9)
        assert fit["c1_hat"] == pytest.approx(1.5, rel=1e-9)
        assert fit["low_confidence"] is False

    @pytest.mark.slow
    def test_measured_records_are_deterministic(self, tmp_path, lab_files):
        spec = {
            "base_surface": UNIT_SPHERE,
            "perturbation": {"coefficients": [[0, 0, 1.0]]},
            "amplitudes": [0.2, 0.1, 0.05, 0.025, 0.0125],
            "hausdorff_samples": 500,
        }
        path = write_json(tmp_path / "spec.json", spec)
        first, second = tmp_path / "a", tmp_path / "b"
        assert cli_main(["stability", path, "--config", lab_files["config"], "--out", str(first)]) == 0
        assert cli_main(["stability", path, "--config", lab_files["config"], "--out", str(second)]) == 0
        assert len(pd.read_csv(first / "records.csv")) == 5
        assert (first / "records.csv").read_bytes() == (second / "records.csv").read_bytes()

    def test_too_few_records(self, tmp_path, tmp_out_dir):
        spec = {"synthetic": {"c1": 1.0, "c2": 1.0, "deltas": [1e-8, 1e-4]}}
        path = write_json(tmp_path / "spec.json", spec)
        assert cli_main(["stability", path, "--out", str(tmp_out_dir)]) == 1
        assert (tmp_out_dir / "records.csv").exists()
        assert not (tmp_out_dir / "ratefit.json").exists()


@pytest.mark.integration
class TestExample1:
    def test_writes_table(self, tmp_out_dir):
        assert cli_main(["example1", "--degrees", "5", "10", "--out", str(tmp_out_dir)]) == 0
        table = pd.read_csv(tmp_out_dir / "example1.csv")
        assert len(table) == 2

    def test_deterministic_output(self, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        assert cli_main(["example1", "--out", str(first)]) == 0
        assert cli_main(["example1", "--out", str(second)]) == 0
        assert (first / "example1.csv").read_bytes() == (second / "example1.csv").read_bytes()


@pytest.mark.integration
@pytest.mark.slow
class TestSelfCheck:
    def test_check_passes(self, tmp_out_dir, capsys):
        assert cli_main(["check", "--out", str(tmp_out_dir)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["passed"] is True
        assert (tmp_out_dir / "check_identity.csv").exists()
