"""
Unit Tests for Indicator Inversion
Truncated inverse transform of an exact ball spectrum
"""

from dataclasses import replace

import numpy as np
import pytest

from src.core.errors import DomainError, ReconstructionFailedError
from src.geometry.generators import sphere
from src.reconstruction.indicator import indicator_at, indicator_field, invert_to_indicator, voxel_axis


@pytest.fixture(scope="module")
def unit_ball_grid(ball_spectrum):
    return ball_spectrum(6.0, 0.5)


@pytest.mark.unit
class TestIndicatorField:
    """(h/2π)³ Re Σ χ̃(λ) exp(iλ·x)"""

    def test_voxel_axis_centres(self):
        axis = voxel_axis(1.0, 4)
        assert np.allclose(axis, [-0.75, -0.25, 0.25, 0.75])

    def test_field_matches_pointwise_sum(self, unit_ball_grid):
        axis = voxel_axis(1.6, 6)
        field = indicator_field(unit_ball_grid, axis)
        points = np.array([[axis[0], axis[2], axis[5]], [axis[3], axis[3], axis[1]]])
        direct = indicator_at(unit_ball_grid, points)
        assert field[0, 2, 5] == pytest.approx(direct[0], abs=1e-12)
        assert field[3, 3, 1] == pytest.approx(direct[1], abs=1e-12)

    def test_cubic_symmetry(self, unit_ball_grid):
        field = indicator_field(unit_ball_grid, voxel_axis(1.6, 16))
        assert np.allclose(field, field.transpose(1, 0, 2), atol=1e-12)
        assert np.allclose(field, field.transpose(2, 1, 0), atol=1e-12)
        assert np.allclose(field, field[::-1, :, :], atol=1e-12)

    def test_inside_and_outside(self, unit_ball_grid):
        values = indicator_at(unit_ball_grid, np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.4], [0.0, 0.0, 1.5]]))
        assert values[0] > 0.8
        assert values[1] > 0.8
        assert abs(values[2]) < 0.2

    def test_failed_points_contribute_nothing(self, unit_ball_grid):
        damaged = replace(unit_ball_grid, values=unit_ball_grid.values.copy())
        damaged.values[5] = np.nan
        assert np.all(np.isfinite(indicator_at(damaged, np.zeros((1, 3)))))


@pytest.mark.unit
class TestInvertToIndicator:
    """Thresholding, volume and surface extraction"""

    def test_volume_threshold_matches_target(self, unit_ball_grid):
        result = invert_to_indicator(unit_ball_grid, voxels=32, threshold="volume")
        assert not result.failed
        assert result.volume_error < 0.05
        assert result.target_volume == pytest.approx(4.0 * np.pi / 3.0)

    def test_fixed_threshold(self, unit_ball_grid):
        result = invert_to_indicator(unit_ball_grid, voxels=32, threshold=0.5, truth=sphere(1.0))
        assert not result.failed
        assert result.volume_error < 0.15
        assert abs(np.mean(result.ray_radii) - 1.0) < 0.1
        assert result.hausdorff.distance < 0.25
        assert result.diffraction_bound == pytest.approx(np.pi / 6.0)

    def test_numeric_string_threshold(self, unit_ball_grid):
        result = invert_to_indicator(unit_ball_grid, voxels=16, threshold="0.5")
        assert result.level == 0.5

    def test_volume_decreases_with_level(self, unit_ball_grid):
        levels = np.linspace(0.05, 0.95, 19)
        volumes = [invert_to_indicator(unit_ball_grid, voxels=24, threshold=t).volume for t in levels]
        assert all(a >= b for a, b in zip(volumes, volumes[1:]))
        assert volumes[0] > volumes[-1]

    def test_summary_keys(self, unit_ball_grid):
        summary = invert_to_indicator(unit_ball_grid, voxels=16).summary()
        assert {"volume", "target_volume", "level", "mass", "failed", "mean_radius"} <= set(summary)

    def test_empty_interior_flagged(self, unit_ball_grid):
        faint = replace(unit_ball_grid, values=0.1 * unit_ball_grid.values)
        result = invert_to_indicator(faint, voxels=16, threshold=0.5)
        assert result.failed
        assert result.surface is None
        assert "Empty interior" in result.messages[0]

    def test_empty_interior_raises_on_request(self, unit_ball_grid):
        faint = replace(unit_ball_grid, values=0.1 * unit_ball_grid.values)
        with pytest.raises(ReconstructionFailedError):
            invert_to_indicator(faint, voxels=16, threshold=0.5, raise_on_failure=True)

    @pytest.mark.parametrize("threshold", ["half", 1.5, 0.0])
    def test_bad_threshold(self, unit_ball_grid, threshold):
        with pytest.raises(DomainError):
            invert_to_indicator(unit_ball_grid, voxels=8, threshold=threshold)

    def test_bad_box(self, unit_ball_grid):
        with pytest.raises(DomainError):
            invert_to_indicator(unit_ball_grid, box_half_width=0.0)
