"""
Unit Tests for the Inversion Formula
Ball transform, volume transform, Green identity and the χ̃ estimate
"""

import numpy as np
import pytest

from src.analysis.directions import make_direction_pair, minimal_imag_scale
from src.core.errors import DivisionDegenerateError
from src.geometry.generators import ellipsoid_surface, random_perturbed_sphere
from src.reconstruction.density import DensitySolver, HerglotzDensity, target_trace
from src.reconstruction.inversion import (
    ball_transform,
    green_identity_check,
    inversion_formula_estimate,
    volume_transform,
)


def pair_for(lam):
    lam = np.asarray(lam, dtype=float)
    return make_direction_pair(lam, minimal_imag_scale(float(np.linalg.norm(lam))))


def identity_lambdas(seed, count=10, lambda_max=3.0):
    """Random directions with norms spread over (0, Λ_max]"""
    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((count, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    return directions * np.linspace(lambda_max / count, lambda_max, count)[:, None]


@pytest.mark.unit
class TestTransforms:
    """χ̃ of known bodies"""

    def test_ball_transform_at_zero(self):
        assert ball_transform(0.0, 2.0) == pytest.approx(32.0 * np.pi / 3.0)

    def test_ball_transform_small_lambda_limit(self):
        assert ball_transform(1e-3) == pytest.approx(4.0 * np.pi / 3.0, rel=1e-6)

    def test_volume_of_unit_ball(self, unit_sphere):
        assert volume_transform(unit_sphere, np.zeros(3)) == pytest.approx(4.0 * np.pi / 3.0, rel=1e-13)

    @pytest.mark.parametrize("lam", [[1.0, 0.0, 0.0], [0.5, -1.0, 2.0], [3.0, 3.0, 0.0]])
    def test_volume_transform_matches_ball(self, unit_sphere, lam):
        lam = np.asarray(lam)
        assert volume_transform(unit_sphere, lam) == pytest.approx(ball_transform(np.linalg.norm(lam)), abs=1e-12)

    def test_vectorized_over_lambdas(self, unit_sphere):
        lams = np.array([[0.0, 0.0, 1.0], [0.0, 2.0, 0.0]])
        values = volume_transform(unit_sphere, lams)
        assert values.shape == (2,)
        assert values[1] == pytest.approx(ball_transform(2.0), abs=1e-12)

    def test_hermitian_symmetry(self, perturbed_sphere):
        lam = np.array([0.7, -0.2, 1.1])
        assert volume_transform(perturbed_sphere, -lam) == pytest.approx(
            np.conj(volume_transform(perturbed_sphere, lam)), abs=1e-13
        )


@pytest.mark.unit
class TestGreenIdentity:
    """Surface integral against −(|λ|²/2) χ̃"""

    @pytest.mark.parametrize("lam_norm", [0.5, 1.5, 2.0, 3.0, 5.0])
    def test_ball(self, unit_sphere, lam_norm):
        report = green_identity_check(unit_sphere, pair_for([0.0, 0.0, lam_norm]))
        assert report.relative
        assert report.discrepancy < 1e-8
        assert report.rhs == pytest.approx(-0.5 * lam_norm**2 * ball_transform(lam_norm), abs=1e-10)

    @pytest.mark.parametrize("lam", [[1.0, 0.5, 0.0], [2.0, -2.0, 1.0]])
    def test_perturbed_sphere(self, perturbed_sphere, lam):
        assert green_identity_check(perturbed_sphere, pair_for(lam)).discrepancy < 1e-7

    def test_ellipsoid(self):
        surface = ellipsoid_surface([1.0, 0.9, 1.1], l_geom=10)
        assert green_identity_check(surface, pair_for([1.0, 1.0, 1.0])).discrepancy < 1e-7

    @pytest.mark.parametrize("seed", range(5))
    def test_random_perturbed_spheres(self, seed):
        """Test ten λ with |λ| ≤ 3 per seeded admissible surface"""
        surface = random_perturbed_sphere(1.0, 0.05, 4, seed=seed)
        for lam in identity_lambdas(seed):
            report = green_identity_check(surface, pair_for(lam))
            assert report.relative
            assert report.discrepancy <= 1e-7, f"|lambda|={np.linalg.norm(lam):.2f}"

    def test_ball_on_lambda_set(self, unit_sphere):
        for lam in identity_lambdas(99):
            assert green_identity_check(unit_sphere, pair_for(lam)).discrepancy <= 1e-7

    def test_zero_lambda_is_absolute(self, unit_sphere):
        report = green_identity_check(unit_sphere, make_direction_pair(np.zeros(3), 0.0))
        assert not report.relative
        assert report.discrepancy < 1e-12


@pytest.mark.unit
class TestEstimate:
    """χ̃ from ν and far-field values"""

    def make_density(self, lam, values, residual=1e-3):
        n = values.size
        return HerglotzDensity(
            directions=np.tile([0.0, 0.0, 1.0], (n, 1)),
            weights=np.full(n, 4.0 * np.pi / n),
            values=values,
            pair=pair_for(lam),
            epsilon=residual,
            residual=residual,
            beta=1.0,
            unattainable=False,
        )

    def test_scaling(self):
        """Test χ̃ = −4π Σ A ν w / (−|λ|²/2)"""
        density = self.make_density([0.0, 0.0, 2.0], np.ones(4, dtype=complex))
        far_field = np.full(4, 0.25 + 0.5j)
        estimate = inversion_formula_estimate(density, oracle_far_field=far_field)
        expected = -4.0 * np.pi * np.sum(far_field * density.weights) / -2.0
        assert estimate.value == pytest.approx(expected)
        assert estimate.path == "oracle"
        assert estimate.error_bound is None

    def test_both_paths(self):
        density = self.make_density([1.0, 0.0, 0.0], np.ones(2, dtype=complex))
        estimate = inversion_formula_estimate(
            density,
            oracle_far_field=np.array([1.0, 1.0]),
            data_far_field=np.array([1.0, 1.1]),
            data_bounds=np.array([1e-3, 1e-3]),
            path="data",
            phase_norm=2.0,
        )
        assert estimate.path == "data"
        assert estimate.value == estimate.data_value
        assert estimate.discrepancy == pytest.approx(abs(estimate.oracle_value - estimate.data_value))
        assert estimate.error_bound == pytest.approx(2.0 * 1e-3 / 0.5)
        assert estimate.continuation_bound > 0
        assert not estimate.warning

    def test_data_path_falls_back_to_oracle(self):
        density = self.make_density([1.0, 0.0, 0.0], np.ones(2, dtype=complex))
        estimate = inversion_formula_estimate(density, oracle_far_field=np.ones(2), path="data")
        assert estimate.path == "oracle"

    def test_zero_lambda_degenerate(self):
        density = self.make_density([0.0, 0.0, 0.0], np.ones(2, dtype=complex))
        with pytest.raises(DivisionDegenerateError):
            inversion_formula_estimate(density, oracle_far_field=np.ones(2))

    def test_ball_estimate_from_traces(self, ball_traces):
        """Test oracle path on the unit ball lands within the misfit bound"""
        lam = np.array([0.0, 0.0, 1.0])
        pair = pair_for(lam)
        density = DensitySolver(ball_traces).solve(target_trace(ball_traces.quadrature, pair.theta), 1e-4, pair)
        quad = ball_traces.quadrature
        phase = np.exp(-1j * quad.points @ pair.theta_prime)
        phase_norm = float(np.sqrt(quad.weights @ np.abs(phase) ** 2))
        estimate = inversion_formula_estimate(
            density, oracle_far_field=ball_traces.far_field(pair.theta_prime)[0], phase_norm=phase_norm
        )
        assert abs(estimate.value - ball_transform(1.0)) <= estimate.error_bound * (1 + 1e-6) + 1e-10
        assert estimate.value == pytest.approx(ball_transform(1.0), rel=1e-3)
