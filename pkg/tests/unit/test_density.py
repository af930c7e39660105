"""
Unit Tests for Herglotz Densities
Discrepancy-principle Tikhonov solves on the unit-ball traces
"""

import numpy as np
import pytest

from src.analysis.directions import make_direction_pair
from src.config import ReconstructionConfig
from src.core.errors import DomainError, OffVarietyError
from src.reconstruction.density import DensitySolver, solve_density, target_trace


@pytest.fixture(scope="module")
def pair():
    return make_direction_pair(np.array([0.0, 0.6, 0.8]), 0.0)


@pytest.fixture(scope="module")
def solver(ball_traces):
    return DensitySolver(ball_traces)


@pytest.fixture(scope="module")
def target(ball_traces, pair):
    return target_trace(ball_traces.quadrature, pair.theta)


@pytest.mark.unit
class TestTargetTrace:
    def test_matches_plane_wave_derivative(self, ball_traces):
        """Test ∂_N exp(iθ·s) on the unit sphere for real θ"""
        theta = np.array([0.0, 0.0, 1.0], dtype=complex)
        quad = ball_traces.quadrature
        expected = 1j * quad.normals[:, 2] * np.exp(1j * quad.points[:, 2])
        assert np.allclose(target_trace(quad, theta), expected, atol=1e-15)

    def test_off_variety(self, ball_traces):
        with pytest.raises(OffVarietyError):
            target_trace(ball_traces.quadrature, np.array([1.0, 1.0, 0.0], dtype=complex))


@pytest.mark.unit
class TestDensitySolver:
    """Largest penalty meeting the misfit tolerance"""

    def test_singular_values_sorted(self, solver):
        assert np.all(np.diff(solver.sigma) <= 0)
        assert solver.sigma[0] > 0

    def test_zero_density_when_target_small(self, solver, target, pair):
        b_norm = float(np.linalg.norm(solver.sqrt_surface * target))
        density = solver.solve(target, 1.01 * b_norm, pair)
        assert np.all(density.values == 0)
        assert density.residual == pytest.approx(b_norm)
        assert density.beta == np.inf

    @pytest.mark.parametrize("epsilon", [1e-1, 1e-3, 1e-5])
    def test_residual_within_epsilon(self, solver, target, pair, epsilon):
        density = solver.solve(target, epsilon, pair)
        assert not density.unattainable
        assert density.residual <= epsilon * (1 + 1e-8)
        assert density.residual >= 0.5 * epsilon

    def test_norm_grows_as_epsilon_shrinks(self, solver, target, pair):
        norms = [solver.solve(target, eps, pair).norm for eps in (1e-1, 1e-2, 1e-3, 1e-4)]
        assert all(a <= b for a, b in zip(norms, norms[1:]))

    def test_unattainable_flagged(self, solver, target, pair):
        density = solver.solve(target, 1e-20, pair)
        assert density.unattainable
        assert density.beta == ReconstructionConfig().beta_min
        assert density.residual > 1e-20

    def test_epsilon_must_be_positive(self, solver, target):
        with pytest.raises(DomainError):
            solver.solve(target, 0.0)

    def test_functional_form(self, ball_traces, target, pair, solver):
        direct = solve_density(ball_traces, target, 1e-3, pair)
        reused = solver.solve(target, 1e-3, pair)
        assert np.allclose(direct.values, reused.values)
        assert direct.pair is pair
