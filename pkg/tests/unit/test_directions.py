"""
Unit Tests for Complex Direction Pairs
"""

import numpy as np
import pytest

from src.analysis.directions import make_direction_pair, minimal_imag_scale, orthonormal_frame
from src.core.errors import DomainError, InfeasiblePairError


def bilinear(v):
    return np.sum(v * v)


@pytest.mark.unit
class TestDirectionPairs:
    """θ, θ′ on the variety with θ′ − θ = λ"""

    @pytest.mark.parametrize(
        "lam",
        [np.array([0.5, 0.0, 0.0]), np.array([1.0, -1.0, 0.5]), np.array([0.0, 2.0, 2.0]), np.array([3.0, 1.0, -2.0])],
    )
    def test_pair_on_variety(self, lam):
        t = minimal_imag_scale(np.linalg.norm(lam))
        pair = make_direction_pair(lam, t)
        assert bilinear(pair.theta) == pytest.approx(1.0, abs=1e-12)
        assert bilinear(pair.theta_prime) == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(pair.theta_prime - pair.theta, lam, rtol=0.0, atol=1e-15)
        assert np.linalg.norm(pair.theta.imag) == pytest.approx(t, abs=1e-14)
        assert pair.lambda_norm == pytest.approx(np.linalg.norm(lam))

    def test_real_pair_below_two(self):
        pair = make_direction_pair(np.array([0.0, 0.0, 1.0]), 0.0)
        assert np.all(pair.theta.imag == 0)
        assert np.linalg.norm(pair.theta.real) == pytest.approx(1.0)

    def test_zero_lambda(self):
        pair = make_direction_pair(np.zeros(3), 0.0)
        assert np.array_equal(pair.theta, pair.theta_prime)

    def test_infeasible_pair(self):
        with pytest.raises(InfeasiblePairError):
            make_direction_pair(np.array([0.0, 0.0, 4.0]), 1.0)

    def test_negative_scale(self):
        with pytest.raises(DomainError):
            make_direction_pair(np.array([0.0, 0.0, 1.0]), -0.1)

    def test_lambda_shape(self):
        with pytest.raises(DomainError):
            make_direction_pair(np.array([1.0, 0.0]), 0.0)


@pytest.mark.unit
class TestImagScale:
    def test_zero_up_to_two(self):
        assert minimal_imag_scale(0.0) == 0.0
        assert minimal_imag_scale(2.0) == 0.0

    def test_margin_above_two(self):
        assert minimal_imag_scale(4.0) == pytest.approx(np.sqrt(3.0) + 0.1)
        assert minimal_imag_scale(4.0, margin=0.0) == pytest.approx(np.sqrt(3.0))


@pytest.mark.unit
class TestOrthonormalFrame:
    def test_frame_orthonormal_and_orthogonal_to_lambda(self):
        lam = np.array([0.3, -1.2, 2.0])
        eta, zeta = orthonormal_frame(lam)
        assert np.linalg.norm(eta) == pytest.approx(1.0)
        assert np.linalg.norm(zeta) == pytest.approx(1.0)
        assert abs(eta @ zeta) < 1e-15
        assert abs(eta @ lam) < 1e-14
        assert abs(zeta @ lam) < 1e-14

    def test_zero_lambda_uses_e3(self):
        eta, zeta = orthonormal_frame(np.zeros(3))
        assert abs(eta[2]) < 1e-15
        assert abs(zeta[2]) < 1e-15
