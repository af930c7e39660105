"""
Unit Tests for Scattering Traces
"""

import numpy as np
import pytest

from src.analysis.directions import make_direction_pair
from src.core.errors import OffVarietyError
from src.scattering.mie import mie_far_field, mie_un_trace
from src.scattering.trace import ScatteringSolutionTrace, far_field_from_trace, green_function


@pytest.mark.unit
class TestTraceSet:
    """Far-field integrals from u_N"""

    def test_trace_view_matches_set(self, ball_traces):
        trace = ball_traces.trace(3)
        out = np.array([0.6, 0.0, 0.8])
        assert far_field_from_trace(trace, out) == pytest.approx(ball_traces.far_field(out)[0, 3], abs=1e-14)
        assert np.array_equal(trace.direction, ball_traces.directions[3])

    def test_far_field_matches_series(self, ball_traces):
        out = ball_traces.directions[:4]
        expected = mie_far_field(1.0, out[:, None, :], ball_traces.directions[None, :, :])
        assert np.max(np.abs(ball_traces.far_field(out) - expected)) < 1e-11

    def test_direction_weights_from_grid(self, ball_traces):
        assert ball_traces.direction_weights.sum() == pytest.approx(4.0 * np.pi, rel=1e-13)

    def test_complex_direction_far_field(self):
        """Test the trace integral continues to the variety like the series does"""
        pair = make_direction_pair(np.array([0.0, 0.0, 2.5]), 1.0)
        alpha = np.array([1.0, 0.0, 0.0])
        trace = mie_un_trace(1.0, alpha, degree=40)
        expected = complex(mie_far_field(1.0, pair.theta_prime, alpha))
        assert far_field_from_trace(trace, pair.theta_prime) == pytest.approx(expected, abs=1e-9)

    def test_off_variety_rejected(self):
        trace = mie_un_trace(1.0, np.array([0.0, 0.0, 1.0]), degree=10)
        with pytest.raises(OffVarietyError):
            far_field_from_trace(trace, np.array([1.0, 1j, 0.0]))

    def test_non_finite_trace_rejected(self):
        trace = mie_un_trace(1.0, np.array([0.0, 0.0, 1.0]), degree=4)
        with pytest.raises(ValueError):
            ScatteringSolutionTrace(
                quadrature=trace.quadrature, direction=trace.direction, un_values=np.full(trace.quadrature.size, np.nan)
            )


@pytest.mark.unit
class TestGreenFunction:
    def test_value_at_unit_distance(self):
        value = green_function(1.0, np.zeros(3), np.array([1.0, 0.0, 0.0]))
        assert value == pytest.approx(np.exp(1j) / (4.0 * np.pi))
