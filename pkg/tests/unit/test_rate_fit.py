"""
Unit Tests for the Stability Rate Fit
"""

import numpy as np
import pytest

from src.core.errors import DomainError, InsufficientRecordsError
from src.stability.rate_fit import (
    FIT_DOMAIN_LIMIT,
    N_DOMAIN_LIMIT,
    RateFit,
    epsilon_of_delta,
    fit_rate,
    n_of_delta,
    rate_variable,
)


def synthetic_records(c1, c2, deltas, trustworthy=True):
    deltas = np.asarray(deltas, dtype=float)
    rhos = c1 * rate_variable(deltas) ** c2
    return [{"delta": d, "rho": r, "trustworthy": trustworthy} for d, r in zip(deltas, rhos)]


@pytest.mark.unit
class TestNOfDelta:
    """N(δ) = |ln δ| / ln|ln δ|"""

    def test_closed_form_point(self):
        """Test N(exp(−e²)) = e²/2"""
        assert n_of_delta(np.exp(-np.e**2)) == pytest.approx(np.e**2 / 2.0, rel=1e-14)

    def test_tabulated_value(self):
        assert n_of_delta(1e-8) == pytest.approx(6.3225, abs=2e-4)

    @pytest.mark.parametrize("delta", [0.0, N_DOMAIN_LIMIT, 0.5, -1e-3])
    def test_outside_domain(self, delta):
        with pytest.raises(DomainError):
            n_of_delta(delta)

    def test_epsilon_of_delta(self):
        expected = np.exp(-np.log(1.5) * n_of_delta(1e-6))
        assert epsilon_of_delta(1e-6, 1.0, 1.5) == pytest.approx(expected)
        assert epsilon_of_delta(1e-12, 1.0, 1.5) < epsilon_of_delta(1e-6, 1.0, 1.5)

    def test_epsilon_needs_ordered_radii(self):
        with pytest.raises(DomainError):
            epsilon_of_delta(1e-6, 1.5, 1.0)


@pytest.mark.unit
class TestFitRate:
    """ln ρ against ln(ln|ln δ|/|ln δ|)"""

    def test_recovers_synthetic_law(self):
        records = synthetic_records(2.0, 3.0, np.logspace(-12, -2, 12))
        fit = fit_rate(records)
        assert fit.c2_hat == pytest.approx(3.0, abs=1e-6)
        assert fit.c1_hat == pytest.approx(2.0, rel=1e-6)
        assert fit.residual < 1e-10
        assert not fit.low_confidence
        assert fit.n_records == 12
        assert fit.decades == pytest.approx(10.0)

    def test_untrustworthy_records_ignored(self):
        records = synthetic_records(1.0, 2.0, np.logspace(-10, -3, 6))
        records += synthetic_records(50.0, 0.1, np.logspace(-10, -3, 6), trustworthy=False)
        assert fit_rate(records).c2_hat == pytest.approx(2.0, abs=1e-6)

    def test_out_of_domain_records_noted(self):
        records = synthetic_records(1.0, 1.0, np.logspace(-10, -3, 6))
        records.append({"delta": 0.5, "rho": 0.1, "trustworthy": True})
        records.append({"delta": 1e-4, "rho": 0.0, "trustworthy": True})
        fit = fit_rate(records)
        assert fit.n_records == 6
        assert len(fit.notes) == 2
        assert fit.c2_hat == pytest.approx(1.0, abs=1e-6)

    def test_one_sided_rho_column(self):
        records = [
            {"delta": r["delta"], "rho_one_sided": r["rho"], "trustworthy": True}
            for r in synthetic_records(1.0, 2.5, np.logspace(-9, -2, 5))
        ]
        assert fit_rate(records).c2_hat == pytest.approx(2.5, abs=1e-6)

    def test_low_confidence_span(self):
        fit = fit_rate(synthetic_records(1.0, 1.0, np.logspace(-5, -4, 6)))
        assert fit.low_confidence
        assert "decades" in fit.notes[-1]

    def test_insufficient_records(self):
        with pytest.raises(InsufficientRecordsError) as excinfo:
            fit_rate(synthetic_records(1.0, 1.0, [1e-6, 1e-5, 1e-4]))
        assert excinfo.value.details["usable"] == 3
        assert excinfo.value.exit_code == 1

    def test_to_dict(self):
        fit = RateFit(1.0, 2.0, 0.0, 1e-8, 1e-2, 5, False)
        payload = fit.to_dict()
        assert payload["decades"] == pytest.approx(6.0)
        assert payload["notes"] == []

    def test_fit_domain_limit(self):
        assert FIT_DOMAIN_LIMIT == pytest.approx(1.0 / np.e)
