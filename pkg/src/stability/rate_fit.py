"""
Stability Rate Fit
N(δ), the implied near-field smallness, and the regression of ρ against ln|ln δ|/|ln δ|
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Sequence, Union

import numpy as np
from sklearn.linear_model import LinearRegression

from src.core.errors import DomainError, InsufficientRecordsError

logger = logging.getLogger(__name__)

# N(δ) needs ln|ln δ| > 1, i.e. δ < exp(−e)
N_DOMAIN_LIMIT = float(np.exp(-np.e))
# The rate transform needs ln|ln δ| > 0, i.e. δ < 1/e
FIT_DOMAIN_LIMIT = float(np.exp(-1.0))


@dataclass
class RateFit:
    """ρ ≈ c1 (ln|ln δ|/|ln δ|)^c2 fitted on trustworthy records"""

    c1_hat: float
    c2_hat: float
    residual: float
    delta_min: float
    delta_max: float
    n_records: int
    low_confidence: bool
    notes: List[str] = field(default_factory=list)

    @property
    def decades(self) -> float:
        return float(np.log10(self.delta_max / self.delta_min))

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["decades"] = self.decades
        return out


def n_of_delta(delta: float) -> float:
    """N(δ) = |ln δ| / ln|ln δ| for 0 < δ < exp(−e)"""
    if not 0.0 < delta < N_DOMAIN_LIMIT:
        raise DomainError(f"delta={delta} outside (0, exp(-e))")
    log_abs = abs(np.log(delta))
    return float(log_abs / np.log(log_abs))


def epsilon_of_delta(delta: float, a1: float, a2: float) -> float:
    """exp(−ln(a2/a1) N(δ)): the near-field smallness on |x| ≥ a2 a far-field misfit δ implies"""
    if a2 <= a1 or a1 <= 0:
        raise DomainError(f"Need 0 < a1 < a2, got a1={a1}, a2={a2}")
    return float(np.exp(-np.log(a2 / a1) * n_of_delta(delta)))


def rate_variable(delta: np.ndarray) -> np.ndarray:
    log_abs = np.abs(np.log(delta))
    return np.log(log_abs) / log_abs


def fit_rate(
    records: Union[Sequence[Dict[str, Any]], Any],
    min_records: int = 5,
    min_decades: float = 2.0,
) -> RateFit:
    """Least squares of ln ρ on ln(ln|ln δ|/|ln δ|) over the trustworthy records.

    Args:
        records: StabilityExperiment or iterable of records with delta, rho and trustworthy
        min_records: Fewest usable records accepted
        min_decades: δ-span below which the fit is flagged low-confidence

    Returns:
        RateFit
    """
    rows = getattr(records, "records", records)
    deltas, rhos, notes = [], [], []
    for row in rows:
        row = row if isinstance(row, dict) else asdict(row)
        if not row.get("trustworthy", True):
            continue
        delta = float(row["delta"])
        rho = float(row.get("rho", row.get("rho_one_sided", np.nan)))
        if not 0.0 < delta < FIT_DOMAIN_LIMIT:
            notes.append(f"delta={delta:.3g} excluded: outside (0, 1/e)")
            continue
        if not rho > 0.0:
            notes.append(f"delta={delta:.3g} excluded: rho={rho:.3g} is not positive")
            continue
        deltas.append(delta)
        rhos.append(rho)

    if len(deltas) < min_records:
        raise InsufficientRecordsError(
            f"Rate fit needs {min_records} usable records, got {len(deltas)}",
            details={"usable": len(deltas), "notes": notes},
        )

    deltas = np.asarray(deltas)
    x = np.log(rate_variable(deltas)).reshape(-1, 1)
    y = np.log(np.asarray(rhos))
    model = LinearRegression().fit(x, y)
    residual = float(np.sqrt(np.mean((model.predict(x) - y) ** 2)))

    fit = RateFit(
        c1_hat=float(np.exp(model.intercept_)),
        c2_hat=float(model.coef_[0]),
        residual=residual,
        delta_min=float(deltas.min()),
        delta_max=float(deltas.max()),
        n_records=int(deltas.size),
        low_confidence=False,
        notes=notes,
    )
    if fit.decades < min_decades:
        fit.low_confidence = True
        fit.notes.append(f"delta range spans {fit.decades:.2f} decades, below {min_decades}")
        logger.warning(f"Low-confidence rate fit: {fit.decades:.2f} decades of delta")
    logger.info(
        f"Rate fit c1={fit.c1_hat:.4g}, c2={fit.c2_hat:.4g}, residual={residual:.2e} on {fit.n_records} records"
    )
    return fit
