"""Log-log power-law fits used to turn epsilon sweeps into verdicts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["FitResult", "fit_decay_exponent", "DEFAULT_SLOPE_THRESHOLD"]

DEFAULT_SLOPE_THRESHOLD = 0.1


@dataclass(frozen=True)
class FitResult:
    """Least-squares fit ``log value = slope * log eps + intercept``.

    A positive slope means the metric shrinks as eps -> 0.
    """

    slope: float
    intercept: float
    r2: float
    points: int
    excluded: int
    trend: str  # "decaying", "bounded" or "growing"
    threshold: float

    @property
    def decaying(self) -> bool:
        return self.trend == "decaying"

    def as_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r2": self.r2,
            "points": self.points,
            "excluded": self.excluded,
            "trend": self.trend,
            "threshold": self.threshold,
        }


def fit_decay_exponent(
    epsilons,
    values,
    threshold: float = DEFAULT_SLOPE_THRESHOLD,
    min_points: int = 4,
    bounded_cap: float | None = None,
) -> FitResult:
    """Fit a power law to ``(eps, value)`` pairs.

    Non-positive or non-finite values are dropped (and counted in
    ``excluded``); fewer than ``min_points`` remaining raises ``ValueError``.
    ``bounded_cap`` optionally requires ``max(value) <= cap`` before a flat
    fit is called "bounded".
    """
    eps = np.asarray(epsilons, dtype=float)
    val = np.asarray(values, dtype=float)
    if eps.shape != val.shape:
        raise ValueError("epsilons and values differ in length")
    ok = np.isfinite(val) & (val > 0) & (eps > 0)
    if ok.sum() < min_points:
        raise ValueError(f"need at least {min_points} positive values, have {int(ok.sum())}")
    lx, ly = np.log(eps[ok]), np.log(val[ok])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    if slope > threshold:
        trend = "decaying"
    elif abs(slope) <= threshold and (bounded_cap is None or val[ok].max() <= bounded_cap):
        trend = "bounded"
    else:
        trend = "growing"
    return FitResult(float(slope), float(intercept), r2, int(ok.sum()), int((~ok).sum()), trend, threshold)
