"""Remaining-life distribution and prediction intervals for censored subjects.

For a subject alive at time ``t_i`` with lifetime law ``G``, the remaining
life follows the conditional law

    G(t | t_i) = (G(t) - G(t_i)) / (1 - G(t_i)),   t >= t_i,

evaluated here by plugging the MLE into the fitted AFT model. Equal-tail
prediction intervals invert this law in closed form through the lifetime
quantile function; no coverage calibration is applied, so the plug-in
intervals can undercover when parameter uncertainty is large.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .aft import AftFit
from .ltp import LogTwoPiece

__all__ = [
    "RemainingLifeQuery",
    "PredictionInterval",
    "remaining_life_cdf",
    "remaining_life_survival",
    "prediction_interval",
    "survival_curve",
]


@dataclass(frozen=True)
class RemainingLifeQuery:
    """One censored subject: covariates, last time known alive, and the two
    tail probabilities of the equal-tail interval."""

    covariates: tuple
    alive_at: float
    alpha1: float = 0.05
    alpha2: float = 0.05

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "covariates", tuple(float(v) for v in np.atleast_1d(self.covariates))
        )
        if not np.isfinite(self.alive_at) or self.alive_at <= 0.0:
            raise ValueError("alive_at must be positive")
        if not (0.0 < self.alpha1 and 0.0 < self.alpha2 and self.alpha1 + self.alpha2 < 1.0):
            raise ValueError("alpha1, alpha2 must be positive with alpha1+alpha2 < 1")


@dataclass(frozen=True)
class PredictionInterval:
    lower: float
    upper: float
    upper_open: bool = False

    def __iter__(self):
        return iter((self.lower, self.upper))


def _subject_dist(fit: AftFit, query: RemainingLifeQuery) -> LogTwoPiece:
    params = fit.params if isinstance(fit, AftFit) else fit
    return params.distribution(query.covariates)


def _condition(dist: LogTwoPiece, t_i: float) -> tuple[float, float]:
    g_i = dist.cdf(t_i)
    s_i = dist.survival(t_i)
    if s_i <= 0.0 or g_i >= 1.0:
        raise ArithmeticError(
            "survival at the conditioning time is numerically zero; "
            "the remaining-life law is degenerate"
        )
    return g_i, s_i


def remaining_life_cdf(fit: AftFit, query: RemainingLifeQuery, t):
    """P(T <= t | T > alive_at) at the plugged-in MLE; 0 at t = alive_at."""
    dist = _subject_dist(fit, query)
    t_i = query.alive_at
    arr = np.asarray(t, dtype=float)
    if np.any(arr < t_i):
        raise ValueError("t must not precede alive_at")
    g_i, _ = _condition(dist, t_i)
    out = (np.asarray(dist.cdf(arr)) - g_i) / (1.0 - g_i)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if np.ndim(t) == 0 else out


def remaining_life_survival(fit: AftFit, query: RemainingLifeQuery, t):
    """P(T > t | T > alive_at), computed as a ratio of survivals so the far
    tail keeps relative accuracy."""
    dist = _subject_dist(fit, query)
    t_i = query.alive_at
    arr = np.asarray(t, dtype=float)
    if np.any(arr < t_i):
        raise ValueError("t must not precede alive_at")
    _, s_i = _condition(dist, t_i)
    out = np.asarray(dist.survival(arr)) / s_i
    out = np.clip(out, 0.0, 1.0)
    return float(out) if np.ndim(t) == 0 else out


def prediction_interval(fit: AftFit, query: RemainingLifeQuery) -> PredictionInterval:
    """Equal-tail interval [T_L, T_R] with conditional CDF alpha1 at T_L and
    1 - alpha2 at T_R, inverted in closed form through the lifetime quantile.
    """
    dist = _subject_dist(fit, query)
    t_i = query.alive_at
    g_i, _ = _condition(dist, t_i)
    p_lo = g_i + query.alpha1 * (1.0 - g_i)
    p_hi = g_i + (1.0 - query.alpha2) * (1.0 - g_i)
    lower = max(t_i, dist.quantile(p_lo))
    if p_hi >= 1.0:
        return PredictionInterval(lower=lower, upper=np.inf, upper_open=True)
    return PredictionInterval(lower=lower, upper=dist.quantile(p_hi))


def survival_curve(
    fit: AftFit, query: RemainingLifeQuery, t_max: float | None = None, n: int = 200
) -> tuple[np.ndarray, np.ndarray]:
    """Grid of (t, remaining-life survival) from alive_at out to t_max
    (default: the conditional 0.999 quantile)."""
    dist = _subject_dist(fit, query)
    t_i = query.alive_at
    if t_max is None:
        g_i, _ = _condition(dist, t_i)
        p = g_i + 0.999 * (1.0 - g_i)
        t_max = dist.quantile(min(p, 1.0 - 1e-12))
    grid = np.geomspace(t_i, t_max, n)
    grid[0] = t_i
    return grid, remaining_life_survival(fit, query, grid)
