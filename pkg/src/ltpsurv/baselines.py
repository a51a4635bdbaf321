"""Symmetric unimodal baseline densities on the real line.

Six families share one interface: ``pdf``, ``logpdf``, ``cdf``, ``logcdf``,
``quantile`` and inverse-transform ``sample``. Every density is standardized
(mode at 0, symmetric), so ``cdf(0) == 1/2`` and ``quantile(1/2) == 0``.
Location, scale and asymmetry enter at the two-piece layer, never here.

Families and their tail parameter ``delta``:

========== =========================================================
normal     no delta
t          delta > 0 degrees of freedom; normal limit as delta -> inf
logistic   no delta (unit scale, not unit variance)
laplace    no delta
exppower   exp(-|x|**delta) kernel; laplace at delta=1, and at delta=2
           a normal with variance 1/2
sas        sinh-arcsinh modulation of the normal; normal at delta=1,
           heavier tails for delta < 1, lighter for delta > 1
========== =========================================================
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = ["Baseline", "FAMILIES"]

FAMILIES = ("normal", "t", "logistic", "laplace", "exppower", "sas")

_DELTA_FAMILIES = frozenset({"t", "exppower", "sas"})

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)
_LOG_HALF = np.log(0.5)

# Student-t beyond this many degrees of freedom is evaluated as its normal
# limit to avoid loss of precision in log-gamma differences.
_T_NORMAL_GUARD = 1.0e7


def _as_array(x, name: str = "x", allow_inf: bool = False) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if allow_inf:
        if np.any(np.isnan(arr)):
            raise ValueError(f"{name} must not contain NaN")
    elif not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def _match(x, arr: np.ndarray):
    """Return a python float for scalar input, else the array."""
    if np.ndim(x) == 0:
        return float(arr)
    return arr


def _log_cosh(w: np.ndarray) -> np.ndarray:
    # cosh overflows near |w| = 710; |w| + log1p(exp(-2|w|)) - log 2 does not
    aw = np.abs(w)
    return aw + np.log1p(np.exp(-2.0 * aw)) - np.log(2.0)


@dataclass(frozen=True)
class Baseline:
    """One of the six symmetric unimodal baseline densities.

    Parameters
    ----------
    kind : str
        Family name, one of ``FAMILIES``.
    delta : float, optional
        Positive tail parameter. Required for ``t``, ``exppower`` and
        ``sas``; must be omitted for ``normal``, ``logistic``, ``laplace``.
    """

    kind: str
    delta: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in FAMILIES:
            raise ValueError(f"unknown baseline family {self.kind!r}")
        if self.kind in _DELTA_FAMILIES:
            if self.delta is None:
                raise ValueError(f"{self.kind} baseline requires delta")
            if not np.isfinite(self.delta) or self.delta <= 0.0:
                raise ValueError("delta must be a positive finite real")
        elif self.delta is not None:
            raise ValueError(f"{self.kind} baseline takes no delta")

    @property
    def has_delta(self) -> bool:
        return self.kind in _DELTA_FAMILIES

    def with_delta(self, delta: float | None) -> "Baseline":
        return Baseline(self.kind, delta if self.has_delta else None)

    # ------------------------------------------------------------------
    # density
    # ------------------------------------------------------------------
    def pdf(self, x):
        arr = _as_array(x)
        return _match(x, np.exp(self._logpdf(arr)))

    def logpdf(self, x):
        return _match(x, self._logpdf(_as_array(x)))

    def _logpdf(self, x: np.ndarray) -> np.ndarray:
        kind = self.kind
        if kind == "normal":
            return -0.5 * x * x - _LOG_SQRT_2PI
        if kind == "t":
            d = self.delta
            if d > _T_NORMAL_GUARD:
                return -0.5 * x * x - _LOG_SQRT_2PI
            return (
                special.gammaln(0.5 * (d + 1.0))
                - special.gammaln(0.5 * d)
                - 0.5 * np.log(np.pi * d)
                - 0.5 * (d + 1.0) * np.log1p(x * x / d)
            )
        if kind == "logistic":
            ax = np.abs(x)
            return -ax - 2.0 * np.log1p(np.exp(-ax))
        if kind == "laplace":
            return _LOG_HALF - np.abs(x)
        if kind == "exppower":
            d = self.delta
            return (
                np.log(d) - np.log(2.0) - special.gammaln(1.0 / d)
                - np.abs(x) ** d
            )
        # sas
        d = self.delta
        w = d * np.arcsinh(x)
        s = np.sinh(w)
        with np.errstate(over="ignore"):
            kernel = -0.5 * s * s
        return (
            np.log(d) + kernel - _LOG_SQRT_2PI
            + _log_cosh(w) - 0.5 * np.log1p(x * x)
        )

    # ------------------------------------------------------------------
    # distribution function
    # ------------------------------------------------------------------
    def cdf(self, x):
        arr = _as_array(x, allow_inf=True)
        return _match(x, self._cdf(arr))

    def _cdf(self, x: np.ndarray) -> np.ndarray:
        kind = self.kind
        if kind == "normal":
            return special.ndtr(x)
        if kind == "t":
            d = self.delta
            if d > _T_NORMAL_GUARD:
                return special.ndtr(x)
            finite = np.isfinite(x)
            out = np.where(x > 0, 1.0, 0.0)
            if np.any(finite):
                out = np.where(finite, special.stdtr(d, np.where(finite, x, 0.0)), out)
            return out
        if kind == "logistic":
            return special.expit(x)
        if kind == "laplace":
            with np.errstate(over="ignore"):
                return np.where(x < 0, 0.5 * np.exp(x), 1.0 - 0.5 * np.exp(-x))
        if kind == "exppower":
            d = self.delta
            ax = np.where(np.isfinite(x), np.abs(x), np.inf)
            # complement on the negative side: 0.5 + 0.5*sign(x)*P would
            # cancel catastrophically in the lower tail
            upper = 0.5 + 0.5 * special.gammainc(1.0 / d, ax**d)
            lower = 0.5 * special.gammaincc(1.0 / d, ax**d)
            return np.where(x >= 0, upper, lower)
        # sas: S(x) = Phi(sinh(delta * arcsinh(x)))
        with np.errstate(over="ignore"):
            z = np.sinh(self.delta * np.arcsinh(x))
        return special.ndtr(z)

    def logcdf(self, x):
        arr = _as_array(x, allow_inf=True)
        return _match(x, self._logcdf(arr))

    def _logcdf(self, x: np.ndarray) -> np.ndarray:
        kind = self.kind
        if kind == "normal":
            return special.log_ndtr(x)
        if kind == "logistic":
            return -np.logaddexp(0.0, -x)
        if kind == "laplace":
            return np.where(x < 0, _LOG_HALF + x, np.log1p(-0.5 * np.exp(-x)))
        if kind == "sas":
            with np.errstate(over="ignore"):
                z = np.sinh(self.delta * np.arcsinh(x))
            return special.log_ndtr(z)
        if kind == "exppower":
            d = self.delta
            ax = np.where(np.isfinite(x), np.abs(x), np.inf)
            with np.errstate(divide="ignore"):
                lower = _LOG_HALF + np.log(special.gammaincc(1.0 / d, ax**d))
                upper = np.log(0.5 + 0.5 * special.gammainc(1.0 / d, ax**d))
            return np.where(x >= 0, upper, lower)
        with np.errstate(divide="ignore"):
            return np.log(self._cdf(x))

    # ------------------------------------------------------------------
    # quantile and sampling
    # ------------------------------------------------------------------
    def quantile(self, p):
        arr = _as_array(p, name="p")
        if np.any(arr <= 0.0) or np.any(arr >= 1.0):
            raise ValueError("p must lie strictly inside (0, 1)")
        return _match(p, self._quantile(arr))

    def _quantile(self, p: np.ndarray) -> np.ndarray:
        kind = self.kind
        if kind == "normal":
            return special.ndtri(p)
        if kind == "t":
            d = self.delta
            if d > _T_NORMAL_GUARD:
                return special.ndtri(p)
            return special.stdtrit(d, p)
        if kind == "logistic":
            return special.logit(p)
        if kind == "laplace":
            return np.where(p < 0.5, np.log(2.0 * p), -np.log(2.0 * (1.0 - p)))
        if kind == "exppower":
            d = self.delta
            tail = special.gammaincinv(1.0 / d, np.abs(2.0 * p - 1.0)) ** (1.0 / d)
            return np.where(p >= 0.5, tail, -tail)
        # sas
        return np.sinh(np.arcsinh(special.ndtri(p)) / self.delta)

    def sample(self, rng: np.random.Generator, size=None):
        """Inverse-transform sampling; deterministic for a seeded ``rng``."""
        u = rng.random(size)
        tiny = np.finfo(float).tiny
        u = np.where(u <= 0.0, tiny, u)
        if size is None:
            return float(self._quantile(np.asarray(u)))
        return self._quantile(np.asarray(u))
