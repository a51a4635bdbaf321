"""Shared fitting machinery: unconstrained reparameterisation, restarted
Nelder-Mead maximization and profile-likelihood interval search.

The simplex method matches how these censored likelihoods are usually
maximized in practice; all constrained parameters are mapped to the real
line first (log for scales, arctanh for bounded skewness), so no penalty
terms are needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

__all__ = [
    "ParamSpec",
    "Transform",
    "IDENTITY",
    "LOG",
    "ATANH",
    "maximize",
    "profile_interval",
    "ProfileCI",
]


@dataclass(frozen=True)
class Transform:
    name: str
    to_unconstrained: callable
    from_unconstrained: callable


IDENTITY = Transform("identity", lambda v: v, lambda u: u)
LOG = Transform("log", np.log, np.exp)
ATANH = Transform("atanh", np.arctanh, np.tanh)


@dataclass(frozen=True)
class ParamSpec:
    """One free parameter: its report name and its unconstraining map."""

    name: str
    transform: Transform = IDENTITY

    def pack(self, value: float) -> float:
        return float(self.transform.to_unconstrained(value))

    def unpack(self, u: float) -> float:
        return float(self.transform.from_unconstrained(u))


def pack(specs: list[ParamSpec], values) -> np.ndarray:
    return np.array([s.pack(v) for s, v in zip(specs, values)])

def unpack(specs: list[ParamSpec], u) -> np.ndarray:
    return np.array([s.unpack(v) for s, v in zip(specs, u)])


@dataclass
class MaximizeResult:
    x: np.ndarray          # unconstrained coordinates of the best point
    fun: float             # maximized objective value
    converged: bool
    iterations: int
    n_evals: int


def maximize(
    objective,
    x0: np.ndarray,
    *,
    tolerance: float = 1e-8,
    max_iterations: int = 5000,
    restarts: int = 3,
    rng: np.random.Generator | None = None,
    jitter: float = 0.1,
) -> MaximizeResult:
    """Maximize ``objective`` over unconstrained coordinates.

    Runs ``1 + restarts`` Nelder-Mead passes: the first from ``x0``, then
    jittered starts around the best point so far, with the final pass a pure
    polish (no jitter). Non-finite objective values are treated as -inf.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    x0 = np.asarray(x0, dtype=float)

    def neg(x):
        val = objective(x)
        if not np.isfinite(val):
            return np.inf
        return -val

    best_x, best_f = x0, neg(x0)
    converged = False
    iterations = 0
    n_evals = 1
    for run in range(1 + restarts):
        if run == 0:
            start = x0
        elif run == restarts:
            start = best_x
        else:
            start = best_x + jitter * rng.standard_normal(x0.size)
        res = optimize.minimize(
            neg,
            start,
            method="Nelder-Mead",
            options={
                "xatol": tolerance,
                "fatol": tolerance,
                "maxiter": max_iterations,
                "maxfev": 2 * max_iterations,
            },
        )
        iterations += int(res.nit)
        n_evals += int(res.nfev)
        if res.fun < best_f:
            best_x, best_f = np.asarray(res.x, dtype=float), float(res.fun)
            converged = bool(res.success)
        elif run == restarts and res.fun <= best_f:
            converged = bool(res.success)
    return MaximizeResult(
        x=best_x,
        fun=-best_f,
        converged=converged,
        iterations=iterations,
        n_evals=n_evals,
    )


@dataclass(frozen=True)
class ProfileCI:
    """Profile-likelihood interval for one parameter.

    ``level`` is the relative-likelihood cut (0.147 corresponds to an
    approximate 95% interval). An endpoint is flagged open when the cut was
    not bracketed within the search range.
    """

    name: str
    lower: float
    upper: float
    level: float
    lower_open: bool = False
    upper_open: bool = False

    def astuple(self) -> tuple:
        return (self.name, self.lower, self.upper, self.level)


def profile_interval(
    objective,
    x_mle: np.ndarray,
    index: int,
    spec: ParamSpec,
    *,
    level: float = 0.147,
    loglik_max: float | None = None,
    tolerance: float = 1e-8,
    max_iterations: int = 5000,
    search_halfwidth: float = 8.0,
    step: float = 0.25,
) -> ProfileCI:
    """Find where the profile relative likelihood crosses ``level``.

    ``objective(x)`` is the full log-likelihood over unconstrained
    coordinates and ``x_mle`` its maximizer. For a fixed value of coordinate
    ``index`` the remaining coordinates are reoptimized (warm-started along
    the search path). The endpoints are reported on the natural scale of
    ``spec``.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    x_mle = np.asarray(x_mle, dtype=float)
    free = [i for i in range(x_mle.size) if i != index]

    def profile_at(u_fixed: float, warm: np.ndarray) -> tuple[float, np.ndarray]:
        if not free:
            x = np.array([u_fixed])
            return float(objective(x)), warm

        def reduced(u_free):
            x = np.empty(x_mle.size)
            x[index] = u_fixed
            x[free] = u_free
            return objective(x)

        res = maximize(
            reduced,
            warm,
            tolerance=tolerance,
            max_iterations=max_iterations,
            restarts=1,
        )
        return res.fun, res.x

    if loglik_max is None:
        loglik_max, _ = profile_at(float(x_mle[index]), x_mle[free])
    target = loglik_max + float(np.log(level))

    def search(direction: int) -> tuple[float, bool]:
        u0 = float(x_mle[index])
        warm = x_mle[free].copy()
        u_in, f_in = u0, loglik_max
        h = step
        while True:
            u_out = u_in + direction * h
            if abs(u_out - u0) > search_halfwidth:
                u_out = u0 + direction * search_halfwidth
            f_out, warm = profile_at(u_out, warm)
            if f_out < target:
                break
            if abs(u_out - u0) >= search_halfwidth:
                return u_out, True  # cut not reached inside the range
            u_in, f_in = u_out, f_out
            h = min(2.0 * h, search_halfwidth)
        # bisect the bracket [u_in, u_out] on g(u) = profile(u) - target
        warm_b = warm.copy()
        for _ in range(60):
            if abs(u_out - u_in) < 1e-7 * max(1.0, abs(u0)):
                break
            u_mid = 0.5 * (u_in + u_out)
            f_mid, warm_b = profile_at(u_mid, warm_b)
            if f_mid >= target:
                u_in = u_mid
            else:
                u_out = u_mid
        return 0.5 * (u_in + u_out), False

    u_lo, open_lo = search(-1)
    u_hi, open_hi = search(+1)
    return ProfileCI(
        name=spec.name,
        lower=spec.unpack(u_lo),
        upper=spec.unpack(u_hi),
        level=level,
        lower_open=open_lo,
        upper_open=open_hi,
    )
