"""Accelerated failure time regression with log two-piece errors.

The model is ``log T = x' beta + eps`` with ``eps`` two-piece distributed
around 0 (equivalently, ``T`` is log two-piece with log-location ``x' beta``).
Censored rows contribute CDF/survival factors exactly as in the
single-sample case, with the location varying per row.

Reported ``loglik``/``aic`` refer to the regression likelihood of the log
times (the usual AFT convention); the positive-scale values, which differ by
the fixed Jacobian ``sum(log t)`` over exact rows, are kept alongside as
``loglik_time_scale``/``aic_time_scale`` for comparability with plain
distribution fits.

With asymmetric errors the fitted line is neither the conditional mean nor
the median of ``log T``; ``centring_constant`` computes the additive
correction for the functional of interest, and ``aft_location`` applies it
on read without ever altering the stored coefficients.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _optim
from ._optim import ATANH, IDENTITY, LOG, ParamSpec, ProfileCI
from .baselines import Baseline
from .inference import (
    DELTA_STARTS,
    EFFECTIVELY_NORMAL_DELTA,
    FitConfig,
    Observation,
    _gamma_param,
    _neutral_gamma,
)
from .ltp import LogTwoPiece
from .twopiece import MomentDivergenceError, TwoPiece

__all__ = [
    "AftDataset",
    "AftParams",
    "AftFit",
    "aft_log_likelihood",
    "aft_fit",
    "aft_profile_ci",
    "centring_constant",
    "aft_location",
]


@dataclass(frozen=True)
class AftDataset:
    """Design matrix plus one observation per row.

    ``matrix`` already contains the intercept column when requested through
    :meth:`from_rows`. Column names drive report output.
    """

    matrix: np.ndarray
    observations: tuple
    names: tuple

    def __post_init__(self) -> None:
        X = np.asarray(self.matrix, dtype=float)
        if X.ndim != 2:
            raise ValueError("covariate matrix must be two-dimensional")
        n, p = X.shape
        if len(self.observations) != n:
            raise ValueError("one observation per covariate row is required")
        if len(self.names) != p:
            raise ValueError("one name per covariate column is required")
        if not np.all(np.isfinite(X)):
            raise ValueError("covariates must be finite")
        if n < p + 2:
            raise ValueError(f"need at least p+2={p + 2} rows, got {n}")
        object.__setattr__(self, "matrix", X)

    @classmethod
    def from_rows(
        cls,
        covariates,
        observations: Sequence[Observation],
        names: Sequence[str] | None = None,
        intercept: bool = True,
    ) -> "AftDataset":
        X = np.atleast_2d(np.asarray(covariates, dtype=float))
        if X.shape[0] != len(observations) and X.shape[1] == len(observations):
            X = X.T
        if names is None:
            names = [f"x{j + 1}" for j in range(X.shape[1])]
        names = list(names)
        if intercept:
            X = np.column_stack([np.ones(X.shape[0]), X])
            names = ["intercept"] + names
        return cls(matrix=X, observations=tuple(observations), names=tuple(names))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def p(self) -> int:
        return self.matrix.shape[1]


class _CompiledAft:
    """Rows regrouped by censoring kind, as (design block, log times)."""

    def __init__(self, data: AftDataset):
        idx = {"exact": [], "left": [], "right": [], "interval": []}
        for i, obs in enumerate(data.observations):
            idx[obs.kind].append(i)
        X = data.matrix
        self.X_exact = X[idx["exact"]]
        self.X_left = X[idx["left"]]
        self.X_right = X[idx["right"]]
        self.X_int = X[idx["interval"]]
        self.log_exact = np.log([data.observations[i].time for i in idx["exact"]])
        self.log_left = np.log([data.observations[i].time for i in idx["left"]])
        self.log_right = np.log([data.observations[i].time for i in idx["right"]])
        self.log_lo = np.log([data.observations[i].time for i in idx["interval"]])
        self.log_hi = np.log([data.observations[i].upper for i in idx["interval"]])
        self.n = data.n
        self.n_exact = len(idx["exact"])
        self.dataset = data

    def log_time_pool(self) -> tuple[np.ndarray, np.ndarray]:
        """(design matrix, imputed log times) over all rows; intervals at
        their log-midpoint."""
        X = np.vstack([self.X_exact, self.X_left, self.X_right, self.X_int])
        mid = np.log(0.5 * (np.exp(self.log_lo) + np.exp(self.log_hi)))
        t = np.concatenate([self.log_exact, self.log_left, self.log_right, mid])
        return X, t


def _compiled_aft(data) -> _CompiledAft:
    return data if isinstance(data, _CompiledAft) else _CompiledAft(data)


@dataclass(frozen=True)
class AftParams:
    """Regression coefficients plus the error-law shape.

    The error distribution is a two-piece law with location fixed at 0; the
    intercept absorbs any location, so ``beta`` and the error shape are
    jointly identified.
    """

    beta: tuple
    sigma: float
    param: object
    baseline: Baseline

    def __post_init__(self) -> None:
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        if not np.isfinite(self.sigma) or self.sigma <= 0.0:
            raise ValueError("error sigma must be positive")

    @property
    def error_law(self) -> TwoPiece:
        return TwoPiece(0.0, self.sigma, self.param, self.baseline)

    def location(self, x) -> float:
        return float(np.asarray(x, dtype=float) @ np.asarray(self.beta))

    def distribution(self, x) -> LogTwoPiece:
        """Lifetime law for one covariate vector."""
        return LogTwoPiece(self.location(x), self.sigma, self.param, self.baseline)


def _aft_tp_terms(params: AftParams, comp: _CompiledAft) -> float:
    """Censored log likelihood of the log times under per-row locations."""
    beta = np.asarray(params.beta)
    err = params.error_law
    total = 0.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if comp.log_exact.size:
            total += float(np.sum(err._logpdf(comp.log_exact - comp.X_exact @ beta)))
        if comp.log_left.size:
            total += float(np.sum(err._logcdf(comp.log_left - comp.X_left @ beta)))
        if comp.log_right.size:
            total += float(
                np.sum(err._log_survival(comp.log_right - comp.X_right @ beta))
            )
        if comp.log_lo.size:
            mu = comp.X_int @ beta
            e_lo, e_hi = comp.log_lo - mu, comp.log_hi - mu
            cdf_lo = err._cdf(e_lo)
            diff_surv = err._survival(e_lo) - err._survival(e_hi)
            diff_cdf = err._cdf(e_hi) - cdf_lo
            diff = np.where(cdf_lo > 0.5, diff_surv, diff_cdf)
            if np.any(diff <= 0.0):
                return -np.inf
            total += float(np.sum(np.log(diff)))
    if np.isnan(total):
        return -np.inf
    return total


def aft_log_likelihood(params: AftParams, data: AftDataset) -> float:
    """Positive-scale censored log likelihood with per-row locations.

    Equals the sum of single-observation log two-piece terms evaluated at
    ``mu_j = x_j' beta``; returns ``-inf`` for zero-probability records.
    """
    comp = _compiled_aft(data)
    if len(params.beta) != comp.dataset.p:
        raise ValueError("beta length does not match the design matrix")
    terms = _aft_tp_terms(params, comp)
    if not np.isfinite(terms):
        return -np.inf
    return terms - float(np.sum(comp.log_exact))


class _AftModelSpace:
    """Unconstrained coordinates: beta (identity), then error shape."""

    def __init__(self, config: FitConfig, names: Sequence[str]):
        self.config = config
        baseline = Baseline(
            config.baseline,
            DELTA_STARTS.get(config.baseline) if config.baseline in DELTA_STARTS else None,
        )
        self.has_delta = baseline.has_delta
        self.free_delta = self.has_delta and config.fit_delta
        self.fixed_delta = None
        if self.has_delta and not self.free_delta:
            self.fixed_delta = (
                config.delta if config.delta is not None else DELTA_STARTS[config.baseline]
            )
        self.beta_names = list(names)
        self.specs = [ParamSpec(f"beta_{n}", IDENTITY) for n in self.beta_names]
        self.specs.append(ParamSpec("sigma", LOG))
        if config.fix_gamma is None:
            self.specs.append(ParamSpec("gamma", ATANH if config.param == "eps" else LOG))
        if self.free_delta:
            self.specs.append(ParamSpec("delta", LOG))
        self.names = [s.name for s in self.specs]

    @property
    def n_params(self) -> int:
        return len(self.specs)

    def start(self, comp: _CompiledAft) -> np.ndarray:
        X, t = comp.log_time_pool()
        beta0, *_ = np.linalg.lstsq(X, t, rcond=None)
        resid = t - X @ beta0
        sigma0 = 1.4826 * float(np.median(np.abs(resid - np.median(resid))))
        if not sigma0 > 0.0:
            sigma0 = max(float(np.std(resid)), 1e-3)
        values = list(beta0) + [sigma0]
        if "gamma" in self.names:
            values.append(_neutral_gamma(self.config.param))
        if "delta" in self.names:
            values.append(
                self.config.delta
                if self.config.delta is not None
                else DELTA_STARTS[self.config.baseline]
            )
        return _optim.pack(self.specs, values)

    def build(self, x: np.ndarray) -> AftParams:
        p = len(self.beta_names)
        values = dict(zip(self.names[p:], _optim.unpack(self.specs[p:], x[p:])))
        gamma = values.get("gamma", self.config.fix_gamma)
        if gamma is None:
            gamma = _neutral_gamma(self.config.param)
        delta = values.get("delta", self.fixed_delta)
        return AftParams(
            beta=tuple(x[:p]),
            sigma=values["sigma"],
            param=_gamma_param(self.config.param, gamma),
            baseline=Baseline(self.config.baseline, delta if self.has_delta else None),
        )

    def objective(self, comp: _CompiledAft):
        def loglik(x: np.ndarray) -> float:
            try:
                params = self.build(x)
            except (ValueError, OverflowError):
                return -np.inf
            return _aft_tp_terms(params, comp)

        return loglik


@dataclass
class AftFit:
    """Fitted accelerated failure time model."""

    params: AftParams
    names: tuple
    loglik: float
    aic: float
    loglik_time_scale: float
    aic_time_scale: float
    n_params: int
    converged: bool
    iterations: int
    n_obs: int
    config: FitConfig
    centring_mean: float | None = None
    centring_median: float = 0.0
    profile_cis: list[ProfileCI] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)
    _space: "_AftModelSpace" = field(default=None, repr=False)
    _x: np.ndarray = field(default=None, repr=False)

    @classmethod
    def from_params(cls, params: AftParams, names: Sequence[str]) -> "AftFit":
        """Reconstruct a prediction-capable fit from stored parameters."""
        fit = cls(
            params=params,
            names=tuple(names),
            loglik=np.nan,
            aic=np.nan,
            loglik_time_scale=np.nan,
            aic_time_scale=np.nan,
            n_params=0,
            converged=True,
            iterations=0,
            n_obs=0,
            config=FitConfig(baseline=params.baseline.kind),
        )
        fit.centring_median = centring_constant(params, "median")
        try:
            fit.centring_mean = centring_constant(params, "mean")
        except MomentDivergenceError:
            fit.centring_mean = None
        return fit


def aft_fit(data: AftDataset, config: FitConfig | None = None) -> AftFit:
    """Censored MLE of the AFT model over (beta, error shape).

    Ordinary least squares on imputed log times seeds the coefficients.
    Non-convergence is flagged on the result, which still carries the best
    point found.
    """
    if config is None:
        config = FitConfig()
    comp = _compiled_aft(data)
    if comp.n_exact == 0 and comp.log_lo.size == 0:
        raise ValueError(
            "dataset is entirely one-sided censoring; needs at least one "
            "exact or interval-censored observation"
        )
    X = data.matrix if isinstance(data, AftDataset) else comp.dataset.matrix
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise ValueError("design matrix is rank deficient")
    if comp.n < 30:
        warnings.warn(
            f"only {comp.n} rows; error-shape estimates will be unstable",
            stacklevel=2,
        )
    space = _AftModelSpace(config, comp.dataset.names)
    rng = np.random.default_rng(config.seed)
    res = _optim.maximize(
        space.objective(comp),
        space.start(comp),
        tolerance=config.tolerance,
        max_iterations=config.max_iterations,
        restarts=config.restarts,
        rng=rng,
    )
    params = space.build(res.x)
    k = space.n_params
    jacobian = float(np.sum(comp.log_exact))
    loglik = res.fun
    diagnostics = []
    if config.baseline == "t" and params.baseline.delta is not None:
        if params.baseline.delta > EFFECTIVELY_NORMAL_DELTA:
            diagnostics.append("effectively_normal")
    fit = AftFit(
        params=params,
        names=comp.dataset.names,
        loglik=loglik,
        aic=2.0 * k - 2.0 * loglik,
        loglik_time_scale=loglik - jacobian,
        aic_time_scale=2.0 * k - 2.0 * (loglik - jacobian),
        n_params=k,
        converged=res.converged,
        iterations=res.iterations,
        n_obs=comp.n,
        config=config,
        diagnostics=diagnostics,
        _space=space,
        _x=res.x,
    )
    fit.centring_median = centring_constant(params, "median")
    try:
        fit.centring_mean = centring_constant(params, "mean")
    except MomentDivergenceError:
        fit.centring_mean = None
        fit.diagnostics.append("mean_centring_divergent")
    return fit


def aft_profile_ci(
    data: AftDataset, fit: AftFit, param_name: str, level: float = 0.147
) -> ProfileCI:
    """Profile-likelihood interval for one AFT parameter.

    ``param_name`` is ``"sigma"``, ``"gamma"``, ``"delta"`` or
    ``"beta_<name>"`` for a coefficient.
    """
    space, x = fit._space, fit._x
    if space is None:
        raise ValueError("fit does not carry optimizer state")
    if param_name not in space.names:
        raise ValueError(
            f"parameter {param_name!r} was not free in this fit "
            f"(free: {', '.join(space.names)})"
        )
    comp = _compiled_aft(data)
    index = space.names.index(param_name)
    ci = _optim.profile_interval(
        space.objective(comp),
        x,
        index,
        space.specs[index],
        level=level,
        loglik_max=fit.loglik,
        tolerance=fit.config.tolerance,
        max_iterations=fit.config.max_iterations,
    )
    fit.profile_cis.append(ci)
    return ci


def centring_constant(params: AftParams | AftFit, target) -> float:
    """Additive correction making the fitted line the chosen functional.

    ``target`` is ``"mean"``, ``"median"`` or a quantile level in (0, 1).
    For the mean this is ``-E[eps]``; heavy-tailed error laws without a
    first moment raise :class:`MomentDivergenceError`, in which case centre
    on the median (or another quantile) instead.
    """
    if isinstance(params, AftFit):
        params = params.params
    err = params.error_law
    if isinstance(target, str):
        key = target.lower()
        if key == "mean":
            try:
                return -err.mean()
            except MomentDivergenceError as exc:
                raise MomentDivergenceError(
                    "error law has no finite mean; centre on the median instead"
                ) from exc
        if key == "median":
            return -err.quantile(0.5)
        raise ValueError("target must be 'mean', 'median' or a quantile level")
    q = float(target)
    if not 0.0 < q < 1.0:
        raise ValueError("quantile level must lie in (0, 1)")
    return -err.quantile(q)


def aft_location(fit: AftFit, x, centring="median") -> float:
    """Centred linear predictor ``x' beta + M`` for one covariate vector."""
    params = fit.params if isinstance(fit, AftFit) else fit
    return params.location(x) + centring_constant(params, centring)
