"""Survival and lifetime data analysis with log two-piece distributions.

A log two-piece law is the distribution of ``exp(X)`` where ``X`` follows a
two-piece (split-scale) version of a symmetric baseline density. The family
nests the lognormal, log-logistic and log-Student-t models and adds one
interpretable skewness parameter, plus an optional tail parameter from the
baseline. This package provides the distributions themselves, censored
maximum-likelihood fitting with profile-likelihood intervals, accelerated
failure time regression, remaining-life prediction, and a Monte-Carlo
harness for studying the estimators.
"""

from .baselines import FAMILIES, Baseline
from .twopiece import (
    EpsilonSkew,
    InverseScale,
    MomentDivergenceError,
    RawScales,
    TwoPiece,
)
from .ltp import CompositeModel, LogSymmetricDensity, LogTwoPiece
from .inference import (
    FitConfig,
    FitResult,
    Observation,
    ProfileCI,
    compare_models,
    fit_gamma,
    fit_mle,
    fit_weibull,
    log_likelihood,
    profile_ci,
)
from .aft import (
    AftDataset,
    AftFit,
    AftParams,
    aft_fit,
    aft_location,
    aft_log_likelihood,
    aft_profile_ci,
    centring_constant,
)
from .predict import (
    PredictionInterval,
    RemainingLifeQuery,
    prediction_interval,
    remaining_life_cdf,
    remaining_life_survival,
    survival_curve,
)
from .simharness import (
    Scenario,
    SummaryRow,
    SummaryTable,
    load_scenarios,
    run_scenario,
    summarize,
)
from . import datasets

__version__ = "0.1.0"

__all__ = [
    "FAMILIES",
    "Baseline",
    "EpsilonSkew",
    "InverseScale",
    "RawScales",
    "TwoPiece",
    "MomentDivergenceError",
    "LogTwoPiece",
    "LogSymmetricDensity",
    "CompositeModel",
    "Observation",
    "FitConfig",
    "FitResult",
    "ProfileCI",
    "log_likelihood",
    "fit_mle",
    "profile_ci",
    "compare_models",
    "fit_weibull",
    "fit_gamma",
    "AftDataset",
    "AftParams",
    "AftFit",
    "aft_fit",
    "aft_log_likelihood",
    "aft_profile_ci",
    "aft_location",
    "centring_constant",
    "RemainingLifeQuery",
    "PredictionInterval",
    "remaining_life_cdf",
    "remaining_life_survival",
    "prediction_interval",
    "survival_curve",
    "Scenario",
    "SummaryRow",
    "SummaryTable",
    "run_scenario",
    "summarize",
    "load_scenarios",
    "datasets",
    "__version__",
]
