"""Command-line front end.

Subcommands: ``fit`` (distribution fitting), ``compare`` (AIC ranking),
``aft`` (regression), ``predict`` (remaining-life intervals), ``simulate``
(Monte-Carlo study) and ``hazard`` (curve grids). Fit reports are flat
``key = value`` text with 17 significant digits so they reload losslessly;
tabular output is CSV. No plotting: curve commands emit numbers.

Exit codes: 0 success, 1 input error, 2 optimizer did not converge (the
report is still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from . import aft as aft_mod
from . import simharness
from .aft import AftDataset, AftFit, AftParams, aft_fit, aft_profile_ci
from .baselines import Baseline
from .inference import FitConfig, Observation, compare_models, fit_mle, profile_ci
from .ltp import LogTwoPiece
from .predict import PredictionInterval, RemainingLifeQuery, prediction_interval, survival_curve
from .twopiece import EpsilonSkew, InverseScale

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_CONVERGENCE = 2

BASELINE_CHOICES = ("normal", "t", "logistic", "laplace", "exppower", "sas")

MODEL_ALIASES = {
    "lognormal": "normal:gamma=0",
    "logt": "t:gamma=0",
    "loglogistic": "logistic:gamma=0",
}


class InputError(Exception):
    """User-input problem: bad file, bad value, bad schema."""


# ----------------------------------------------------------------------
# formatting / parsing helpers
# ----------------------------------------------------------------------
def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_lines(lines, out_path: str | None) -> None:
    text = "".join(f"{key} = {_fmt(value)}\n" for key, value in lines)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_text(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_report(path: str) -> dict:
    report = {}
    try:
        with open(path) as fh:
            for raw in fh:
                line = raw.strip()
                if not line or line.startswith("#") or "=" not in line:
                    continue
                key, value = line.split("=", 1)
                report[key.strip()] = value.strip()
    except OSError as exc:
        raise InputError(f"cannot read model report {path}: {exc}") from exc
    return report


def _float_field(row: dict, key: str, where: str) -> float:
    raw = (row.get(key) or "").strip()
    if not raw:
        raise InputError(f"{where}: missing value for column '{key}'")
    try:
        return float(raw)
    except ValueError as exc:
        raise InputError(f"{where}: cannot parse '{raw}' as a number") from exc


def _read_csv_rows(path: str) -> tuple[list, list]:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise InputError(f"{path}: file is empty (no header row)")
            fields = [f.strip() for f in reader.fieldnames]
            rows = list(reader)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return fields, rows


def _row_observation(row: dict, where: str, fields) -> Observation:
    status = (row.get("status") or "").strip().lower()
    if not status:
        raise InputError(f"{where}: missing status")
    try:
        if status == "interval":
            if "time_l" not in fields or "time_r" not in fields:
                raise InputError(
                    f"{where}: interval rows need time_l and time_r columns"
                )
            lo = _float_field(row, "time_l", where)
            hi = _float_field(row, "time_r", where)
            return Observation.interval_censored(lo, hi)
        time = _float_field(row, "time", where)
        if status == "exact":
            return Observation.exact(time)
        if status == "left":
            return Observation.left_censored(time)
        if status == "right":
            return Observation.right_censored(time)
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from exc
    raise InputError(f"{where}: unknown status token '{status}'")


def read_observations(path: str) -> list:
    fields, rows = _read_csv_rows(path)
    if "status" not in fields or ("time" not in fields and "time_l" not in fields):
        raise InputError(
            f"{path}: expected columns time,status (plus time_l,time_r for intervals)"
        )
    if not rows:
        raise InputError(f"{path}: no data rows")
    # header is line 1, so data starts at line 2
    return [
        _row_observation(row, f"{path}:{line}", fields)
        for line, row in enumerate(rows, start=2)
    ]


def read_aft_table(path: str, covariates: list) -> tuple[AftDataset, list]:
    fields, rows = _read_csv_rows(path)
    missing = [c for c in covariates if c not in fields]
    if missing:
        raise InputError(f"{path}: missing covariate columns: {', '.join(missing)}")
    if not rows:
        raise InputError(f"{path}: no data rows")
    covs, obs, ids = [], [], []
    for line, row in enumerate(rows, start=2):
        where = f"{path}:{line}"
        covs.append([_float_field(row, c, where) for c in covariates])
        obs.append(_row_observation(row, where, fields))
        ids.append((row.get("id") or str(line - 1)).strip())
    try:
        data = AftDataset.from_rows(covs, obs, names=covariates, intercept=True)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return data, ids


# ----------------------------------------------------------------------
# fit configuration from flags
# ----------------------------------------------------------------------
def _config_from_args(args, label: str | None = None) -> FitConfig:
    fix_delta = getattr(args, "fix_delta", None)
    return FitConfig(
        baseline=args.baseline,
        param=args.param,
        fix_gamma=args.fix_gamma,
        fit_delta=fix_delta is None,
        delta=fix_delta,
        max_iterations=args.max_iterations,
        tolerance=args.tolerance,
        restarts=args.restarts,
        seed=args.seed,
        label=label,
    )


def _parse_model_spec(spec: str) -> FitConfig:
    label = spec
    spec = MODEL_ALIASES.get(spec.strip().lower(), spec.strip().lower())
    parts = spec.split(":")
    baseline = parts[0]
    if baseline not in BASELINE_CHOICES:
        raise InputError(f"unknown model '{label}'")
    fix_gamma = None
    fix_delta = None
    for part in parts[1:]:
        if "=" not in part:
            raise InputError(f"bad model option '{part}' in '{label}'")
        key, value = part.split("=", 1)
        try:
            if key == "gamma":
                fix_gamma = float(value)
            elif key == "delta":
                fix_delta = float(value)
            else:
                raise InputError(f"unknown model option '{key}' in '{label}'")
        except ValueError as exc:
            raise InputError(f"bad value in model spec '{label}'") from exc
    return FitConfig(
        baseline=baseline,
        fix_gamma=fix_gamma,
        fit_delta=fix_delta is None,
        delta=fix_delta,
        label=label,
    )


def _dist_report_lines(fit) -> list:
    params = fit.params_dict()
    lines = [
        ("model", "ltp"),
        ("baseline", fit.config.baseline),
        ("param", fit.config.param),
        ("n", fit.n_obs),
        ("n_params", fit.n_params),
        ("mu", params["mu"]),
        ("sigma", params["sigma"]),
        ("gamma", params["gamma"]),
    ]
    if "delta" in params:
        lines.append(("delta", params["delta"]))
    lines += [
        ("loglik", fit.loglik),
        ("aic", fit.aic),
        ("converged", fit.converged),
        ("iterations", fit.iterations),
    ]
    for note in fit.diagnostics:
        lines.append(("diagnostic", note))
    for ci in fit.profile_cis:
        lines += [
            (f"ci_{ci.name}_lower", ci.lower),
            (f"ci_{ci.name}_upper", ci.upper),
            (f"ci_{ci.name}_level", ci.level),
            (f"ci_{ci.name}_lower_open", ci.lower_open),
            (f"ci_{ci.name}_upper_open", ci.upper_open),
        ]
    return lines


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------
def cmd_fit(args) -> int:
    data = read_observations(args.data)
    config = _config_from_args(args)
    try:
        fit = fit_mle(data, config)
    except ValueError as exc:
        raise InputError(f"{args.data}: {exc}") from exc
    for name in _split_names(args.profile_ci):
        try:
            profile_ci(data, fit, name, level=args.ci_level)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    _write_lines(_dist_report_lines(fit), args.out)
    return EXIT_OK if fit.converged else EXIT_NO_CONVERGENCE


def cmd_compare(args) -> int:
    data = read_observations(args.data)
    configs = [_parse_model_spec(spec) for spec in args.model]
    try:
        comparison = compare_models(data, configs)
    except ValueError as exc:
        raise InputError(f"{args.data}: {exc}") from exc
    best = comparison.results[0].aic
    buf = io.StringIO()
    buf.write("model,loglik,k,aic,delta_aic\n")
    for fit in comparison.results:
        buf.write(
            f"{fit.model_label},{fit.loglik:.17g},{fit.n_params},"
            f"{fit.aic:.17g},{fit.aic - best:.17g}\n"
        )
    _write_text(buf.getvalue(), args.out)
    converged = all(f.converged for f in comparison.results)
    return EXIT_OK if converged else EXIT_NO_CONVERGENCE


def cmd_aft(args) -> int:
    covariates = _split_names(args.covariates)
    if not covariates:
        raise InputError("--covariates must name at least one column")
    data, _ = read_aft_table(args.data, covariates)
    config = _config_from_args(args)
    try:
        fit = aft_fit(data, config)
    except ValueError as exc:
        raise InputError(f"{args.data}: {exc}") from exc
    for name in _split_names(args.profile_ci):
        try:
            aft_profile_ci(data, fit, name, level=args.ci_level)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    lines = [
        ("model", "aft"),
        ("baseline", fit.config.baseline),
        ("param", fit.config.param),
        ("n", fit.n_obs),
        ("n_params", fit.n_params),
        ("covariates", ",".join(fit.names)),
    ]
    for name, value in zip(fit.names, fit.params.beta):
        lines.append((f"beta_{name}", value))
    lines += [
        ("sigma", fit.params.sigma),
        ("gamma", fit.params.param.gamma),
    ]
    if fit.params.baseline.has_delta:
        lines.append(("delta", fit.params.baseline.delta))
    centring = args.centring
    constant = fit.centring_mean if centring == "mean" else fit.centring_median
    if constant is None:
        constant = float("nan")
    lines += [
        ("loglik", fit.loglik),
        ("aic", fit.aic),
        ("loglik_time_scale", fit.loglik_time_scale),
        ("aic_time_scale", fit.aic_time_scale),
        ("centring", centring),
        ("centring_constant", constant),
        ("converged", fit.converged),
        ("iterations", fit.iterations),
    ]
    for note in fit.diagnostics:
        lines.append(("diagnostic", note))
    for ci in fit.profile_cis:
        lines += [
            (f"ci_{ci.name}_lower", ci.lower),
            (f"ci_{ci.name}_upper", ci.upper),
            (f"ci_{ci.name}_level", ci.level),
            (f"ci_{ci.name}_lower_open", ci.lower_open),
            (f"ci_{ci.name}_upper_open", ci.upper_open),
        ]
    _write_lines(lines, args.out)
    return EXIT_OK if fit.converged else EXIT_NO_CONVERGENCE


def _aft_fit_from_report(report: dict) -> AftFit:
    for key in ("model", "baseline", "param", "covariates", "sigma", "gamma"):
        if key not in report:
            raise InputError(f"model report is missing '{key}'")
    if report["model"] != "aft":
        raise InputError("prediction requires an AFT model report")
    names = report["covariates"].split(",")
    try:
        beta = [float(report[f"beta_{name}"]) for name in names]
        sigma = float(report["sigma"])
        gamma = float(report["gamma"])
        delta = float(report["delta"]) if "delta" in report else None
        baseline = Baseline(report["baseline"], delta)
        param = EpsilonSkew(gamma) if report["param"] == "eps" else InverseScale(gamma)
        params = AftParams(beta=tuple(beta), sigma=sigma, param=param, baseline=baseline)
    except (KeyError, ValueError) as exc:
        raise InputError(f"malformed model report: {exc}") from exc
    return AftFit.from_params(params, names)


def cmd_predict(args) -> int:
    report = _parse_report(args.model)
    fit = _aft_fit_from_report(report)
    fields, rows = _read_csv_rows(args.subjects)
    if "alive_at" not in fields:
        raise InputError(f"{args.subjects}: missing alive_at column")
    subject_cols = [n for n in fit.names if n != "intercept"]
    missing = [c for c in subject_cols if c not in fields]
    if missing:
        raise InputError(
            f"{args.subjects}: missing covariate columns: {', '.join(missing)}"
        )
    if not rows:
        raise InputError(f"{args.subjects}: no data rows")
    buf = io.StringIO()
    buf.write("id,alive_at,t_lower,t_upper\n")
    curve_query = None
    for line, row in enumerate(rows, start=2):
        where = f"{args.subjects}:{line}"
        sid = (row.get("id") or str(line - 1)).strip()
        alive_at = _float_field(row, "alive_at", where)
        x = [1.0] if "intercept" in fit.names else []
        x += [_float_field(row, c, where) for c in subject_cols]
        try:
            query = RemainingLifeQuery(
                covariates=x, alive_at=alive_at, alpha1=args.alpha1, alpha2=args.alpha2
            )
            interval = prediction_interval(fit, query)
        except (ValueError, ArithmeticError) as exc:
            raise InputError(f"{where}: {exc}") from exc
        buf.write(
            f"{sid},{alive_at:.17g},{interval.lower:.17g},{interval.upper:.17g}\n"
        )
        if args.curve is not None and sid == args.curve:
            curve_query = query
    _write_text(buf.getvalue(), args.out)
    if args.curve is not None:
        if curve_query is None:
            raise InputError(f"subject '{args.curve}' not found in {args.subjects}")
        grid, surv = survival_curve(fit, curve_query)
        cbuf = io.StringIO()
        cbuf.write("t,survival\n")
        for t, s in zip(grid, surv):
            cbuf.write(f"{t:.17g},{s:.17g}\n")
        _write_text(cbuf.getvalue(), args.curve_out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        scenarios = simharness.load_scenarios(args.config, reps=args.reps, seed=args.seed)
    except (OSError, ValueError, KeyError) as exc:
        raise InputError(f"{args.config}: {exc}") from exc
    tables = [simharness.run_scenario(s, threads=args.threads) for s in scenarios]
    buf = io.StringIO()
    simharness.write_summary_csv(tables, buf)
    _write_text(buf.getvalue(), args.out)
    return EXIT_OK


def _parse_grid(spec: str) -> np.ndarray:
    try:
        lo, hi, count = spec.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError as exc:
        raise InputError(f"bad grid spec '{spec}', expected min:max:count") from exc
    if not (0.0 < lo < hi and count >= 2):
        raise InputError(f"bad grid spec '{spec}': need 0 < min < max and count >= 2")
    return np.geomspace(lo, hi, count)


def cmd_hazard(args) -> int:
    if args.model:
        report = _parse_report(args.model)
        if report.get("model") != "ltp":
            raise InputError("hazard curves need a distribution fit report")
        try:
            delta = float(report["delta"]) if "delta" in report else None
            baseline = Baseline(report["baseline"], delta)
            gamma = float(report["gamma"])
            param = EpsilonSkew(gamma) if report["param"] == "eps" else InverseScale(gamma)
            dist = LogTwoPiece(
                float(report["mu"]), float(report["sigma"]), param, baseline
            )
        except (KeyError, ValueError) as exc:
            raise InputError(f"malformed model report: {exc}") from exc
    else:
        try:
            baseline = Baseline(args.baseline, args.delta)
            param = (
                EpsilonSkew(args.gamma) if args.param == "eps" else InverseScale(args.gamma)
            )
            dist = LogTwoPiece(args.mu, args.sigma, param, baseline)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    grid = _parse_grid(args.grid)
    try:
        hazard = dist.hazard(grid)
    except OverflowError as exc:
        raise InputError(f"{exc}; shrink the grid maximum") from exc
    pdf = dist.pdf(grid)
    cdf = dist.cdf(grid)
    buf = io.StringIO()
    buf.write("y,hazard,pdf,cdf\n")
    for y, h, f, c in zip(grid, hazard, pdf, cdf):
        buf.write(f"{y:.17g},{h:.17g},{f:.17g},{c:.17g}\n")
    _write_text(buf.getvalue(), args.out)
    return EXIT_OK


def _split_names(raw: str | None) -> list:
    if not raw:
        return []
    return [part.strip() for part in raw.split(",") if part.strip()]


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------
def _add_fit_flags(sub, with_gamma_fix: bool = True) -> None:
    sub.add_argument("--baseline", choices=BASELINE_CHOICES, default="normal")
    sub.add_argument("--param", choices=("eps", "inv"), default="eps")
    if with_gamma_fix:
        sub.add_argument("--fix-gamma", dest="fix_gamma", type=float, default=None)
        sub.add_argument("--fix-delta", dest="fix_delta", type=float, default=None)
    sub.add_argument("--restarts", type=int, default=3)
    sub.add_argument("--max-iterations", dest="max_iterations", type=int, default=5000)
    sub.add_argument("--tolerance", type=float, default=1e-8)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--profile-ci", dest="profile_ci", default=None,
                     help="comma-separated parameter names")
    sub.add_argument("--ci-level", dest="ci_level", type=float, default=0.147,
                     help="relative-likelihood cut (0.147 ~ 95%%)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ltpsurv",
        description="Survival analysis with log two-piece distributions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a lifetime distribution to censored data")
    p.add_argument("data", help="CSV with time,status columns")
    _add_fit_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("compare", help="rank models by AIC")
    p.add_argument("data")
    p.add_argument("--model", action="append", required=True,
                   help="baseline name, alias (lognormal, logt, loglogistic) "
                        "or baseline:gamma=0 style spec; repeatable")
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("aft", help="fit an accelerated failure time regression")
    p.add_argument("data")
    p.add_argument("--covariates", required=True, help="comma-separated column names")
    _add_fit_flags(p)
    p.add_argument("--centring", choices=("mean", "median"), default="median")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_aft)

    p = sub.add_parser("predict", help="remaining-life prediction intervals")
    p.add_argument("--model", required=True, help="saved AFT fit report")
    p.add_argument("subjects", help="CSV with alive_at and covariate columns")
    p.add_argument("--alpha1", type=float, default=0.05)
    p.add_argument("--alpha2", type=float, default=0.05)
    p.add_argument("--curve", default=None, help="also emit a survival curve for this id")
    p.add_argument("--curve-out", dest="curve_out", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("simulate", help="run Monte-Carlo scenarios from a config file")
    p.add_argument("config")
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("hazard", help="emit (y, hazard, pdf, cdf) grid as CSV")
    p.add_argument("--model", default=None, help="saved distribution fit report")
    p.add_argument("--baseline", choices=BASELINE_CHOICES, default="normal")
    p.add_argument("--param", choices=("eps", "inv"), default="eps")
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--grid", default="0.01:100:200", help="min:max:count, log-spaced")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_hazard)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
