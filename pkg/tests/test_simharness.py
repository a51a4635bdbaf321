"""Monte-Carlo harness tests: summary arithmetic, determinism, scenario
parsing and small consistency runs."""

import io
import textwrap

import numpy as np
import pytest

from ltpsurv.simharness import (
    Scenario,
    SummaryTable,
    load_scenarios,
    run_distribution_scenario,
    run_regression_scenario,
    run_scenario,
    summarize,
    write_summary_csv,
)


# ----------------------------------------------------------------------
# summarize
# ----------------------------------------------------------------------
def test_summarize_constant_estimates():
    est = np.tile([1.0, 2.0], (40, 1))
    rows = summarize(est, [1.0, 2.0], ["a", "b"], "s", 100)
    for row in rows:
        assert row.bias == 0.0 and row.variance == 0.0 and row.rmse == 0.0


def test_summarize_two_point_spread():
    d = 0.37
    est = np.array([[2.0 - d], [2.0 + d]])
    (row,) = summarize(est, [2.0], ["a"], "s", 10)
    assert row.bias == pytest.approx(0.0, abs=1e-15)
    assert row.variance == pytest.approx(d * d, rel=1e-12)
    assert row.rmse == pytest.approx(d, rel=1e-12)


def test_summarize_against_independent_recomputation():
    rng = np.random.default_rng(50)
    est = rng.normal(3.0, 0.4, (1000, 4))
    truth = np.array([2.9, 3.0, 3.1, 3.2])
    rows = summarize(est, truth, list("abcd"), "s", 250)
    for j, row in enumerate(rows):
        # spreadsheet-style recomputation: explicit running sums
        s1 = sum(est[i, j] for i in range(1000))
        s2 = sum(est[i, j] ** 2 for i in range(1000))
        mean = s1 / 1000.0
        var = s2 / 1000.0 - mean * mean
        bias = mean - truth[j]
        assert row.bias == pytest.approx(bias, abs=1e-12)
        assert row.variance == pytest.approx(var, abs=1e-12)
        assert row.rmse == pytest.approx(np.sqrt(bias**2 + var), abs=1e-12)


def test_rmse_identity_holds_exactly():
    rng = np.random.default_rng(51)
    est = rng.normal(0.0, 2.0, (333, 3))
    rows = summarize(est, [0.1, -0.2, 0.0], list("xyz"), "s", 30)
    for row in rows:
        assert abs(row.rmse**2 - (row.bias**2 + row.variance)) < 1e-10


# ----------------------------------------------------------------------
# scenarios
# ----------------------------------------------------------------------
def small_distribution_scenario(**kw):
    base = dict(
        name="toy",
        kind="distribution",
        baseline="normal",
        gamma=0.25,
        sample_sizes=(60,),
        replications=10,
        seed=7,
        restarts=1,
    )
    base.update(kw)
    return Scenario(**base)


def test_distribution_scenario_is_deterministic():
    s = small_distribution_scenario()
    a = run_distribution_scenario(s)
    b = run_distribution_scenario(s)
    for ra, rb in zip(a.rows, b.rows):
        assert ra == rb


def test_zero_noise_sanity_for_location_and_scale():
    # with sigma ~ 0 the location and scale estimates collapse onto the
    # truth; the skewness estimate keeps O(1/sqrt(n)) sampling noise
    # regardless of sigma, so only mu and sigma concentrate
    s = small_distribution_scenario(sigma=1e-6, gamma=0.0, replications=20,
                                    sample_sizes=(100,))
    table = run_distribution_scenario(s)
    assert abs(table.cell("mu", 100).bias) < 1e-4
    assert abs(table.cell("sigma", 100).bias) < 1e-4
    assert abs(table.cell("gamma", 100).bias) < 0.2


def test_regression_scenario_reports_censoring():
    s = Scenario(
        name="reg",
        kind="regression",
        baseline="normal",
        beta=(1.0, 2.0, 3.0),
        sigma=0.25,
        gamma=0.0,
        censor_above=17.5,
        sample_sizes=(80,),
        replications=8,
        seed=11,
        restarts=1,
    )
    table = run_regression_scenario(s)
    frac = table.cell("censoring_fraction", 80)
    assert 0.10 <= frac.bias <= 0.40  # mean censoring fraction
    names = {row.parameter for row in table.rows}
    assert names == {"beta1", "beta2", "beta3", "sigma", "gamma", "censoring_fraction"}


def test_regression_consistency_at_large_n():
    s = Scenario(
        name="reg-big",
        kind="regression",
        baseline="normal",
        beta=(1.0, 2.0, 3.0),
        sigma=0.25,
        gamma=0.0,
        censor_above=17.5,
        sample_sizes=(5000,),
        replications=50,
        seed=20260809,
        restarts=1,
    )
    table = run_regression_scenario(s)
    assert abs(table.cell("beta2", 5000).bias) < 0.01
    assert table.cell("beta2", 5000).n_failed == 0


def test_run_scenario_dispatch_and_validation():
    with pytest.raises(ValueError):
        Scenario(name="x", kind="weird")
    with pytest.raises(ValueError):
        Scenario(name="x", kind="distribution", replications=0)
    s = small_distribution_scenario(replications=2)
    assert run_scenario(s).rows


# ----------------------------------------------------------------------
# config files and CSV output
# ----------------------------------------------------------------------
def test_load_scenarios_roundtrip(tmp_path):
    cfg = tmp_path / "study.cfg"
    cfg.write_text(textwrap.dedent("""
        [dist_a]
        kind = distribution
        baseline = sas
        delta = 0.75
        gamma = 0.5
        sample_sizes = 30, 50
        replications = 12
        seed = 99

        [reg_b]
        kind = regression
        baseline = normal
        beta = 1, 2, 3
        sigma = 0.25
        censor_above = 17.5
        sample_sizes = 100
        replications = 7
        seed = 5
    """))
    scenarios = load_scenarios(cfg)
    assert [s.name for s in scenarios] == ["dist_a", "reg_b"]
    a, b = scenarios
    assert a.baseline == "sas" and a.delta == 0.75 and a.sample_sizes == (30, 50)
    assert a.replications == 12
    assert b.kind == "regression" and b.censor_above == 17.5 and b.beta == (1.0, 2.0, 3.0)
    # overrides
    over = load_scenarios(cfg, reps=3, seed=1)
    assert all(s.replications == 3 and s.seed == 1 for s in over)
    with pytest.raises(FileNotFoundError):
        load_scenarios(tmp_path / "missing.cfg")


def test_csv_output_format():
    s = small_distribution_scenario(replications=3)
    table = run_scenario(s)
    buf = io.StringIO()
    write_summary_csv(table, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "scenario,parameter,n,bias,variance,rmse,n_failed"
    assert len(lines) == 1 + len(table.rows)
    first = lines[1].split(",")
    assert first[0] == "toy" and first[1] == "mu" and first[2] == "60"
    float(first[3]); float(first[4]); float(first[5]); int(first[6])


def test_single_replicate_has_zero_variance():
    s = small_distribution_scenario(replications=1)
    table = run_scenario(s)
    for row in table.rows:
        assert row.variance == 0.0
        assert row.rmse == abs(row.bias)
