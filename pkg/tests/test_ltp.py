"""Log two-piece distribution tests: lognormal reduction, junction mass,
hazards, moments and the spliced-model identity."""

import numpy as np
import pytest
from scipy import integrate, stats

from ltpsurv.baselines import Baseline
from ltpsurv.ltp import CompositeModel, LogSymmetricDensity, LogTwoPiece
from ltpsurv.twopiece import EpsilonSkew, InverseScale, MomentDivergenceError


def lognormal_like(mu=0.0, sigma=1.0, gamma=0.0):
    return LogTwoPiece(mu, sigma, EpsilonSkew(gamma), Baseline("normal"))


def random_ltp(rng) -> LogTwoPiece:
    kind = str(rng.choice(["normal", "t", "logistic", "laplace", "exppower", "sas"]))
    delta = float(rng.uniform(0.6, 3.0)) if kind in ("t", "exppower", "sas") else None
    mu = float(rng.uniform(-2.0, 3.0))
    sigma = float(rng.uniform(0.4, 1.8))
    if rng.integers(2):
        param = EpsilonSkew(float(rng.uniform(-0.8, 0.8)))
    else:
        param = InverseScale(float(rng.uniform(0.4, 2.5)))
    return LogTwoPiece(mu, sigma, param, Baseline(kind, delta))


def positive_axis_quad(f, upper, junction):
    lo, _ = integrate.quad(f, 0.0, min(junction, upper), limit=300)
    hi = 0.0
    if upper > junction:
        hi, _ = integrate.quad(f, junction, upper, limit=300)
    return lo + hi


# ----------------------------------------------------------------------
# density and CDF
# ----------------------------------------------------------------------
def test_lognormal_reduction_on_log_grid():
    dist = lognormal_like()
    y = np.geomspace(1e-3, 1e3, 200)
    np.testing.assert_allclose(dist.pdf(y), stats.lognorm.pdf(y, 1.0), atol=1e-13)
    np.testing.assert_allclose(dist.cdf(y), stats.lognorm.cdf(y, 1.0), atol=1e-13)


def test_pdf_values():
    assert lognormal_like().pdf(1.0) == pytest.approx(0.3989422804014327, rel=1e-14)
    # chain rule from the two-piece value phi(2) at log y = 1:
    # phi(2)/e = 0.019862166589177676 (50-digit oracle)
    dist = lognormal_like(gamma=0.5)
    assert dist.pdf(np.e) == pytest.approx(0.019862166589177676, rel=1e-13)
    # lognormal-type left tail vanishes at the origin
    assert lognormal_like().pdf(1e-12) < 1e-150
    assert lognormal_like().pdf(1e-30) < lognormal_like().pdf(1e-12)


def test_cdf_junction_and_reduction():
    dist = lognormal_like(mu=1.3, gamma=0.42)
    assert dist.cdf(np.exp(1.3)) == pytest.approx(0.71, abs=1e-14)
    d0 = lognormal_like(mu=0.4, sigma=1.7)
    y = np.geomspace(0.01, 100, 50)
    np.testing.assert_allclose(
        d0.cdf(y), Baseline("normal").cdf((np.log(y) - 0.4) / 1.7), atol=1e-14
    )


def test_cdf_against_positive_axis_quadrature():
    # parameters in the region used for real pulse-interval data
    dist = LogTwoPiece(2.63, 1.39, EpsilonSkew(0.42), Baseline("sas", 1.22))
    want = positive_axis_quad(dist.pdf, 10.0, dist.junction)
    assert dist.cdf(10.0) == pytest.approx(want, abs=1e-10)


def test_density_cdf_consistency_away_from_junction():
    dist = LogTwoPiece(0.5, 0.9, EpsilonSkew(0.3), Baseline("logistic"))
    y = np.geomspace(0.05, 40.0, 120)
    y = y[np.abs(y - dist.junction) > 0.05]
    h = 1e-5 * y
    deriv = (dist.cdf(y + h) - dist.cdf(y - h)) / (2.0 * h)
    np.testing.assert_allclose(deriv, dist.pdf(y), rtol=1e-6)


# ----------------------------------------------------------------------
# survival and hazard
# ----------------------------------------------------------------------
def test_survival_junction_value_and_complement():
    dist = lognormal_like(mu=0.8, gamma=0.5)
    # right mass a/(a+b) = 0.5/2
    assert dist.survival(np.exp(0.8)) == pytest.approx(0.25, abs=1e-14)
    y = np.geomspace(0.01, 100, 80)
    np.testing.assert_allclose(dist.survival(y) + dist.cdf(y), 1.0, atol=1e-14)


def test_far_tail_survival_keeps_relative_accuracy():
    # lognormal reduction at z = 8: survival = Phi(-8), which a 50-digit
    # erfc evaluation puts at 6.2209605742717841e-16
    dist = lognormal_like(mu=1.0, sigma=0.5)
    y = np.exp(1.0 + 8.0 * 0.5)
    assert dist.survival(y) == pytest.approx(6.2209605742717841e-16, rel=1e-12)


def test_hazard_identity_and_limits():
    dist = lognormal_like(mu=0.2, sigma=0.7)
    y = np.geomspace(0.05, 20, 60)
    np.testing.assert_allclose(
        dist.hazard(y) * dist.survival(y), dist.pdf(y), rtol=1e-12
    )
    assert dist.hazard(1e-10) == pytest.approx(0.0, abs=1e-100)


def test_hazard_matches_cumulative_hazard_derivative():
    dist = LogTwoPiece(0.0, 1.0, EpsilonSkew(0.25), Baseline("normal"))
    y = np.geomspace(0.2, 8.0, 40)
    h = 1e-6 * y
    fd = (np.log(dist.survival(y - h)) - np.log(dist.survival(y + h))) / (2.0 * h)
    np.testing.assert_allclose(fd, dist.hazard(y), rtol=1e-6)


def test_hazard_eventually_decreases_for_normal_baseline():
    dist = lognormal_like(mu=0.0, sigma=1.0, gamma=0.4)
    y = np.geomspace(1.0, 1e12, 200)
    y = y[dist.survival(y) > 0.0]
    hz = dist.hazard(y)
    peak = np.argmax(hz)
    assert peak < y.size - 1
    assert np.all(np.diff(hz[peak:]) <= 1e-12)


def test_hazard_raises_on_survival_underflow():
    dist = lognormal_like()
    with pytest.raises(OverflowError):
        dist.hazard(np.exp(45.0))


# ----------------------------------------------------------------------
# quantiles and sampling
# ----------------------------------------------------------------------
def test_quantile_junction_and_median():
    dist = lognormal_like(mu=1.1, gamma=0.3)
    assert dist.quantile(dist.left_mass) == pytest.approx(np.exp(1.1), rel=1e-14)
    d0 = lognormal_like(mu=0.6)
    assert d0.quantile(0.5) == pytest.approx(np.exp(0.6), rel=1e-14)


def test_quantile_round_trip_random_parameters():
    rng = np.random.default_rng(31)
    probs = rng.uniform(1e-4, 1.0 - 1e-4, 20)
    for _ in range(10):
        dist = random_ltp(rng)
        np.testing.assert_allclose(dist.cdf(dist.quantile(probs)), probs, atol=1e-10)


def test_sampling_moments_and_ks():
    dist = LogTwoPiece(0.5, 0.8, EpsilonSkew(0.35), Baseline("normal"))
    draws = dist.sample(np.random.default_rng(17), 100_000)
    assert np.all(draws > 0.0)
    assert np.mean(draws < dist.junction) == pytest.approx(dist.left_mass, abs=0.005)
    assert stats.kstest(draws, dist.cdf).statistic < 0.01


def test_sampling_chi_square_gof():
    dist = LogTwoPiece(0.0, 1.0, EpsilonSkew(-0.25), Baseline("logistic"))
    draws = dist.sample(np.random.default_rng(2718), 100_000)
    edges = dist.quantile(np.linspace(0.02, 0.98, 49))  # 50 equal-mass bins
    counts, _ = np.histogram(draws, bins=np.concatenate([[0.0], edges, [np.inf]]))
    expected = draws.size / 50.0
    statistic = np.sum((counts - expected) ** 2 / expected)
    assert statistic < stats.chi2.ppf(0.999, 49)


# ----------------------------------------------------------------------
# mass ratio and moments
# ----------------------------------------------------------------------
def test_mass_ratio():
    assert lognormal_like().mass_ratio == pytest.approx(1.0, abs=1e-15)
    assert lognormal_like(gamma=0.5).mass_ratio == pytest.approx(3.0, rel=1e-15)
    inv = LogTwoPiece(0.0, 1.0, InverseScale(2.0), Baseline("normal"))
    assert inv.mass_ratio == pytest.approx(0.25, rel=1e-15)


def test_mass_ratio_matches_cdf_odds():
    rng = np.random.default_rng(13)
    for _ in range(20):
        dist = random_ltp(rng)
        cap = dist.cdf(dist.junction)
        assert dist.mass_ratio == pytest.approx(cap / (1.0 - cap), rel=1e-12)


def test_junction_mass_law_random_parameters():
    rng = np.random.default_rng(100)
    for _ in range(100):
        dist = random_ltp(rng)
        lf = dist.param.left_factor
        rf = dist.param.right_factor
        assert dist.cdf(dist.junction) == pytest.approx(lf / (lf + rf), abs=1e-14)


def test_lognormal_mean_closed_form():
    assert lognormal_like().moment(1) == pytest.approx(1.6487212707001282, rel=1e-9)
    # E[Y^2] of a lognormal is exp(2 mu + 2 sigma^2)
    dist = lognormal_like(mu=0.3, sigma=0.6)
    assert dist.moment(2) == pytest.approx(np.exp(0.6 + 2 * 0.36), rel=1e-9)


def test_log_t_has_no_moments():
    for delta in (1.0, 4.0):
        dist = LogTwoPiece(0.0, 1.0, EpsilonSkew(0.2), Baseline("t", delta))
        with pytest.raises(MomentDivergenceError):
            dist.moment(1)


def test_moment_against_monte_carlo_oracle():
    dist = lognormal_like(gamma=0.25)
    draws = dist.sample(np.random.default_rng(55), 10_000_000)
    mc = float(np.mean(draws))
    se = float(np.std(draws)) / np.sqrt(draws.size)
    assert abs(dist.moment(1) - mc) < 3.0 * se


def test_moment_rejects_bad_order():
    with pytest.raises(ValueError):
        lognormal_like().moment(0)


# ----------------------------------------------------------------------
# composite (spliced) form
# ----------------------------------------------------------------------
def test_composite_identity_random_parameters():
    # scale-aware comparison: heavy-tailed members have densities that blow
    # up near the origin, where only relative agreement is meaningful
    rng = np.random.default_rng(42)
    for _ in range(20):
        dist = random_ltp(rng)
        if dist.baseline.kind == "exppower" and dist.baseline.delta < 1.0:
            # cusp at the mode: see test_composite_identity_with_mode_cusp
            dist = LogTwoPiece(
                dist.mu, dist.sigma, dist.param, Baseline("exppower", 1.5)
            )
        comp = CompositeModel.from_log_two_piece(dist)
        y = np.geomspace(dist.quantile(1e-4), dist.quantile(1.0 - 1e-4), 100)
        pdf = dist.pdf(y)
        err = np.abs(comp.pdf(y) - pdf) / np.maximum(1.0, pdf)
        assert np.max(err) < 1e-12


def test_composite_identity_with_mode_cusp():
    # exppower kernels with delta < 1 have unbounded slope at the mode, so
    # the last-ulp rounding of log(exp(mu)) inside the splice weight is
    # amplified to roughly |1e-17| ** delta; the identity still holds to a
    # few parts in 1e-12
    dist = LogTwoPiece(0.2, 0.7, EpsilonSkew(0.3), Baseline("exppower", 0.67))
    comp = CompositeModel.from_log_two_piece(dist)
    y = np.geomspace(dist.quantile(1e-4), dist.quantile(1.0 - 1e-4), 100)
    pdf = dist.pdf(y)
    err = np.abs(comp.pdf(y) - pdf) / np.maximum(1.0, pdf)
    assert np.max(err) < 1e-10


def test_composite_with_equal_components_is_the_common_density():
    part = LogSymmetricDensity(0.4, 0.9, Baseline("logistic"))
    comp = CompositeModel(left=part, right=part, theta=2.0)
    assert comp.omega == pytest.approx(part.cdf(2.0), rel=1e-14)
    y = np.geomspace(0.05, 30, 100)
    np.testing.assert_allclose(comp.pdf(y), part.pdf(y), atol=1e-15)


def test_composite_normalizes():
    dist = LogTwoPiece(0.7, 0.8, EpsilonSkew(-0.4), Baseline("sas", 1.4))
    comp = CompositeModel.from_log_two_piece(dist)
    total = positive_axis_quad(comp.pdf, np.inf, comp.theta)
    assert total == pytest.approx(1.0, abs=1e-9)


def test_composite_degenerate_weight_rejected():
    left = LogSymmetricDensity(0.0, 1.0, Baseline("normal"))
    right = LogSymmetricDensity(0.0, 2.0, Baseline("normal"))
    with pytest.raises(ValueError):
        CompositeModel(left=left, right=right, theta=1e-300)


# ----------------------------------------------------------------------
# domain errors
# ----------------------------------------------------------------------
def test_positive_support_enforced():
    dist = lognormal_like()
    for bad in (0.0, -1.0, np.nan):
        with pytest.raises(ValueError):
            dist.pdf(bad)
        with pytest.raises(ValueError):
            dist.cdf(bad)
    assert dist.cdf(np.inf) == 1.0
    with pytest.raises(ValueError):
        dist.pdf(np.inf)
