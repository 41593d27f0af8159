"""CCDF, window policy and tail-fit calibration on synthetic samples."""

import numpy as np
import pytest

from exchain.estimators import (
    EmpiricalCCDF,
    WindowPolicy,
    chi_square_pvalue,
    fit_exponential_tail,
    fit_polynomial_tail,
    ks_statistic,
)


def test_ccdf_counts_are_strict():
    c = EmpiricalCCDF([1.0, 2.0, 2.0, 3.0])
    assert c.ccdf(0.5) == 1.0
    assert c.ccdf(1.0) == 0.75
    assert c.ccdf(2.0) == 0.25
    assert c.ccdf(3.0) == 0.0
    np.testing.assert_allclose(c.ccdf(np.array([1.5, 2.5])), [0.75, 0.25])


def test_ccdf_censoring():
    c = EmpiricalCCDF.from_samples([1.0, 2.0, 50.0, 60.0], cap=10.0)
    assert c.n_uncensored == 2
    assert c.censored == 2
    assert c.censored_fraction == 0.5
    # censored mass counts above every t below the cap
    assert c.ccdf(5.0) == 0.5
    assert c.ccdf(1.5) == 0.75


def test_ccdf_rejects_bad_input():
    with pytest.raises(ValueError):
        EmpiricalCCDF([])
    with pytest.raises(ValueError):
        EmpiricalCCDF([1.0, np.inf])
    with pytest.raises(ValueError):
        EmpiricalCCDF([1.0], censored=3)  # cap missing
    with pytest.raises(ValueError):
        EmpiricalCCDF([11.0], censored=1, cap=10.0)


def test_quantile():
    c = EmpiricalCCDF(np.arange(1, 101, dtype=float))
    assert c.quantile(0.10) == 10.0
    assert c.quantile(1.0) == 100.0
    c2 = EmpiricalCCDF.from_samples(np.arange(1, 101, dtype=float), cap=90.5)
    with pytest.raises(ValueError):
        c2.quantile(0.95)


def test_window_policy_bounds():
    rng = np.random.default_rng(2)
    xs = rng.exponential(1.0, size=5000)
    pol = WindowPolicy()
    t_lo, t_hi = pol.window(EmpiricalCCDF(xs))
    assert abs(np.mean(xs <= t_lo) - 0.10) < 0.01
    assert np.sum(xs > t_hi) >= 100
    assert np.sum(xs > t_hi) <= 110


def test_window_stays_below_cap():
    rng = np.random.default_rng(3)
    xs = rng.exponential(1.0, size=20000)
    cap = float(np.quantile(xs, 0.95))
    curve = EmpiricalCCDF.from_samples(xs, cap=cap)
    pol = WindowPolicy()
    t_lo, t_hi = pol.window(curve)
    # plenty of censored mass, so the window runs to the last sample below cap
    assert t_hi < cap
    fit = fit_exponential_tail(curve)
    assert abs(fit.rate - 1.0) < 0.05
    assert fit.t_hi < cap


def test_exponential_recovery():
    rng = np.random.default_rng(5)
    xs = rng.exponential(1.0 / 2.0, size=100000)
    fit = fit_exponential_tail(EmpiricalCCDF(xs))
    assert fit.kind == "exp"
    assert abs(fit.rate - 2.0) / 2.0 < 0.025
    assert fit.r_squared > 0.999
    assert fit.stderr > 0.0


def test_pareto_recovery():
    rng = np.random.default_rng(7)
    # P[X > t] = t^-3 for t >= 1; the default window ends at ccdf 1e-3,
    # t = 10, a hair under one decade, so extend the tail end to keep the
    # decade guard satisfied
    xs = rng.random(100000) ** (-1.0 / 3.0)
    fit = fit_polynomial_tail(EmpiricalCCDF(xs), WindowPolicy(min_tail_count=50))
    assert fit.kind == "power"
    assert abs(fit.exponent - 3.0) < 0.1
    assert fit.r_squared > 0.999


def test_polynomial_fit_requires_a_decade():
    rng = np.random.default_rng(9)
    xs = 1.0 + rng.random(5000)  # support [1, 2): under a decade
    with pytest.raises(ValueError, match="decades"):
        fit_polynomial_tail(EmpiricalCCDF(xs))


def test_explicit_window_overrides_policy():
    rng = np.random.default_rng(11)
    xs = rng.exponential(1.0, size=50000)
    fit = fit_exponential_tail(EmpiricalCCDF(xs), window=(0.5, 4.0))
    assert fit.t_lo == 0.5 and fit.t_hi == 4.0
    assert abs(fit.rate - 1.0) < 0.04


def test_rate_and_exponent_guards():
    rng = np.random.default_rng(13)
    xs = rng.exponential(1.0, size=5000)
    fit = fit_exponential_tail(EmpiricalCCDF(xs))
    with pytest.raises(AttributeError):
        fit.exponent


def test_ks_statistic_calibration():
    rng = np.random.default_rng(15)
    from scipy import stats
    xs = rng.beta(1.0, 2.0, size=100000)
    assert ks_statistic(xs, stats.beta(1, 2).cdf) < 0.006
    # a wrong null is far away
    assert ks_statistic(xs, stats.beta(1, 3).cdf) > 0.05


def test_chi_square_calibration():
    rng = np.random.default_rng(17)
    probs = np.full(10, 0.1)
    counts = np.bincount(rng.integers(0, 10, size=20000), minlength=10)
    assert chi_square_pvalue(counts, probs) > 0.01
    skewed = probs * np.linspace(0.5, 1.5, 10)
    assert chi_square_pvalue(counts, skewed) < 1e-6
    with pytest.raises(ValueError):
        chi_square_pvalue(counts, probs[:5])
