"""Correctness harness: simulators, KS machinery, ESS, QQ series, reports."""

import numpy as np
import pytest
from scipy import stats

from dlgibbs import (
    BUILTIN_TEST_FUNCTIONS,
    PRIOR_REDRAW,
    KernelId,
    ParameterError,
    PriorConfig,
    RngStream,
    TestFunction,
    effective_sample_size,
    geweke_report,
    ks_two_sample,
    qq_points,
    run_mcs,
    run_scs,
)

CFG = PriorConfig(n=5, a=0.5)


# ---------------------------------------------------------------------------
# ks_two_sample
# ---------------------------------------------------------------------------

def brute_force_ks(x, y):
    """O(n m) oracle: evaluate both empirical CDFs at every pooled point."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    best = 0.0
    for t in np.concatenate([x, y]):
        fx = np.mean(x <= t)
        fy = np.mean(y <= t)
        best = max(best, abs(fx - fy))
    return best


def test_ks_identical_samples():
    x = np.array([3.0, 1.0, 2.0, 2.0])
    assert ks_two_sample(x, x.copy()).statistic == 0.0


def test_ks_disjoint_supports():
    assert ks_two_sample([1.0, 2.0, 3.0], [10.0, 11.0]).statistic == 1.0


def test_ks_small_example_matches_brute_force_exactly():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    y = np.array([1.5, 2.5])
    assert ks_two_sample(x, y).statistic == brute_force_ks(x, y)


def test_ks_random_samples_match_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(25):
        x = rng.standard_normal(rng.integers(1, 40))
        y = rng.standard_normal(rng.integers(1, 40)) * 1.5
        if rng.random() < 0.3:  # exercise ties
            y = np.round(y, 1)
            x = np.round(x, 1)
        assert ks_two_sample(x, y).statistic == pytest.approx(brute_force_ks(x, y), abs=1e-15)


def test_ks_symmetry():
    rng = np.random.default_rng(8)
    x = rng.standard_normal(500)
    y = rng.standard_normal(300) + 0.2
    assert ks_two_sample(x, y).statistic == ks_two_sample(y, x).statistic


def test_ks_p_value_uses_effective_sizes():
    rng = np.random.default_rng(9)
    x = rng.standard_normal(5000)
    y = rng.standard_normal(5000) + 0.15
    full = ks_two_sample(x, y)
    shrunk = ks_two_sample(x, y, ess_x=500.0, ess_y=500.0)
    assert shrunk.statistic == full.statistic
    assert shrunk.p_value > full.p_value  # fewer effective points, less evidence


def test_ks_empty_raises():
    with pytest.raises(ParameterError):
        ks_two_sample([], [1.0])


# ---------------------------------------------------------------------------
# effective_sample_size
# ---------------------------------------------------------------------------

def test_ess_iid_close_to_n():
    x = np.random.default_rng(11).standard_normal(100_000)
    assert abs(effective_sample_size(x) - 100_000) / 100_000 < 0.10


def test_ess_ar1_matches_integrated_autocorrelation_time():
    # AR(1), coefficient 0.9: tau_int = (1 + rho)/(1 - rho) = 19.
    rng = np.random.default_rng(12)
    n = 200_000
    x = np.empty(n)
    x[0] = rng.standard_normal()
    eps = rng.standard_normal(n)
    for t in range(1, n):
        x[t] = 0.9 * x[t - 1] + eps[t]
    want = n / 19.0
    assert abs(effective_sample_size(x) - want) / want < 0.25


def test_ess_alternating_capped_at_n():
    x = np.tile([1.0, -1.0], 500)
    assert effective_sample_size(x) == 1000.0


def test_ess_constant_returns_n_with_flag():
    with pytest.warns(RuntimeWarning):
        assert effective_sample_size(np.full(50, 3.3)) == 50.0


def test_ess_short_input_raises():
    with pytest.raises(ParameterError):
        effective_sample_size(np.arange(5.0))


# ---------------------------------------------------------------------------
# qq_points
# ---------------------------------------------------------------------------

def test_qq_identical_samples_on_diagonal():
    x = np.random.default_rng(13).standard_normal(1000)
    pts = qq_points(x, x.copy(), 19)
    assert np.array_equal(pts[:, 1], pts[:, 2])
    assert np.array_equal(pts[:, 0], np.arange(1, 20) / 20.0)


def test_qq_scaling_slope_two():
    x = np.random.default_rng(14).standard_normal(5000)
    pts = qq_points(x, 2.0 * x, 33)
    assert np.allclose(pts[:, 2], 2.0 * pts[:, 1], rtol=1e-12)


def test_qq_uniform_square_map():
    x = np.random.default_rng(15).random(200_000)
    pts = qq_points(x, x ** 2, 9)
    # quantile map q -> q^2, up to empirical-quantile interpolation error
    assert np.allclose(pts[:, 2], pts[:, 1] ** 2, atol=0.01)


def test_qq_monotone_columns():
    rng = np.random.default_rng(16)
    pts = qq_points(rng.standard_normal(500), rng.standard_normal(700), 25)
    assert np.all(np.diff(pts[:, 1]) >= 0.0)
    assert np.all(np.diff(pts[:, 2]) >= 0.0)


def test_qq_validation_errors():
    with pytest.raises(ParameterError):
        qq_points([1.0], [2.0], 1)
    with pytest.raises(ParameterError):
        qq_points([], [1.0], 5)


# ---------------------------------------------------------------------------
# simulators
# ---------------------------------------------------------------------------

def test_mcs_tau_marginal_and_independence():
    draws = run_mcs(CFG, 250_000, RngStream(91))
    d = stats.kstest(draws.tau, stats.gamma(2.5, scale=2.0).cdf).statistic
    assert d < 0.005
    tau = draws.tau - draws.tau.mean()
    lag1 = float(tau[1:] @ tau[:-1] / (tau @ tau))
    assert abs(lag1) < 4.0 / np.sqrt(250_000)


def test_mcs_theta_marginal_matches_two_stage_oracle():
    draws = run_mcs(CFG, 200_000, RngStream(92))
    g = np.random.default_rng(19)
    psi = g.exponential(2.0, size=200_000)
    phi1 = g.dirichlet([0.5] * 5, size=200_000)[:, 0]
    tau = g.gamma(2.5, 2.0, size=200_000)
    oracle = g.standard_normal(200_000) * np.sqrt(psi) * phi1 * tau
    assert stats.ks_2samp(draws.theta[:, 0], oracle).statistic < 0.0065


def test_scs_corrected_aligns_with_mcs():
    report = geweke_report(CFG, KernelId.CORRECTED, 100_000, seed=93)
    assert report.min_adjusted_p() > 0.01


def test_scs_alternative_aligns_with_mcs():
    report = geweke_report(CFG, KernelId.ALTERNATIVE, 100_000, seed=94)
    assert report.min_adjusted_p() > 0.01
    names = [r.function for r in report.results]
    assert "lambda_1_over_sum" in names and "sum_lambda" in names


def test_scs_original_misaligns():
    report = geweke_report(CFG, KernelId.ORIGINAL, 100_000, seed=95)
    assert report.min_adjusted_p() < 1e-3


def test_prior_redraw_stub_calibrates_the_harness():
    report = geweke_report(CFG, PRIOR_REDRAW, 100_000, seed=96)
    assert report.min_adjusted_p() > 0.01


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------

def test_report_deterministic_and_csv_schema():
    r1 = geweke_report(CFG, KernelId.CORRECTED, 20_000, seed=97)
    r2 = geweke_report(CFG, KernelId.CORRECTED, 20_000, seed=97)
    assert r1.to_summary_csv() == r2.to_summary_csv()
    assert r1.to_qq_csv() == r2.to_qq_csv()
    header = r1.to_summary_csv().splitlines()[0]
    assert header == "function,ks,ess_mcs,ess_scs,p_adj"
    qq_lines = r1.to_qq_csv().splitlines()
    assert qq_lines[0] == "function,prob,q_mcs,q_scs"
    assert len(qq_lines) == 1 + 5 * 99  # five built-ins, 99-point grid


def test_report_bonferroni_adjustment():
    report = geweke_report(CFG, KernelId.CORRECTED, 20_000, seed=98)
    for r in report.results:
        assert 0.0 <= r.p_adj <= 1.0
    single = geweke_report(CFG, KernelId.CORRECTED, 20_000, seed=98,
                           test_functions=BUILTIN_TEST_FUNCTIONS[:1])
    joint = report.results[0].p_adj
    assert joint == pytest.approx(min(1.0, 5.0 * single.results[0].p_adj / 1.0), rel=1e-12)


def test_report_user_extension_function():
    extra = TestFunction("max_psi", lambda d: d.psi.max(axis=1))
    report = geweke_report(CFG, KernelId.CORRECTED, 20_000, seed=99,
                           test_functions=BUILTIN_TEST_FUNCTIONS + (extra,))
    assert "max_psi" in [r.function for r in report.results]


def test_report_qq_series_monotone():
    report = geweke_report(CFG, KernelId.ORIGINAL, 20_000, seed=100)
    for r in report.results:
        assert np.all(np.diff(r.qq[:, 1]) >= 0.0)
        assert np.all(np.diff(r.qq[:, 2]) >= 0.0)


def test_run_scs_rejects_bad_m():
    with pytest.raises(ParameterError):
        run_scs(CFG, KernelId.CORRECTED, 0, RngStream(1))
