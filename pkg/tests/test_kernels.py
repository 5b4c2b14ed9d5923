"""Kernel composition: orderings, dataflow, chains, and serialization."""

import numpy as np
import pytest
from scipy import stats

from dlgibbs import (
    ChainConfig,
    KernelId,
    ParameterError,
    PriorConfig,
    RngStream,
    effective_sample_size,
    hyper_step,
    kernel_step_alternative,
    kernel_step_corrected,
    kernel_step_original,
    prior_draw_hyper,
    prior_draw_hyper_alt,
    run_posterior_chain,
    run_scs,
    update_lambda,
    update_phi,
    update_psi,
    update_tau,
    update_theta,
)
from dlgibbs.kernels import ORDER_CORRECTED, ORDER_ORIGINAL

CFG = PriorConfig(n=5, a=0.5)


def chain_config(**kw):
    base = dict(iterations=2000, burn_in=500, thin=1, seed=11,
                kernel=KernelId.CORRECTED, prior=CFG)
    base.update(kw)
    return ChainConfig(**base)


# ---------------------------------------------------------------------------
# step dataflow: who consumes whose draw
# ---------------------------------------------------------------------------

def test_original_step_psi_uses_incoming_scales():
    # In the published order psi is drawn first, so its draws must coincide
    # with a manual update_psi against the *incoming* (phi, tau) on an
    # identically seeded stream, whatever happens to tau and phi afterwards.
    state = prior_draw_hyper(CFG, RngStream(71))
    theta = np.array([0.4, -1.2, 0.03, 2.2, -0.6])
    stepped = kernel_step_original(state, theta, CFG, RngStream(72))
    manual = update_psi(theta, state.phi * state.tau, RngStream(72))
    assert np.array_equal(stepped.psi, manual)


def test_corrected_step_consumes_this_sweeps_draws():
    # RNG accounting: the corrected step must equal the manual sequence
    # phi -> tau(new phi) -> psi(new phi, new tau) on one shared stream.
    state = prior_draw_hyper(CFG, RngStream(73))
    theta = np.array([0.4, -1.2, 0.03, 2.2, -0.6])
    stepped = kernel_step_corrected(state, theta, CFG, RngStream(74))
    rng = RngStream(74)
    phi, _ = update_phi(theta, CFG, rng)
    tau = update_tau(theta, phi, CFG, rng)
    psi = update_psi(theta, phi * tau, rng)
    assert np.array_equal(stepped.phi, phi)
    assert stepped.tau == tau
    assert np.array_equal(stepped.psi, psi)


def test_original_step_tau_uses_incoming_phi():
    state = prior_draw_hyper(CFG, RngStream(75))
    theta = np.array([0.4, -1.2, 0.03, 2.2, -0.6])
    stepped = kernel_step_original(state, theta, CFG, RngStream(76))
    rng = RngStream(76)
    psi = update_psi(theta, state.phi * state.tau, rng)
    tau = update_tau(theta, state.phi, CFG, rng)  # incoming phi, not this sweep's
    phi, _ = update_phi(theta, CFG, rng)
    assert np.array_equal(stepped.psi, psi)
    assert stepped.tau == tau
    assert np.array_equal(stepped.phi, phi)


def test_alternative_step_matches_manual_blocks():
    state = prior_draw_hyper_alt(CFG, RngStream(77))
    theta = np.array([0.4, -1.2, 0.03, 2.2, -0.6])
    stepped = kernel_step_alternative(state, theta, CFG, RngStream(78))
    rng = RngStream(78)
    lam = update_lambda(theta, CFG, rng)
    psi = update_psi(theta, lam, rng)
    assert np.array_equal(stepped.lam, lam)
    assert np.array_equal(stepped.psi, psi)


def test_hyper_step_rejects_bad_order():
    state = prior_draw_hyper(CFG, RngStream(79))
    with pytest.raises(ParameterError):
        hyper_step(("psi", "psi", "tau"), state, np.ones(5), CFG, RngStream(80))


# ---------------------------------------------------------------------------
# ordering is the only difference
# ---------------------------------------------------------------------------

def test_permuted_corrected_is_original_draw_for_draw():
    # Re-permuting the corrected kernel's blocks back to (psi, tau, phi)
    # reproduces the original kernel bit-for-bit on a shared stream.
    a = run_scs(CFG, KernelId.CORRECTED, 2000, RngStream(81), order=ORDER_ORIGINAL)
    b = run_scs(CFG, KernelId.ORIGINAL, 2000, RngStream(81))
    assert np.array_equal(a.theta, b.theta)
    assert np.array_equal(a.psi, b.psi)
    assert np.array_equal(a.phi, b.phi)
    assert np.array_equal(a.tau, b.tau)
    c = run_scs(CFG, KernelId.CORRECTED, 2000, RngStream(81), order=ORDER_CORRECTED)
    assert not np.array_equal(a.tau, c.tau)


# ---------------------------------------------------------------------------
# full chains
# ---------------------------------------------------------------------------

def test_chain_zero_data_is_symmetric():
    chain = chain_config(iterations=10_000, burn_in=1000, seed=21)
    m = run_posterior_chain(np.zeros(5), chain)
    theta = m.theta().ravel()
    # autocorrelated draws: MC standard error from the effective sample size
    se = theta.std(ddof=1) / np.sqrt(effective_sample_size(theta))
    assert abs(theta.mean()) <= 4.0 * se


def test_chain_determinism_bit_identical():
    chain = chain_config(seed=22)
    y = np.array([0.0, 1.0, -2.0, 5.0, 0.3])
    m1 = run_posterior_chain(y, chain)
    m2 = run_posterior_chain(y, chain)
    assert np.array_equal(m1.rows, m2.rows)
    assert m1.to_csv() == m2.to_csv()


def test_chain_row_count_and_columns():
    chain = chain_config(iterations=1003, burn_in=100, thin=7)
    m = run_posterior_chain(np.zeros(5), chain)
    assert m.rows.shape == ((1003 - 100) // 7, 3 * 5 + 1)
    assert m.names[:2] == ("theta_1", "theta_2")
    assert m.names[-1] == "tau"
    alt = run_posterior_chain(np.zeros(5), chain_config(kernel=KernelId.ALTERNATIVE))
    assert alt.names[-1] == "lambda_5"
    assert alt.rows.shape[1] == 15


def test_chain_strong_signal_mild_shrinkage():
    # y_1 = 50: the posterior mean of theta_1 stays within [45, 50].
    y = np.zeros(10)
    y[0] = 50.0
    chain = chain_config(iterations=30_000, burn_in=2000, seed=23,
                         prior=PriorConfig(n=10, a=0.5))
    m = run_posterior_chain(y, chain)
    assert 45.0 <= m.column("theta_1").mean() <= 50.0


def test_chain_matches_composed_public_ops():
    # One sweep of the compiled driver equals prior draw + update_theta +
    # kernel step composed from the public ops on the same stream.
    y = np.array([0.5, -1.0, 2.0, 0.0, 3.0])
    chain = chain_config(iterations=1, burn_in=0, seed=24)
    m = run_posterior_chain(y, chain, RngStream(24))
    rng = RngStream(24)
    state = prior_draw_hyper(CFG, rng)
    theta = update_theta(y, state, rng)
    nxt = kernel_step_corrected(state, theta, CFG, rng)
    want = np.concatenate([theta, nxt.psi, nxt.phi, [nxt.tau]])
    assert np.array_equal(m.rows[0], want)


def test_chain_config_validation():
    with pytest.raises(ParameterError):
        chain_config(iterations=100, burn_in=100)
    with pytest.raises(ParameterError):
        chain_config(thin=0)


# ---------------------------------------------------------------------------
# stationarity of the correct kernels (no-data sweep preserves the prior)
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("kernel", [KernelId.CORRECTED, KernelId.ALTERNATIVE])
def test_no_data_sweep_preserves_prior_tau(kernel):
    draws = run_scs(CFG, kernel, 100_000, RngStream(25))
    tau = draws.tau[::3]  # light thinning; the kernels mix fast at n=5
    d = stats.kstest(tau, stats.gamma(2.5, scale=2.0).cdf).statistic
    assert d < 0.01


def test_original_kernel_breaks_prior_tau():
    draws = run_scs(CFG, KernelId.ORIGINAL, 100_000, RngStream(26))
    d = stats.kstest(draws.tau[::3], stats.gamma(2.5, scale=2.0).cdf).statistic
    assert d > 0.01


# ---------------------------------------------------------------------------
# cross-kernel agreement on real data
# ---------------------------------------------------------------------------

def test_corrected_and_alternative_agree_on_posterior_means():
    n = 100
    rng = np.random.default_rng(3)
    truth = np.zeros(n)
    truth[:5] = 5.0
    y = truth + rng.standard_normal(n)
    prior = PriorConfig(n=n, a=0.5)
    means, ses = {}, {}
    for kernel in (KernelId.CORRECTED, KernelId.ALTERNATIVE):
        chain = ChainConfig(iterations=25_000, burn_in=2500, thin=1, seed=27,
                            kernel=kernel, prior=prior)
        m = run_posterior_chain(y, chain, RngStream(27, 1 + (kernel == KernelId.ALTERNATIVE)))
        theta = m.theta()
        means[kernel] = theta.mean(axis=0)
        ess = np.array([effective_sample_size(theta[:, j]) for j in range(n)])
        ses[kernel] = theta.std(axis=0, ddof=1) / np.sqrt(ess)
    diff = np.abs(means[KernelId.CORRECTED] - means[KernelId.ALTERNATIVE])
    combined = np.sqrt(ses[KernelId.CORRECTED] ** 2 + ses[KernelId.ALTERNATIVE] ** 2)
    assert np.all(diff <= 3.0 * combined)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_sample_matrix_csv_round_trip_exact():
    chain = chain_config(iterations=300, burn_in=100, seed=28)
    m = run_posterior_chain(np.array([0.1, -2.0, 7.0, 0.0, 1e-9]), chain)
    text = m.to_csv()
    lines = text.strip().split("\n")
    assert lines[0].split(",") == list(m.names)
    parsed = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert np.array_equal(parsed, m.rows)


def test_sample_matrix_column_lookup():
    chain = chain_config(iterations=300, burn_in=100)
    m = run_posterior_chain(np.zeros(5), chain)
    assert np.array_equal(m.column("tau"), m.rows[:, -1])
    with pytest.raises(KeyError):
        m.column("missing")
