import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isac_dfs.channel import apply_cfo
from isac_dfs.core import Mode, OfdmConfig, PreambleSpec, RngStream
from isac_dfs.estimator import (CorrelationSet, NoEstimateError, compensate, correlate, crlb,
                                estimate_pipeline, fine_estimate, generate_preamble,
                                log_likelihood, preamble_window, resolve_alias, total_estimate,
                                total_range)
from isac_dfs.harness import simulate_frame
from isac_dfs.channel import ChannelConfig

from conftest import random_periodic

L3 = 42  # with N = 126 the ratio is exactly 3


def window_r3(eps, seed=0):
    x = random_periodic(L3, np.random.default_rng(seed))
    return apply_cfo(x, eps, 3 * L3)


def test_preamble_exact_period_without_pad():
    cfg = OfdmConfig(n_subcarriers=126, cp_len=14)
    body = generate_preamble(cfg)[cfg.cp_len:]
    assert body.size == 126
    np.testing.assert_array_equal(body[:84], body[42:])


def test_preamble_default_layout(cfg):
    pre = generate_preamble(cfg)
    body = pre[cfg.cp_len:]
    np.testing.assert_array_equal(body[:84], body[42:126])
    np.testing.assert_array_equal(body[126:], 0)
    np.testing.assert_array_equal(pre[:cfg.cp_len], body[-cfg.cp_len:])
    assert np.mean(np.abs(body[:126]) ** 2) == pytest.approx(1 / 128)
    np.testing.assert_array_equal(pre, generate_preamble(OfdmConfig()))


def test_preamble_too_long():
    with pytest.raises(ValueError):
        generate_preamble(OfdmConfig(preamble=PreambleSpec(block_len=43)))


def test_compensate_properties(rng):
    x = rng.standard_normal(200) + 1j * rng.standard_normal(200)
    np.testing.assert_allclose(compensate(apply_cfo(x, 0.7, 128), 0.7, 128), x, atol=1e-12)
    np.testing.assert_array_equal(compensate(x, 0.0, 128), x)
    np.testing.assert_allclose(compensate(compensate(x, 0.2, 128), -0.45, 128),
                               compensate(x, -0.25, 128), atol=1e-12)


def test_correlate_zero_residual():
    c = correlate(window_r3(0.0), L3)
    assert abs(c.phi1.imag) < 1e-12 and c.phi1.real > 0
    assert abs(c.phi2.imag) < 1e-12 and c.phi2.real > 0


@pytest.mark.parametrize("eps", [0.3, -0.7, 1.1])
def test_correlate_phase_law(eps):
    c = correlate(window_r3(eps), L3)
    for m, phi in ((1, c.phi1), (2, c.phi2)):
        expect = -2 * math.pi * eps * m / 3
        assert np.angle(phi * np.exp(-1j * expect)) == pytest.approx(0.0, abs=1e-12)


def test_correlate_zero_input_and_short():
    c = correlate(np.zeros(126), L3)
    assert c.phi1 == 0 and c.phi2 == 0 and c.gamma == 0
    with pytest.raises(NoEstimateError):
        fine_estimate(c, 3)
    with pytest.raises(ValueError, match="shorter"):
        correlate(np.zeros(100), L3)


def test_fine_closed_form_values():
    assert fine_estimate(CorrelationSet(84.0, 42.0, 126.0), 3) == 0.0
    c = CorrelationSet(84 * np.exp(-0.2j * np.pi), 42 * np.exp(-0.4j * np.pi), 126.0)
    assert fine_estimate(c, 3) == pytest.approx(0.3, abs=1e-12)
    assert fine_estimate(correlate(window_r3(0.3), L3), 3) == pytest.approx(0.3, abs=1e-12)


def test_fine_range_edge_and_wrap():
    assert fine_estimate(correlate(window_r3(1.49), L3), 3) == pytest.approx(1.49, abs=1e-9)
    assert fine_estimate(correlate(window_r3(1.51), L3), 3) == pytest.approx(-1.49, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(-1.45, 1.45), st.integers(0, 2**31))
def test_shift_equivariance(eps, seed):
    assert fine_estimate(correlate(window_r3(eps, seed), L3), 3) == pytest.approx(eps, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_cauchy_schwarz(seed):
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(126) + 1j * rng.standard_normal(126)
    c = correlate(y, L3)
    assert abs(c.phi1) <= c.gamma and abs(c.phi2) <= c.gamma


def test_total_estimate():
    assert total_estimate(0.0, 0.0) == 0.0
    assert total_estimate(1 / 24, 0.01) == pytest.approx(0.051667, abs=1e-6)
    assert total_estimate(1 / 24, 0.01) == pytest.approx(1 / 24 + 0.01, abs=1e-10)


def test_log_likelihood_grid_oracle():
    w = window_r3(0.4321, 3)
    grid = np.arange(-1.5, 1.5, 1e-4)
    lam = log_likelihood(w, grid, L3, 3)
    assert abs(grid[np.argmax(lam)] - fine_estimate(correlate(w, L3), 3)) <= 1e-4


def test_log_likelihood_phase_and_rho_invariance():
    w = window_r3(-0.6, 4)
    grid = np.linspace(-1.5, 1.5, 301)
    a = log_likelihood(w, grid, L3, 3, rho=0.5)
    b = log_likelihood(w * np.exp(1.3j), grid, L3, 3, rho=0.5)
    np.testing.assert_allclose(a, b, atol=1e-9)
    c = log_likelihood(w, grid, L3, 3, rho=0.0)
    assert np.argmax(a) == np.argmax(c)
    np.testing.assert_allclose(a - c, a[0] - c[0])


def test_crlb():
    assert crlb(42, 100.0) == pytest.approx(3.619e-5, abs=1e-8)
    assert crlb(42, 200.0) == pytest.approx(crlb(42, 100.0) / 2)
    assert crlb(42, 1e12) < 1e-14
    with pytest.raises(ValueError):
        crlb(42, 0.0)
    with pytest.raises(ValueError):
        crlb(0, 1.0)


def test_total_range_default(cfg):
    assert total_range(cfg) == pytest.approx(64 / 42)


def _frame(cfg, eps, snr, seed=0):
    return simulate_frame(cfg, ChannelConfig(), eps, snr, RngStream(seed, 0).generator())


@pytest.mark.parametrize("eps", [0.0, 0.25, -0.9, 1.2, 1.4, -1.5])
def test_pipeline_noiseless_exact(cfg, eps):
    fr = _frame(cfg, eps, math.inf)
    rec = estimate_pipeline(fr.rx, cfg, fr.burst, eps_true=eps)
    assert abs(rec.error) < 1e-9
    assert rec.eps_total == rec.eps_coarse + rec.eps_fine


def test_pipeline_coarse_only(cfg):
    fr = _frame(cfg, 0.2, math.inf)
    rec = estimate_pipeline(fr.rx, cfg, fr.burst, Mode.COARSE_ONLY)
    assert rec.eps_fine == 0.0
    assert abs(rec.eps_total - 0.2) <= cfg.doppler_bin / 2


def test_pipeline_within_ten_sigma_at_20db(cfg):
    bound = 10 * math.sqrt(crlb(42, 100.0))
    for seed in range(20):
        fr = _frame(cfg, 0.25, 20.0, seed)
        assert abs(estimate_pipeline(fr.rx, cfg, fr.burst).eps_total - 0.25) < bound


def test_preamble_window_offset(cfg):
    pre = generate_preamble(cfg)
    np.testing.assert_array_equal(preamble_window(pre, cfg),
                                  pre[cfg.cp_len:cfg.cp_len + 126])


def test_resolve_alias(cfg):
    a = 128 / 144
    assert resolve_alias(-0.378, 1.4, cfg) == pytest.approx(-0.378 + 2 * a)
    assert resolve_alias(0.1, 0.13, cfg) == 0.1
    assert resolve_alias(0.3, -0.55, cfg) == pytest.approx(0.3 - a)


def test_coarse_only_aliases_beyond_symbol_rate(cfg):
    fr = _frame(cfg, 1.2, math.inf)
    rec = estimate_pipeline(fr.rx, cfg, fr.burst, Mode.COARSE_ONLY)
    assert abs(rec.eps_total - (1.2 - 128 / 144)) <= cfg.doppler_bin / 2
