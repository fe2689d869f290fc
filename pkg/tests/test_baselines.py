import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isac_dfs.baselines import (PilotSpec, cpbe_estimate, estimator_ranges, moose_estimate,
                                moose_training_symbol, psa_estimate)
from isac_dfs.channel import ChannelConfig, PathSpec, apply_cfo, apply_channel
from isac_dfs.core import OfdmConfig
from isac_dfs.ofdm import ofdm_demodulate, ofdm_modulate, qam_map

CFG = OfdmConfig()


def moose_rx(eps, scale=1.0):
    return scale * apply_cfo(moose_training_symbol(CFG), eps, 128)[CFG.cp_len:]


def data_symbols(n, seed=0):
    rng = np.random.default_rng(seed)
    return qam_map(rng.integers(0, 2, n * 512), 16).reshape(n, 128)


def cpbe_rx(eps, n=1, seed=0):
    return apply_cfo(ofdm_modulate(data_symbols(n, seed), CFG).ravel(), eps, 128)


def psa_pair(eps, same=True, seed=0):
    p = PilotSpec()
    S = data_symbols(2, seed)
    if same:
        S[1] = S[0]
    S[:, p.indices] = p.values
    rx = apply_cfo(ofdm_modulate(S, CFG).ravel(), eps, 128)
    Y = ofdm_demodulate(rx.reshape(2, 144), CFG)
    return Y[0], Y[1], p


def test_moose_values():
    assert moose_estimate(moose_rx(0.0), 128) == pytest.approx(0.0, abs=1e-12)
    assert moose_estimate(moose_rx(0.25), 128) == pytest.approx(0.25, abs=1e-10)
    assert moose_estimate(moose_rx(1.2), 128) == pytest.approx(-0.8, abs=1e-10)


def test_moose_errors():
    with pytest.raises(ValueError):
        moose_estimate(np.ones(10), 128)
    with pytest.raises(ValueError):
        moose_estimate(np.zeros(128), 128)


def test_cpbe_values():
    assert cpbe_estimate(cpbe_rx(0.0), CFG) == pytest.approx(0.0, abs=1e-12)
    assert cpbe_estimate(cpbe_rx(0.1), CFG) == pytest.approx(0.1, abs=1e-10)
    assert cpbe_estimate(cpbe_rx(0.1, n=4), CFG) == pytest.approx(0.1, abs=1e-10)
    assert cpbe_estimate(cpbe_rx(0.6), CFG) == pytest.approx(-0.4, abs=1e-10)


def test_cpbe_errors():
    with pytest.raises(ValueError):
        cpbe_estimate(np.ones(100), CFG)
    with pytest.raises(ValueError):
        cpbe_estimate(np.zeros(144), CFG)


def test_cpbe_multipath_error_floor():
    # second path spills the previous symbol into the CP; the per-realization
    # error is nonzero even without noise, and averages out over trials
    ch = ChannelConfig(paths=(PathSpec(1.0, 0), PathSpec(0.5, 6)), doppler=0.1)
    clean = ChannelConfig(doppler=0.1)
    errs, errs_clean = [], []
    for seed in range(200):
        x = ofdm_modulate(data_symbols(4, seed), CFG).ravel()
        y = apply_channel(x, ch, 128)[0, 0][144:]
        errs.append(cpbe_estimate(y, CFG) - 0.1)
        errs_clean.append(cpbe_estimate(apply_channel(x, clean, 128)[0, 0][144:], CFG) - 0.1)
    errs = np.asarray(errs)
    assert np.max(np.abs(errs_clean)) < 1e-10
    assert np.sqrt(np.mean(errs ** 2)) > 1e-3
    assert abs(errs.mean()) < 3 * errs.std() / math.sqrt(errs.size)


def test_psa_values():
    assert psa_estimate(*psa_pair(0.0), CFG) == pytest.approx(0.0, abs=1e-12)
    assert psa_estimate(*psa_pair(0.2), CFG) == pytest.approx(0.2, abs=1e-9)
    # 0.5 * 144/128 cycles wraps to -0.4375 cycles
    assert psa_estimate(*psa_pair(0.5), CFG) == pytest.approx(-0.4375 * 128 / 144, abs=1e-9)


def test_psa_leakage_from_differing_data_is_small():
    est = psa_estimate(*psa_pair(0.2, same=False), CFG)
    assert 0 < abs(est - 0.2) < 0.05


def test_pilot_spec():
    p = PilotSpec()
    assert p.indices.size == 16 and p.indices.max() < 128
    np.testing.assert_allclose(np.abs(p.values), 1.0)
    with pytest.raises(ValueError):
        PilotSpec(stride=8, n_subcarriers=0)


def test_ranges_ordered():
    r = estimator_ranges(CFG)
    assert r["psa"] == pytest.approx(128 / 288)
    assert r["psa"] < r["cpbe"] < r["moose"] < r["fine"]


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 100), st.floats(-math.pi, math.pi), st.floats(-0.4, 0.4))
def test_scale_invariance(mag, phase, eps):
    g = mag * np.exp(1j * phase)
    assert moose_estimate(g * moose_rx(eps), 128) == pytest.approx(
        moose_estimate(moose_rx(eps), 128), abs=1e-10)
    assert cpbe_estimate(g * cpbe_rx(eps), CFG) == pytest.approx(
        cpbe_estimate(cpbe_rx(eps), CFG), abs=1e-10)
    Y1, Y2, p = psa_pair(eps)
    assert psa_estimate(g * Y1, g * Y2, p, CFG) == pytest.approx(
        psa_estimate(Y1, Y2, p, CFG), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.floats(-0.99, 0.99))
def test_moose_shift_equivariant(eps):
    assert moose_estimate(moose_rx(eps), 128) == pytest.approx(eps, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(-0.49, 0.49))
def test_cpbe_shift_equivariant(eps):
    assert cpbe_estimate(cpbe_rx(eps), CFG) == pytest.approx(eps, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(-0.44, 0.44))
def test_psa_shift_equivariant(eps):
    assert psa_estimate(*psa_pair(eps), CFG) == pytest.approx(eps, abs=1e-9)
