"""Two-stage Doppler estimation: radar coarse stage plus preamble ML fine stage.

Frame layout used throughout: one CP-prefixed preamble symbol followed by the
``M``-symbol known burst that the radar stage senses::

    [cp | P1 P2 P3 pad] [cp | data 0] ... [cp | data M-1]

The fine stage correlates the three preamble blocks at lags L and 2L.  The
later block is conjugated, so a residual ``eps`` gives
``angle(phi(m)) = -2 pi eps m / r`` with ``r = N / L``, and the closed form
below returns ``+eps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import EstimateRecord, Mode, OfdmConfig
from .radar import build_symbol_grid, coarse_estimate, doppler_profile


class NoEstimateError(ValueError):
    """The preamble window carries no energy, so no estimate exists."""


@dataclass(frozen=True)
class CorrelationSet:
    phi1: complex
    phi2: complex
    gamma: float
    rho: float | None = None


def generate_preamble(cfg: OfdmConfig) -> np.ndarray:
    """Time-domain preamble symbol ``[cp | b b b 0...]``.

    The blocks are scaled by ``1/sqrt(N)`` so the preamble has the same
    per-sample power as a unit-energy QAM symbol under the ``1/N`` modulation.
    """
    spec = cfg.preamble
    N = cfg.n_subcarriers
    pad = spec.pad_len(N)
    if pad < 0:
        raise ValueError(f"3L = {3 * spec.block_len} exceeds N = {N}")
    base = spec.base_sequence() / math.sqrt(N)
    body = np.concatenate([np.tile(base, 3), np.zeros(pad, dtype=complex)])
    return np.concatenate([body[N - cfg.cp_len:], body])


def preamble_window(frame, cfg: OfdmConfig) -> np.ndarray:
    """The 3L repeated samples of the preamble body (CP skipped)."""
    start = cfg.cp_len
    return np.asarray(frame)[start:start + 3 * cfg.preamble.block_len]


def compensate(x, eps: float, n_fft: int, start: int = 0) -> np.ndarray:
    """Undo a normalized Doppler shift: multiply sample ``n`` by ``exp(-j 2 pi eps n / N)``."""
    x = np.asarray(x)
    n = np.arange(start, start + x.shape[-1])
    return x * np.exp(-2j * np.pi * eps * n / n_fft)


def correlate(window, block_len: int, rho: float | None = None) -> CorrelationSet:
    y = np.asarray(window)
    L = block_len
    if y.size < 3 * L:
        raise ValueError(f"window of {y.size} samples is shorter than 3L = {3 * L}")
    b = y[:3 * L].reshape(3, L)
    phi1 = np.vdot(b[1], b[0]) + np.vdot(b[2], b[1])
    phi2 = np.vdot(b[2], b[0])
    gamma = float(np.sum(np.abs(b) ** 2))
    return CorrelationSet(complex(phi1), complex(phi2), gamma, rho)


def plugin_rho(c: CorrelationSet, block_len: int) -> float:
    """Signal-to-total power ratio estimated from the correlations themselves."""
    if c.gamma == 0:
        return 0.0
    total = c.gamma / (3 * block_len)
    signal = (abs(c.phi1) + abs(c.phi2)) / (3 * block_len)
    return float(min(max(signal / total, 0.0), 1.0))


def fine_estimate(c: CorrelationSet, r: float) -> float:
    """Closed-form ML fine estimate from the lag-L and lag-2L correlations.

    ``angle(phi2)`` is unwrapped against ``2 * angle(phi1)``, so the
    unambiguous range is set by ``phi1`` alone: ``|eps| < r / 2``.
    """
    a1, a2 = abs(c.phi1), abs(c.phi2)
    if a1 + 4 * a2 == 0:
        raise NoEstimateError("degenerate correlations: preamble window has no energy")
    t1 = math.atan2(c.phi1.imag, c.phi1.real)
    t2 = math.atan2(c.phi2.imag, c.phi2.real)
    d = t2 - 2 * t1
    t2 = 2 * t1 + math.atan2(math.sin(d), math.cos(d))
    return -(r / (2 * math.pi)) * (a1 * t1 + 2 * a2 * t2) / (a1 + 4 * a2)


def total_estimate(eps_coarse: float, eps_fine: float) -> float:
    return eps_coarse + eps_fine


def log_likelihood(window, eps_f, block_len: int, r: float, rho: float | None = None):
    """Exact ``2 sum_m Re{exp(j 2 pi eps m / r) phi(m)} - 2 rho gamma``.

    ``eps_f`` may be an array (grid search).  ``rho`` defaults to the plug-in
    value; it only shifts the curve.
    """
    c = window if isinstance(window, CorrelationSet) else correlate(window, block_len)
    if rho is None:
        rho = c.rho if c.rho is not None else plugin_rho(c, block_len)
    e = np.asarray(eps_f, dtype=float)
    terms = (np.exp(2j * np.pi * e / r) * c.phi1).real
    terms = terms + (np.exp(4j * np.pi * e / r) * c.phi2).real
    return 2 * terms - 2 * rho * c.gamma


def crlb(block_len: int, snr_linear: float) -> float:
    """Lower bound ``3 / (2 pi^2 L SNR)`` on the variance of the normalized DFS."""
    if block_len < 1:
        raise ValueError("block_len must be ≥ 1")
    if not snr_linear > 0:
        raise ValueError("snr must be positive")
    return 3.0 / (2 * math.pi ** 2 * block_len * snr_linear)


def coarse_stage(frame_rx, tx_burst, cfg: OfdmConfig) -> float:
    """Raw radar estimate from the burst; aliases with period ``N / (N + cp)``."""
    grid = build_symbol_grid(frame_rx, tx_burst, cfg, offset=cfg.symbol_len)
    return coarse_estimate(doppler_profile(grid, cfg))


def resolve_alias(eps_radar: float, eps_hint: float, cfg: OfdmConfig) -> float:
    """Shift the radar estimate by whole symbol-rate aliases towards ``eps_hint``."""
    alias = cfg.n_subcarriers / cfg.symbol_len
    return eps_radar + round((eps_hint - eps_radar) / alias) * alias


def fine_stage(frame_rx, eps_coarse: float, cfg: OfdmConfig) -> float:
    window = compensate(preamble_window(frame_rx, cfg), eps_coarse,
                        cfg.n_subcarriers, start=cfg.cp_len)
    return fine_estimate(correlate(window, cfg.preamble.block_len), cfg.ratio)


def coarse_and_fine(frame_rx, eps_radar: float, cfg: OfdmConfig) -> tuple[float, float]:
    """Alias-resolved coarse estimate and the fine residual on top of it.

    The slow-time FFT samples once per symbol, so the radar estimate is only
    known modulo ``N / (N + cp)``.  The preamble correlation on the
    uncompensated window is unambiguous over ``|eps| < r / 2`` and picks the
    alias; the fine stage then measures the sub-bin residual.
    """
    hint = fine_stage(frame_rx, 0.0, cfg)
    eps_v = resolve_alias(eps_radar, hint, cfg)
    return eps_v, fine_stage(frame_rx, eps_v, cfg)


def estimate_pipeline(frame_rx, cfg: OfdmConfig, tx_burst, mode: Mode = Mode.COARSE_AND_FINE,
                      *, eps_true: float = math.nan, snr_db: float = math.nan,
                      trial_index: int = 0, seed: int = 0) -> EstimateRecord:
    """Coarse radar estimate, compensation, preamble correlation, fine estimate, sum.

    CoarseOnly returns the raw radar estimate; CoarseAndFine first resolves
    its alias with the preamble (see :func:`coarse_and_fine`).
    """
    mode = Mode(mode)
    eps_v = coarse_stage(frame_rx, tx_burst, cfg)
    eps_f = 0.0
    if mode is Mode.COARSE_AND_FINE:
        eps_v, eps_f = coarse_and_fine(frame_rx, eps_v, cfg)
    return EstimateRecord(
        trial_index=trial_index, snr_db=snr_db, eps_true=eps_true,
        eps_coarse=eps_v, eps_fine=eps_f, eps_total=total_estimate(eps_v, eps_f),
        mode=mode, estimator_name="proposed", seed=seed,
    )


def total_range(cfg: OfdmConfig) -> float:
    """Largest |eps| the CoarseAndFine pipeline recovers on clean input.

    Alias resolution relies on the uncompensated preamble correlation, which
    is unambiguous for ``|eps| < r / 2``.
    """
    return cfg.ratio / 2
