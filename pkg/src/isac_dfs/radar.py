"""Coarse Doppler estimation from the ISAC burst via the slow-time FFT."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import speed_of_light

from .core import OfdmConfig
from .ofdm import ofdm_demodulate


@dataclass(frozen=True)
class DopplerProfile:
    magnitudes: np.ndarray
    bin_resolution: float

    @property
    def n_bins(self) -> int:
        return self.magnitudes.size


def build_symbol_grid(frame_rx, tx_symbols, cfg: OfdmConfig, offset: int = 0) -> np.ndarray:
    """Divide the demodulated burst by the known transmit symbols.

    ``tx_symbols`` is an ``(M, N)`` array of the symbols that were sent; the
    received burst starts ``offset`` samples into ``frame_rx``.  Any known
    symbols work, e.g. a repeated preamble across frames.
    """
    S = np.asarray(tx_symbols)
    if S.ndim != 2 or S.shape[1] != cfg.n_subcarriers:
        raise ValueError(f"tx_symbols must be (M, {cfg.n_subcarriers}), got {S.shape}")
    if np.any(S == 0):
        raise ValueError("known transmit symbols must be nonzero")
    M = S.shape[0]
    stop = offset + M * cfg.symbol_len
    frame_rx = np.asarray(frame_rx)
    if frame_rx.size < stop:
        raise ValueError(f"frame holds {frame_rx.size} samples, burst needs {stop}")
    Y = ofdm_demodulate(frame_rx[offset:stop].reshape(M, cfg.symbol_len), cfg)
    return Y / S


def doppler_profile(grid, cfg: OfdmConfig) -> DopplerProfile:
    """Slow-time FFT per subcarrier, magnitudes accumulated over subcarriers."""
    grid = np.asarray(grid)
    M = grid.shape[0]
    mags = np.abs(np.fft.fft(grid, axis=0)).sum(axis=1)
    return DopplerProfile(mags, cfg.n_subcarriers / (M * cfg.symbol_len))


def signed_bins(M: int) -> np.ndarray:
    """Bin indices with the upper half wrapped negative; bin M/2 stays positive."""
    b = np.arange(M)
    return np.where(b > M // 2, b - M, b)


def coarse_estimate(profile: DopplerProfile) -> float:
    mags = profile.magnitudes
    if mags.size == 0:
        raise ValueError("empty Doppler profile")
    signed = signed_bins(mags.size)
    peak = np.flatnonzero(mags == mags.max())
    # ties: smallest |bin| first, then the positive side
    best = min(signed[peak], key=lambda b: (abs(b), -b))
    return float(best) * profile.bin_resolution


def velocity_from_dfs(eps: float, cfg: OfdmConfig) -> float:
    """Relative radial speed in m/s for a normalized Doppler shift."""
    return eps * cfg.subcarrier_spacing * speed_of_light / cfg.carrier_freq


def dfs_from_velocity(v: float, cfg: OfdmConfig) -> float:
    return v * cfg.carrier_freq / (speed_of_light * cfg.subcarrier_spacing)
