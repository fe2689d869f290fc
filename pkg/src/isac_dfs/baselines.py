"""Classical CFO estimators used as benchmarks.

These are textbook reconstructions: Moose-style half-symbol repetition, the
cyclic-prefix correlator, and the pilot-pair phase estimator.  None extends
its range; outside the unambiguous interval each estimate wraps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import OfdmConfig


def _angle(z: complex) -> float:
    return math.atan2(z.imag, z.real)


@dataclass(frozen=True)
class PilotSpec:
    stride: int = 8
    seed: int = 7
    n_subcarriers: int = 128
    indices: np.ndarray = field(init=False, repr=False)
    values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        idx = np.arange(0, self.n_subcarriers, self.stride)
        if idx.size == 0:
            raise ValueError("pilot set is empty")
        rng = np.random.default_rng(self.seed)
        vals = np.exp(1j * (np.pi / 4 + np.pi / 2 * rng.integers(0, 4, idx.size)))
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", vals)


def moose_training_symbol(cfg: OfdmConfig, seed: int = 11) -> np.ndarray:
    """CP-prefixed symbol whose body is two identical halves, per-sample power 1/N."""
    N = cfg.n_subcarriers
    half = np.exp(2j * np.pi * np.random.default_rng(seed).random(N // 2)) / math.sqrt(N)
    body = np.tile(half, 2)
    return np.concatenate([body[N - cfg.cp_len:], body])


def moose_estimate(y, n_fft: int) -> float:
    """``angle(sum conj(y(n)) y(n + N/2)) / pi`` over the first N samples; |eps| < 1."""
    y = np.asarray(y)
    if y.size < n_fft:
        raise ValueError(f"need {n_fft} samples, got {y.size}")
    h = n_fft // 2
    z = np.vdot(y[:h], y[h:2 * h])
    if z == 0:
        raise ValueError("zero-energy input")
    return _angle(z) / math.pi


def cpbe_estimate(y, cfg: OfdmConfig) -> float:
    """CP-to-tail correlation summed over every full symbol in ``y``; |eps| < 0.5."""
    y = np.asarray(y)
    n_sym = y.size // cfg.symbol_len
    if n_sym < 1:
        raise ValueError("need at least one full CP-prefixed symbol")
    s = y[:n_sym * cfg.symbol_len].reshape(n_sym, cfg.symbol_len)
    N, cp = cfg.n_subcarriers, cfg.cp_len
    z = np.vdot(s[:, :cp], s[:, N:N + cp])
    if z == 0:
        raise ValueError("zero-energy input")
    return _angle(z) / (2 * math.pi)


def psa_estimate(Y1, Y2, pilots: PilotSpec, cfg: OfdmConfig) -> float:
    """Pilot phase advance between adjacent symbols; |eps| < N / (2 (N + cp))."""
    idx = pilots.indices
    if idx.size == 0:
        raise ValueError("pilot set is empty")
    z = np.vdot(np.asarray(Y1)[idx], np.asarray(Y2)[idx])
    N = cfg.n_subcarriers
    return _angle(z) * N / (2 * math.pi * cfg.symbol_len)


def estimator_ranges(cfg: OfdmConfig) -> dict[str, float]:
    """Half-width of each estimator's unambiguous interval, normalized DFS."""
    N = cfg.n_subcarriers
    return {
        "psa": N / (2 * cfg.symbol_len),
        "cpbe": 0.5,
        "moose": 1.0,
        "fine": cfg.ratio / 2,
    }
