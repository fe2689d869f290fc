"""Shared configuration records, RNG streams and small numeric helpers.

All Doppler quantities are normalized to the subcarrier spacing,
``eps = f_d / delta_f``.  Sample buffers are plain complex ``numpy`` arrays;
their sample rate is implied by the :class:`OfdmConfig` that produced them
(``n_subcarriers * subcarrier_spacing``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class ConfigError(ValueError):
    """Raised when a configuration record violates one of its invariants."""


class Mode(str, enum.Enum):
    COARSE_ONLY = "CoarseOnly"
    COARSE_AND_FINE = "CoarseAndFine"


@dataclass(frozen=True)
class PreambleSpec:
    """Three repeated blocks of ``block_len`` samples, zero padded to N.

    The base sequence is unit-modulus with pseudo-random phases drawn from a
    pinned seed, so its average power is exactly one.
    """

    block_len: int = 42
    seed: int = 20240613
    repetitions: int = field(default=3, init=False)

    def base_sequence(self) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        return np.exp(2j * np.pi * rng.random(self.block_len))

    def pad_len(self, n_subcarriers: int) -> int:
        return n_subcarriers - self.repetitions * self.block_len

    def ratio(self, n_subcarriers: int) -> float:
        return n_subcarriers / self.block_len


@dataclass(frozen=True)
class OfdmConfig:
    n_subcarriers: int = 128
    cp_len: int = 16
    subcarrier_spacing: float = 15e3
    carrier_freq: float = 28e9
    modulation_order: int = 16
    burst_symbols: int = 64
    preamble: PreambleSpec = PreambleSpec()

    @property
    def symbol_len(self) -> int:
        return self.n_subcarriers + self.cp_len

    @property
    def sample_rate(self) -> float:
        return self.n_subcarriers * self.subcarrier_spacing

    @property
    def ratio(self) -> float:
        """Preamble repetition ratio r = N / L."""
        return self.preamble.ratio(self.n_subcarriers)

    @property
    def doppler_bin(self) -> float:
        """Slow-time Doppler resolution in normalized DFS units."""
        return self.n_subcarriers / (self.burst_symbols * self.symbol_len)

    @property
    def bits_per_symbol(self) -> int:
        return int(math.log2(self.modulation_order))


def validate_config(cfg: OfdmConfig) -> OfdmConfig:
    """Return ``cfg`` unchanged, or raise :class:`ConfigError` naming the bad field."""
    n = cfg.n_subcarriers
    if n < 2:
        raise ConfigError("n_subcarriers must be ≥ 2")
    if n & (n - 1):
        raise ConfigError(f"n_subcarriers must be a power of two, got {n}")
    if cfg.cp_len <= 0:
        raise ConfigError("cp_len must be > 0")
    if cfg.cp_len >= n:
        raise ConfigError("cp_len must be < N")
    if cfg.modulation_order not in (4, 16, 64):
        raise ConfigError(
            f"modulation_order must be one of 4, 16, 64, got {cfg.modulation_order}"
        )
    if cfg.burst_symbols < 2:
        raise ConfigError("burst_symbols must be ≥ 2")
    if not cfg.subcarrier_spacing > 0:
        raise ConfigError("subcarrier_spacing must be > 0")
    if not cfg.carrier_freq > 0:
        raise ConfigError("carrier_freq must be > 0")
    L = cfg.preamble.block_len
    if L < 1:
        raise ConfigError("preamble.block_len must be ≥ 1")
    if 3 * L > n:
        raise ConfigError(f"preamble.block_len must satisfy 3L ≤ N (L={L}, N={n})")
    return cfg


@dataclass(frozen=True)
class EstimateRecord:
    trial_index: int
    snr_db: float
    eps_true: float
    eps_coarse: float
    eps_fine: float
    eps_total: float
    mode: Mode
    estimator_name: str = "proposed"
    seed: int = 0

    def __post_init__(self):
        if self.mode is Mode.COARSE_ONLY and self.eps_fine != 0.0:
            raise ValueError("CoarseOnly record must carry eps_fine == 0")
        if self.eps_total != self.eps_coarse + self.eps_fine:
            raise ValueError("eps_total must equal eps_coarse + eps_fine")

    @property
    def error(self) -> float:
        return self.eps_total - self.eps_true


@dataclass(frozen=True)
class RngStream:
    """Counter-style split of a master seed: one independent stream per id.

    ``generator()`` returns a fresh generator positioned at the start of the
    stream, so the same ``(master_seed, stream_id)`` always replays the same
    samples no matter which worker or in which order it is consumed.
    """

    master_seed: int
    stream_id: int

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence([self.master_seed, self.stream_id])
        return np.random.Generator(np.random.Philox(ss))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


def gaussian_noise(rng, length: int, variance: float) -> np.ndarray:
    """Circular complex Gaussian noise, each real part of variance ``variance/2``."""
    if length <= 0:
        raise ValueError(f"noise length must be positive, got {length}")
    if variance < 0:
        raise ValueError("noise variance must be ≥ 0")
    gen = _as_generator(rng)
    if variance == 0:
        return np.zeros(length, dtype=complex)
    z = gen.standard_normal((2, length))
    return math.sqrt(variance / 2) * (z[0] + 1j * z[1])


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)
