"""Gray-mapped square QAM and CP-OFDM modulation.

Gray table (per axis, bits -> level, before normalization)::

    4QAM :  0 -> -1, 1 -> +1
    16QAM: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
    64QAM: 000 -> -7, 001 -> -5, 011 -> -3, 010 -> -1,
           110 -> +1, 111 -> +3, 101 -> +5, 100 -> +7

The first half of each symbol's bits selects the in-phase level, the second
half the quadrature level.  Points are scaled to unit average energy, so the
16QAM word ``0000`` maps to ``(-3-3j)/sqrt(10)``.

Modulation follows ``x(n) = (1/N) sum_k s(k) exp(j 2 pi n k / N)``; the
demodulator is the unscaled forward DFT, which makes the pair an exact
inverse.
"""

from __future__ import annotations

import math

import numpy as np

from .core import OfdmConfig

SUPPORTED_ORDERS = (4, 16, 64)


def _axis_params(order: int) -> tuple[int, int, float]:
    if order not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported modulation order {order}")
    bits = int(math.log2(order))
    side = int(math.isqrt(order))
    scale = math.sqrt(2 * (order - 1) / 3)
    return bits, side, scale


def _gray(i):
    return i ^ (i >> 1)


def _gray_inverse(g):
    g = np.asarray(g).copy()
    shift = g >> 1
    while np.any(shift):
        g ^= shift
        shift >>= 1
    return g


def _bits_to_int(bits: np.ndarray) -> np.ndarray:
    width = bits.shape[-1]
    weights = 1 << np.arange(width - 1, -1, -1)
    return bits @ weights


def _int_to_bits(values: np.ndarray, width: int) -> np.ndarray:
    shifts = np.arange(width - 1, -1, -1)
    return (values[..., None] >> shifts) & 1


def constellation(order: int) -> np.ndarray:
    """All points indexed by their bit word read as an unsigned integer."""
    bits, _, _ = _axis_params(order)
    words = _int_to_bits(np.arange(order), bits)
    return qam_map(words.ravel(), order)


def qam_map(bits, order: int) -> np.ndarray:
    n_bits, side, scale = _axis_params(order)
    bits = np.asarray(bits, dtype=np.int64).ravel()
    if bits.size % n_bits:
        raise ValueError(
            f"bit count {bits.size} is not divisible by log2({order}) = {n_bits}"
        )
    half = n_bits // 2
    words = bits.reshape(-1, n_bits)
    i_level = _gray_inverse(_bits_to_int(words[:, :half]))
    q_level = _gray_inverse(_bits_to_int(words[:, half:]))
    amp = lambda idx: 2 * idx - (side - 1)  # noqa: E731
    return (amp(i_level) + 1j * amp(q_level)) / scale


def qam_demap(symbols, order: int) -> np.ndarray:
    """Minimum-distance hard decisions back to a flat bit array."""
    n_bits, side, scale = _axis_params(order)
    s = np.asarray(symbols).ravel() * scale
    half = n_bits // 2

    def axis_bits(v):
        idx = np.clip(np.rint((v + (side - 1)) / 2), 0, side - 1).astype(np.int64)
        return _int_to_bits(_gray(idx), half)

    out = np.concatenate([axis_bits(s.real), axis_bits(s.imag)], axis=-1)
    return out.reshape(-1)


def random_bits(rng: np.random.Generator, count: int) -> np.ndarray:
    return rng.integers(0, 2, size=count, dtype=np.int64)


def ofdm_modulate(freq, cfg: OfdmConfig) -> np.ndarray:
    """Map N frequency-domain values (or a stack of them) to CP-prefixed time samples."""
    s = np.asarray(freq)
    if s.shape[-1] != cfg.n_subcarriers:
        raise ValueError(
            f"expected {cfg.n_subcarriers} subcarrier values, got {s.shape[-1]}"
        )
    x = np.fft.ifft(s, axis=-1)
    return np.concatenate([x[..., -cfg.cp_len:], x], axis=-1)


def ofdm_demodulate(sym, cfg: OfdmConfig) -> np.ndarray:
    y = np.asarray(sym)
    if y.shape[-1] != cfg.symbol_len:
        raise ValueError(f"expected {cfg.symbol_len} samples, got {y.shape[-1]}")
    return np.fft.fft(y[..., cfg.cp_len:], axis=-1)


def build_frame(preamble: np.ndarray, data=()) -> np.ndarray:
    """Serialize a preamble symbol followed by data symbols (rows of a 2-D array or a list)."""
    parts = [np.asarray(preamble).ravel()]
    parts.extend(np.asarray(d).ravel() for d in data)
    return np.concatenate(parts)
