"""V2V multipath channel with ULA steering, a common Doppler rotation and AWGN.

The received signal is kept in its full array form: ``apply_channel`` returns
one buffer per (receive element, transmit element) pair, shape ``(P, P, n)``,
and ``beamform`` collapses it with ``c^H Y(n) b``.  With unit-norm weights the
noise variance is unchanged by the collapse, and matched weights give the LOS
path unit array gain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import _as_generator, db_to_linear, gaussian_noise


@dataclass(frozen=True)
class PathSpec:
    gain: complex = 1.0
    delay: int = 0
    aoa: float = 0.0
    aod: float = 0.0

    def __post_init__(self):
        if self.delay < 0:
            raise ValueError("path delay must be ≥ 0")
        for name in ("aoa", "aod"):
            if abs(getattr(self, name)) > math.pi / 2 + 1e-12:
                raise ValueError(f"{name} must lie in [-pi/2, pi/2]")


@dataclass(frozen=True)
class ChannelConfig:
    """Path list (path 0 is LOS) plus one Doppler shared by every path.

    ``path_doppler`` optionally overrides the shared value per path; it is an
    extension and stays ``None`` in all reproduced experiments.
    """

    paths: tuple[PathSpec, ...] = (PathSpec(),)
    doppler: float = 0.0
    n_antennas: int = 1
    sample_period: float = 1 / (128 * 15e3)
    wavelength: float = 299_792_458.0 / 28e9
    path_doppler: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.paths:
            raise ValueError("channel needs at least one path")
        if self.n_antennas < 1:
            raise ValueError("n_antennas must be ≥ 1")
        if self.path_doppler is not None and len(self.path_doppler) != len(self.paths):
            raise ValueError("path_doppler needs one entry per path")

    @property
    def los(self) -> PathSpec:
        return self.paths[0]

    def with_doppler(self, eps: float) -> "ChannelConfig":
        return ChannelConfig(
            self.paths, eps, self.n_antennas, self.sample_period, self.wavelength,
            self.path_doppler,
        )


@dataclass(frozen=True)
class BeamWeights:
    rx: np.ndarray = field(default_factory=lambda: np.ones(1, dtype=complex))
    tx: np.ndarray = field(default_factory=lambda: np.ones(1, dtype=complex))

    def __post_init__(self):
        for name in ("rx", "tx"):
            w = np.asarray(getattr(self, name), dtype=complex)
            if not np.isclose(np.linalg.norm(w), 1.0):
                raise ValueError(f"{name} beam weights must have unit norm")
            object.__setattr__(self, name, w)

    @classmethod
    def matched(cls, ch: ChannelConfig) -> "BeamWeights":
        P = ch.n_antennas
        return cls(steering_vector(ch.los.aoa, P), steering_vector(ch.los.aod, P))


def steering_vector(theta: float, n_antennas: int) -> np.ndarray:
    """Half-wavelength ULA response ``exp(-j pi p sin(theta)) / sqrt(P)``."""
    if abs(theta) > math.pi / 2 + 1e-12:
        raise ValueError(f"angle {theta} outside [-pi/2, pi/2]")
    if n_antennas < 1:
        raise ValueError("n_antennas must be ≥ 1")
    p = np.arange(n_antennas)
    # element spacing lambda/2: 2*pi*(lambda/2)*sin(theta)/lambda = pi*sin(theta)
    return np.exp(-1j * np.pi * p * math.sin(theta)) / math.sqrt(n_antennas)


def apply_cfo(x, eps: float, n_fft: int, start: int = 0) -> np.ndarray:
    """Rotate sample ``n`` by ``exp(j 2 pi eps (n + start) / N)``."""
    x = np.asarray(x)
    n = np.arange(start, start + x.shape[-1])
    return x * np.exp(2j * np.pi * eps * n / n_fft)


def _delayed(x: np.ndarray, tau: int) -> np.ndarray:
    if tau == 0:
        return x.astype(complex, copy=True)
    out = np.zeros(x.shape, dtype=complex)
    out[tau:] = x[:-tau]
    return out


def apply_channel(x, ch: ChannelConfig, n_fft: int, rng=None, noise_var: float = 0.0,
                  start: int = 0) -> np.ndarray:
    """Propagate ``x`` through every path; returns the ``(P, P, len)`` array output.

    ``start`` is the absolute index of ``x[0]`` for the Doppler phase.
    """
    x = np.asarray(x, dtype=complex)
    if max(p.delay for p in ch.paths) >= x.size:
        raise ValueError("path delay must be shorter than the input buffer")
    P = ch.n_antennas
    y = np.zeros((P, P, x.size), dtype=complex)
    for i, path in enumerate(ch.paths):
        eps = ch.doppler if ch.path_doppler is None else ch.path_doppler[i]
        s = path.gain * apply_cfo(_delayed(x, path.delay), eps, n_fft, start)
        H = np.outer(steering_vector(path.aoa, P), steering_vector(path.aod, P).conj())
        y += H[:, :, None] * s[None, None, :]
    if noise_var > 0:
        if rng is None:
            raise ValueError("noise requested but no rng given")
        gen = _as_generator(rng)
        y += gaussian_noise(gen, y.size, noise_var).reshape(y.shape)
    return y


def beamform(y, w: BeamWeights) -> np.ndarray:
    """``Q(n) = c^H Y(n) b`` for every sample."""
    y = np.asarray(y)
    P = y.shape[0]
    if y.ndim != 3 or y.shape[1] != P or w.rx.size != P or w.tx.size != P:
        raise ValueError(
            f"antenna mismatch: buffers {y.shape[:2]}, weights {w.rx.size}/{w.tx.size}"
        )
    return np.einsum("i,ijn,j->n", w.rx.conj(), y, w.tx)


def add_awgn(x, snr_db: float, rng, signal_power: float | None = None) -> np.ndarray:
    """Add noise of variance ``signal_power / snr``; ``signal_power`` defaults to mean |x|^2."""
    x = np.asarray(x, dtype=complex)
    if math.isinf(snr_db) and snr_db > 0:
        return x.copy()
    if signal_power is None:
        signal_power = float(np.mean(np.abs(x) ** 2))
        if signal_power == 0:
            raise ValueError("cannot set an SNR on an all-zero signal")
    var = signal_power / db_to_linear(snr_db)
    return x + gaussian_noise(_as_generator(rng), x.size, var).reshape(x.shape)
