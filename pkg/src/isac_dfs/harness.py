"""Monte Carlo experiments: MSE and BER sweeps, tracking traces, constellations.

Every trial draws its randomness from an :class:`RngStream` keyed by the
master seed and the trial's coordinates, so each output is a pure function of
the :class:`ExperimentConfig`.

SNR is the per-sample SNR of the transmitted waveform: the noise variance is
``(1/N) / snr``, where ``1/N`` is the average sample power of a unit-energy
QAM symbol after ``1/N`` modulation.  The preamble and every baseline training
structure are built at that same power, so all estimators see the same SNR.
After the unscaled demodulating DFT this equals Es/N0 per subcarrier.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.special import erfc

from . import baselines
from .adaptive import AdaptiveState, GateConfig, process_frame
from .channel import BeamWeights, ChannelConfig, apply_channel, beamform
from .core import (ConfigError, Mode, OfdmConfig, RngStream, db_to_linear,
                   validate_config)
from .estimator import (compensate, crlb, estimate_pipeline, generate_preamble,
                        preamble_window, total_range)
from .ofdm import (build_frame, ofdm_demodulate, ofdm_modulate, qam_demap,
                   qam_map, random_bits)

ESTIMATORS = ("proposed", "coarse", "moose", "cpbe", "psa")
CSV_HEADER = ("snr_db", "estimator", "metric", "value", "trials", "seed")


@dataclass(frozen=True)
class DfsModel:
    """Ground-truth Doppler per frame: fixed ``lo`` or uniform in ``[lo, hi]``."""

    kind: str = "uniform"
    lo: float = -0.25
    hi: float = 0.25

    def __post_init__(self):
        if self.kind not in ("fixed", "uniform"):
            raise ConfigError(f"dfs model must be 'fixed' or 'uniform', got {self.kind!r}")
        if self.kind == "uniform" and self.hi < self.lo:
            raise ConfigError("dfs uniform bounds need lo ≤ hi")

    @classmethod
    def fixed(cls, eps: float) -> "DfsModel":
        return cls("fixed", eps, eps)

    def draw(self, rng: np.random.Generator) -> float:
        u = rng.random()
        return self.lo if self.kind == "fixed" else self.lo + (self.hi - self.lo) * u


@dataclass(frozen=True)
class ExperimentConfig:
    ofdm: OfdmConfig = OfdmConfig()
    channel: ChannelConfig = ChannelConfig()
    snr_points: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0)
    trials: int = 500
    estimators: tuple[str, ...] = ("proposed", "moose", "cpbe", "psa")
    master_seed: int = 2024
    out_dir: str = "results"
    gate: GateConfig = GateConfig()
    dfs: DfsModel = DfsModel()
    payload_symbols: int = 1
    cpbe_symbols: int = 1

    def validated(self) -> "ExperimentConfig":
        validate_config(self.ofdm)
        if self.trials < 1:
            raise ConfigError("trials must be ≥ 1")
        if not self.snr_points:
            raise ConfigError("snr_points must not be empty")
        unknown = set(self.estimators) - set(ESTIMATORS)
        if unknown:
            raise ConfigError(f"unknown estimators: {sorted(unknown)}")
        lim = total_range(self.ofdm)
        if max(abs(self.dfs.lo), abs(self.dfs.hi)) >= lim:
            raise ConfigError(f"dfs bounds must stay within ±{lim:.4f}")
        if not 1 <= self.payload_symbols <= self.ofdm.burst_symbols:
            raise ConfigError("payload_symbols must be in [1, burst_symbols]")
        if self.cpbe_symbols < 1:
            raise ConfigError("cpbe_symbols must be ≥ 1")
        return self


class Row(NamedTuple):
    snr_db: float
    estimator: str
    metric: str
    value: float
    trials: int
    seed: int


@dataclass
class SweepResult:
    rows: list[Row] = field(default_factory=list)

    def select(self, estimator: str | None = None, metric: str | None = None) -> list[Row]:
        return [r for r in self.rows
                if (estimator is None or r.estimator == estimator)
                and (metric is None or r.metric == metric)]

    def value(self, snr_db: float, estimator: str, metric: str) -> float:
        for r in self.rows:
            if r.snr_db == snr_db and r.estimator == estimator and r.metric == metric:
                return r.value
        raise KeyError((snr_db, estimator, metric))


# -- signal generation -------------------------------------------------------

def _stream(seed: int, *coords: int) -> np.random.Generator:
    # pack coordinates into one counter; each field gets 20 bits
    sid = 0
    for c in coords:
        sid = (sid << 20) | (c & 0xFFFFF)
    return RngStream(seed, sid).generator()


def noise_variance(cfg: OfdmConfig, snr_db: float) -> float:
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    return (1.0 / cfg.n_subcarriers) / db_to_linear(snr_db)


def random_qam_symbols(cfg: OfdmConfig, rng: np.random.Generator, count: int):
    bits = random_bits(rng, count * cfg.n_subcarriers * cfg.bits_per_symbol)
    return bits, qam_map(bits, cfg.modulation_order).reshape(count, cfg.n_subcarriers)


@dataclass(frozen=True)
class Frame:
    bits: np.ndarray
    burst: np.ndarray
    tx: np.ndarray
    rx: np.ndarray


def transmit(x, ch: ChannelConfig, cfg: OfdmConfig, snr_db: float, rng,
             start: int = 0) -> np.ndarray:
    """Channel, array noise and matched beamforming in one step."""
    y = apply_channel(x, ch, cfg.n_subcarriers, rng, noise_variance(cfg, snr_db), start)
    return beamform(y, BeamWeights.matched(ch))


def simulate_frame(cfg: OfdmConfig, ch: ChannelConfig, eps: float, snr_db: float,
                   rng: np.random.Generator) -> Frame:
    bits, burst = random_qam_symbols(cfg, rng, cfg.burst_symbols)
    tx = build_frame(generate_preamble(cfg), ofdm_modulate(burst, cfg))
    rx = transmit(tx, ch.with_doppler(eps), cfg, snr_db, rng)
    return Frame(bits, burst, tx, rx)


def _moose_trial(cfg, ch, eps, snr_db, rng):
    rx = transmit(baselines.moose_training_symbol(cfg), ch.with_doppler(eps), cfg, snr_db, rng)
    return baselines.moose_estimate(rx[cfg.cp_len:], cfg.n_subcarriers)


def _cpbe_trial(cfg, ch, eps, snr_db, rng, n_sym):
    _, syms = random_qam_symbols(cfg, rng, n_sym)
    rx = transmit(ofdm_modulate(syms, cfg).ravel(), ch.with_doppler(eps), cfg, snr_db, rng)
    return baselines.cpbe_estimate(rx, cfg)


def _psa_trial(cfg, ch, eps, snr_db, rng, pilots):
    _, syms = random_qam_symbols(cfg, rng, 2)
    syms[:, pilots.indices] = pilots.values
    rx = transmit(ofdm_modulate(syms, cfg).ravel(), ch.with_doppler(eps), cfg, snr_db, rng)
    Y = ofdm_demodulate(rx.reshape(2, cfg.symbol_len), cfg)
    return baselines.psa_estimate(Y[0], Y[1], pilots, cfg)


def estimate_trial(name: str, cfg: ExperimentConfig, eps: float, snr_db: float,
                   rng: np.random.Generator) -> float:
    """One estimator's estimate of ``eps`` from its own training structure."""
    o, ch = cfg.ofdm, cfg.channel
    if name in ("proposed", "coarse"):
        fr = simulate_frame(o, ch, eps, snr_db, rng)
        mode = Mode.COARSE_AND_FINE if name == "proposed" else Mode.COARSE_ONLY
        return estimate_pipeline(fr.rx, o, fr.burst, mode).eps_total
    if name == "moose":
        return _moose_trial(o, ch, eps, snr_db, rng)
    if name == "cpbe":
        return _cpbe_trial(o, ch, eps, snr_db, rng, cfg.cpbe_symbols)
    if name == "psa":
        return _psa_trial(o, ch, eps, snr_db, rng,
                          baselines.PilotSpec(n_subcarriers=o.n_subcarriers))
    raise ValueError(f"unknown estimator {name!r}")


# -- sweeps ------------------------------------------------------------------

def collect_errors(cfg: ExperimentConfig, name: str, snr_db: float,
                   snr_index: int = 0, est_index: int | None = None) -> np.ndarray:
    """Per-trial estimation errors ``eps_hat - eps`` in trial order.

    The true Doppler of trial ``t`` depends only on ``(master_seed, t)``, so
    every estimator and SNR point sees the same draws.
    """
    if est_index is None:
        est_index = ESTIMATORS.index(name)
    err = np.empty(cfg.trials)
    for t in range(cfg.trials):
        eps = cfg.dfs.draw(_stream(cfg.master_seed, 0, 0, t))
        rng = _stream(cfg.master_seed, snr_index + 1, est_index + 1, t)
        err[t] = estimate_trial(name, cfg, eps, snr_db, rng) - eps
    return err


def run_mse_sweep(cfg: ExperimentConfig) -> SweepResult:
    cfg.validated()
    out = SweepResult()
    L = cfg.ofdm.preamble.block_len
    for si, snr in enumerate(cfg.snr_points):
        for ei, name in enumerate(cfg.estimators):
            mse = float(np.mean(np.square(collect_errors(cfg, name, snr, si, ei))))
            out.rows.append(Row(snr, name, "MSE", mse, cfg.trials, cfg.master_seed))
        out.rows.append(Row(snr, "crlb", "CRLB", crlb(L, db_to_linear(snr)),
                            cfg.trials, cfg.master_seed))
    return out


def qam_ber_awgn(snr_db: float, order: int = 16) -> float:
    """Exact Gray-coded square-QAM bit error rate on AWGN at Es/N0 = ``snr_db``.

    Per axis a sqrt(order)-PAM: each level's error probability towards every
    other decision region is weighted by the Hamming distance of the Gray
    labels and averaged.
    """
    side = int(math.isqrt(order))
    bits_axis = int(math.log2(side))
    d = math.sqrt(3 * db_to_linear(snr_db) / (order - 1))  # half spacing / noise std per axis

    def Q(x):
        return 0.5 * erfc(x / math.sqrt(2))

    total = 0.0
    for i in range(side):
        for j in range(side):
            if i == j:
                continue
            # probability that level i lands in region j
            lo = -math.inf if j == 0 else (2 * (j - i) - 1) * d
            hi = math.inf if j == side - 1 else (2 * (j - i) + 1) * d
            p = (Q(lo) if lo != -math.inf else 1.0) - (Q(hi) if hi != math.inf else 0.0)
            total += p * bin((i ^ (i >> 1)) ^ (j ^ (j >> 1))).count("1")
    return total / (side * bits_axis)


def _phase_reference(rx_comp, cfg: OfdmConfig) -> complex:
    """Unit phasor aligning the compensated preamble to the transmitted one."""
    z = np.vdot(preamble_window(generate_preamble(cfg), cfg), preamble_window(rx_comp, cfg))
    return z / abs(z) if z != 0 else 1.0


def _payload(rx, cfg: OfdmConfig, count: int) -> np.ndarray:
    start = cfg.symbol_len
    seg = np.asarray(rx)[start:start + count * cfg.symbol_len]
    return ofdm_demodulate(seg.reshape(count, cfg.symbol_len), cfg)


def equalized_payload(rx, eps_hat: float | None, cfg: OfdmConfig, count: int) -> np.ndarray:
    """Compensate ``eps_hat`` and remove the common phase seen on the preamble."""
    if eps_hat is None:
        return _payload(rx, cfg, count)
    comp = compensate(rx, eps_hat, cfg.n_subcarriers)
    return _payload(comp, cfg, count) / _phase_reference(comp, cfg)


def run_ber_sweep(cfg: ExperimentConfig) -> SweepResult:
    """BER per estimator, plus ``perfect`` (genie), ``none`` and ``analytic`` rows."""
    cfg.validated()
    o, ch = cfg.ofdm, cfg.channel
    D = cfg.payload_symbols
    names = ("perfect", "none", *cfg.estimators)
    out = SweepResult()
    for si, snr in enumerate(cfg.snr_points):
        errors = dict.fromkeys(names, 0)
        n_bits = 0
        for t in range(cfg.trials):
            rng = _stream(cfg.master_seed, si + 1, 0, t)
            eps = cfg.dfs.draw(rng)
            fr = simulate_frame(o, ch, eps, snr, rng)
            ref_bits = fr.bits[:D * o.n_subcarriers * o.bits_per_symbol]
            n_bits += ref_bits.size
            for ei, name in enumerate(names):
                if name == "perfect":
                    comp = compensate(fr.rx, eps, o.n_subcarriers)
                    Y = _payload(comp, o, D) / ch.los.gain
                elif name == "none":
                    Y = equalized_payload(fr.rx, 0.0, o, D)
                else:
                    if name in ("proposed", "coarse"):
                        mode = Mode.COARSE_AND_FINE if name == "proposed" else Mode.COARSE_ONLY
                        eps_hat = estimate_pipeline(fr.rx, o, fr.burst, mode).eps_total
                    else:
                        eps_hat = estimate_trial(name, cfg, eps, snr,
                                                 _stream(cfg.master_seed, si + 1, ei + 1, t))
                    Y = equalized_payload(fr.rx, eps_hat, o, D)
                errors[name] += int(np.count_nonzero(qam_demap(Y, o.modulation_order) != ref_bits))
        for name in names:
            out.rows.append(Row(snr, name, "BER", errors[name] / n_bits, n_bits, cfg.master_seed))
        out.rows.append(Row(snr, "analytic", "BER", qam_ber_awgn(snr, o.modulation_order),
                            n_bits, cfg.master_seed))
    return out


class TraceRow(NamedTuple):
    frame: int
    eps_true: float
    eps_hat: float
    mode: str


@dataclass
class TrackingTrace:
    snr_db: float
    rows: list[TraceRow]

    @property
    def mse(self) -> float:
        return float(np.mean([(r.eps_hat - r.eps_true) ** 2 for r in self.rows]))

    @property
    def fine_calls(self) -> int:
        return sum(r.mode == Mode.COARSE_AND_FINE.value for r in self.rows)


def run_tracking(cfg: ExperimentConfig, snr_db: float, frames: int | None = None,
                 force_mode: Mode | None = None) -> TrackingTrace:
    """Adaptive estimation over a stream of frames with per-frame Doppler draws."""
    cfg.validated()
    frames = cfg.trials if frames is None else frames
    state = AdaptiveState(cfg.gate)
    rows = []
    for f in range(frames):
        rng = _stream(cfg.master_seed, 0, 1, f)
        eps = cfg.dfs.draw(rng)
        fr = simulate_frame(cfg.ofdm, cfg.channel, eps, snr_db, rng)
        _, rec, state = process_frame(fr.rx, state, cfg.ofdm, fr.burst, force_mode,
                                      eps_true=eps, snr_db=snr_db, seed=cfg.master_seed)
        rows.append(TraceRow(f, eps, rec.eps_total, rec.mode.value))
    return TrackingTrace(snr_db, rows)


def evm(received, reference) -> float:
    """RMS error vector magnitude relative to the mean reference power."""
    err = np.asarray(received) - np.asarray(reference)
    return float(np.sqrt(np.mean(np.abs(err) ** 2) / np.mean(np.abs(reference) ** 2)))


@dataclass
class ConstellationResult:
    reference: np.ndarray
    before: np.ndarray
    after: np.ndarray
    evm_before: float
    evm_after: float
    eps_hat: float


def run_constellation(cfg: ExperimentConfig, snr_db: float, eps: float) -> ConstellationResult:
    cfg.validated()
    o = cfg.ofdm
    D = cfg.payload_symbols
    fr = simulate_frame(o, cfg.channel, eps, snr_db, _stream(cfg.master_seed, 0, 2, 0))
    ref = fr.burst[:D].ravel()
    before = _payload(fr.rx, o, D).ravel()
    eps_hat = estimate_pipeline(fr.rx, o, fr.burst).eps_total
    after = equalized_payload(fr.rx, eps_hat, o, D).ravel()
    return ConstellationResult(ref, before, after, evm(before, ref), evm(after, ref), eps_hat)


def crlb_table(cfg: ExperimentConfig) -> SweepResult:
    L = cfg.ofdm.preamble.block_len
    return SweepResult([Row(s, "crlb", "CRLB", crlb(L, db_to_linear(s)), 0, cfg.master_seed)
                        for s in cfg.snr_points])


# -- output ------------------------------------------------------------------

def to_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in result.rows:
        w.writerow((repr(float(r.snr_db)), r.estimator, r.metric, repr(float(r.value)),
                    r.trials, r.seed))
    return buf.getvalue()


def emit_csv(result: SweepResult, path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(to_csv(result), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
    return path


def read_csv(path) -> SweepResult:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read CSV from {path}: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_HEADER:
        raise ValueError(f"{path}: unexpected header {header}")
    return SweepResult([Row(float(a), b, c, float(d), int(e), int(f))
                        for a, b, c, d, e, f in reader])


def emit_plot(result: SweepResult, path, title: str | None = None) -> Path:
    """Standalone SVG line chart, one line per (estimator, metric)."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "isac-dfs"
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    series: dict[tuple[str, str], list[Row]] = {}
    for r in result.rows:
        series.setdefault((r.estimator, r.metric), []).append(r)
    for (name, metric), rows in series.items():
        rows = sorted(rows, key=lambda r: r.snr_db)
        style = "--" if metric == "CRLB" or name in ("analytic", "perfect") else "-o"
        ax.plot([r.snr_db for r in rows], [r.value for r in rows], style,
                label=f"{name} ({metric})", markersize=3)
    values = [r.value for r in result.rows]
    if values and min(values) > 0:
        ax.set_yscale("log")
    ax.set_xlabel("SNR (dB)")
    ax.grid(True, which="both", alpha=0.3)
    if series:
        ax.legend(fontsize=7)
    if title:
        ax.set_title(title)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise OSError(f"cannot write plot to {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **kw)
