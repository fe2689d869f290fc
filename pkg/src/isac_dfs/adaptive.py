"""Variance-gated switch between coarse-only and coarse+fine compensation.

A ring of the last ``n`` radar estimates is kept; when their population
variance reaches the threshold the Doppler is treated as high-dynamic and the
preamble fine stage runs.  Until two estimates exist the fine stage always
runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import EstimateRecord, Mode, OfdmConfig
from .estimator import coarse_and_fine, coarse_stage, compensate, total_estimate


@dataclass(frozen=True)
class GateConfig:
    threshold: float = 1e-4
    window: int = 8

    def __post_init__(self):
        if not self.threshold > 0:
            raise ValueError("gate threshold must be > 0")
        if self.window < 2:
            raise ValueError("gate window must be ≥ 2")


@dataclass(frozen=True)
class RadarHistory:
    capacity: int = 8
    window: tuple[float, ...] = ()

    @property
    def mean(self) -> float:
        return float(np.mean(self.window)) if self.window else float("nan")

    def __len__(self):
        return len(self.window)


def update(history: RadarHistory, eps_v: float) -> RadarHistory:
    w = (*history.window, float(eps_v))[-history.capacity:]
    return RadarHistory(history.capacity, w)


def variance(history: RadarHistory) -> float:
    if len(history) < 2:
        raise ValueError("variance needs at least two radar estimates")
    w = np.asarray(history.window)
    return float(np.mean((history.mean - w) ** 2))


def decide(sigma2: float, gate: GateConfig) -> Mode:
    return Mode.COARSE_AND_FINE if sigma2 >= gate.threshold else Mode.COARSE_ONLY


@dataclass(frozen=True)
class AdaptiveState:
    gate: GateConfig = GateConfig()
    history: RadarHistory = field(default=None)
    frames: int = 0
    fine_calls: int = 0

    def __post_init__(self):
        if self.history is None:
            object.__setattr__(self, "history", RadarHistory(self.gate.window))


def process_frame(frame_rx, state: AdaptiveState, cfg: OfdmConfig, tx_burst,
                  force_mode: Mode | None = None, *, eps_true: float = float("nan"),
                  snr_db: float = float("nan"), seed: int = 0):
    """Estimate, gate and compensate one frame.

    Returns ``(compensated_frame, record, new_state)``.  The history holds the
    raw radar estimates and is updated with the current one before the gate
    is evaluated.
    """
    eps_v = coarse_stage(frame_rx, tx_burst, cfg)
    history = update(state.history, eps_v)
    if force_mode is not None:
        mode = Mode(force_mode)
    elif len(history) < 2:
        mode = Mode.COARSE_AND_FINE
    else:
        mode = decide(variance(history), state.gate)
    eps_f = 0.0
    if mode is Mode.COARSE_AND_FINE:
        eps_v, eps_f = coarse_and_fine(frame_rx, eps_v, cfg)
    eps = total_estimate(eps_v, eps_f)
    record = EstimateRecord(
        trial_index=state.frames, snr_db=snr_db, eps_true=eps_true,
        eps_coarse=eps_v, eps_fine=eps_f, eps_total=eps, mode=mode,
        estimator_name="adaptive", seed=seed,
    )
    new_state = AdaptiveState(
        state.gate, history, state.frames + 1,
        state.fine_calls + (mode is Mode.COARSE_AND_FINE),
    )
    return compensate(frame_rx, eps, cfg.n_subcarriers), record, new_state
