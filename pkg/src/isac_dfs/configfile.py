"""Flat ``key = value`` experiment files.

Blank lines and ``#`` comments are ignored.  Unknown keys are an error.  See
README.md for the key list; values follow Python literal syntax for numbers
and comma-separated lists for ``snr_points`` / ``estimators``.  Doppler models
are written ``fixed:0.25`` or ``uniform:0.1:0.25``; extra paths as
``gain:delay:aoa:aod`` entries separated by ``;`` (path 0 is always LOS).
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

from .adaptive import GateConfig
from .channel import ChannelConfig, PathSpec
from .core import ConfigError, OfdmConfig, PreambleSpec
from .harness import DfsModel, ExperimentConfig

OFDM_KEYS = {
    "n_subcarriers": int, "cp_len": int, "subcarrier_spacing": float,
    "carrier_freq": float, "modulation_order": int, "burst_symbols": int,
}
RUN_KEYS = {"snr", "eps", "frames"}


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _dfs(text: str) -> DfsModel:
    kind, *vals = text.split(":")
    kind = kind.strip()
    if kind == "fixed" and len(vals) == 1:
        return DfsModel.fixed(float(vals[0]))
    if kind == "uniform" and len(vals) == 2:
        return DfsModel("uniform", float(vals[0]), float(vals[1]))
    raise ConfigError(f"bad dfs model {text!r}; use fixed:E or uniform:LO:HI")


def _paths(text: str) -> tuple[PathSpec, ...]:
    out = []
    for item in filter(None, (p.strip() for p in text.split(";"))):
        g, d, aoa, aod = item.split(":")
        out.append(PathSpec(complex(g.replace(" ", "")), int(d), float(aoa), float(aod)))
    return tuple(out)


def parse_text(text: str, source: str = "<config>") -> tuple[ExperimentConfig, dict]:
    """Parse a config; returns the experiment and the run-level extras (snr, eps, frames)."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        raw[key] = val
    try:
        return _build(raw)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def _build(raw: dict[str, str]) -> tuple[ExperimentConfig, dict]:
    raw = dict(raw)
    ofdm_kw = {k: OFDM_KEYS[k](raw.pop(k)) for k in list(raw) if k in OFDM_KEYS}
    pre_kw = {}
    if "block_len" in raw:
        pre_kw["block_len"] = int(raw.pop("block_len"))
    if "preamble_seed" in raw:
        pre_kw["seed"] = int(raw.pop("preamble_seed"))
    ofdm = OfdmConfig(**ofdm_kw, preamble=PreambleSpec(**pre_kw))

    ch_kw = {}
    if "n_antennas" in raw:
        ch_kw["n_antennas"] = int(raw.pop("n_antennas"))
    if "paths" in raw:
        ch_kw["paths"] = _paths(raw.pop("paths"))
    gate_kw = {}
    if "threshold" in raw:
        gate_kw["threshold"] = float(raw.pop("threshold"))
    if "window" in raw:
        gate_kw["window"] = int(raw.pop("window"))

    cfg = ExperimentConfig(ofdm=ofdm, channel=ChannelConfig(**ch_kw), gate=GateConfig(**gate_kw))
    simple = {
        "snr_points": _floats, "trials": int, "master_seed": int, "seed": int,
        "out_dir": str, "payload_symbols": int, "cpbe_symbols": int, "dfs": _dfs,
        "estimators": lambda s: tuple(e.strip() for e in s.split(",") if e.strip()),
    }
    kw = {}
    extras = {}
    for key, val in raw.items():
        if key in simple:
            kw["master_seed" if key == "seed" else key] = simple[key](val)
        elif key in RUN_KEYS:
            extras[key] = int(val) if key == "frames" else float(val)
        else:
            raise ConfigError(f"unknown key {key!r}")
    return replace(cfg, **kw), extras


def load(path) -> tuple[ExperimentConfig, dict]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    return parse_text(text, str(path))
