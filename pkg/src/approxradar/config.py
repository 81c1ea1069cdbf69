"""
Run configuration files.

One ``key = value`` per line, ``#`` starts a comment. Values are numbers
(``inf`` allowed), bare or quoted strings, lists ``[a, b]`` and SNR triples
``{start, stop, step}``. Unknown keys are rejected; missing keys keep the
defaults below.

======================  ===================  ============================
key                     default              meaning
======================  ===================  ============================
carrier_hz              30e9                 carrier frequency
n_subcarriers           32                   subcarriers per symbol
n_symbols               16                   OFDM symbols per frame
subcarrier_spacing_hz   960e3                subcarrier spacing
cp_s                    0.26e-6              cyclic prefix duration
total_symbol_s          1.3e-6               symbol + CP duration
zc_root                 1                    Zadoff-Chu root
n_ifft                  512                  periodogram IFFT size
estimator_mode          zeropad_average      or ``flattened``
twiddle_sign            1                    +1 true IFFT, -1 literal W_N
range_m                 50                   target range
velocity_mps            20                   target radial velocity
amplitude               1.0                  target reflection amplitude
pairs                   [acc+acc]            operator-pair spec strings
snr_grid                {-5, 10, 1}          start, stop, step in dB
runs                    100                  Monte Carlo runs per point
seed                    0                    master seed
cost_table              (none)               cost CSV for ``pareto``
output_dir              $APPROXRADAR_OUTPUT_DIR or (none)
======================  ===================  ============================
"""
from __future__ import annotations

import dataclasses
import math
import os
import re
from dataclasses import dataclass, field

from .dse import snr_grid as make_snr_grid
from .errors import ConfigError, ApproxRadarError
from .fxp import parse_pair
from .radar import RadarConfig, TargetModel

OUTPUT_DIR_ENV = "APPROXRADAR_OUTPUT_DIR"

_RADAR_KEYS = {f.name for f in dataclasses.fields(RadarConfig)} - {"c_mps"}
_TARGET_KEYS = {f.name for f in dataclasses.fields(TargetModel)}
_RUN_KEYS = {"pairs", "snr_grid", "runs", "seed", "cost_table", "output_dir"}
_INT_KEYS = {"n_subcarriers", "n_symbols", "zc_root", "n_ifft", "twiddle_sign", "runs", "seed"}
_STR_KEYS = {"estimator_mode", "cost_table", "output_dir"}


@dataclass(frozen=True)
class RunConfig:
    radar: RadarConfig = field(default_factory=RadarConfig)
    target: TargetModel = field(default_factory=TargetModel)
    pairs: tuple[str, ...] = ("acc+acc",)
    snr_start_db: float = -5.0
    snr_stop_db: float = 10.0
    snr_step_db: float = 1.0
    runs: int = 100
    seed: int = 0
    cost_table_path: str | None = None
    output_dir: str | None = field(default_factory=lambda: os.environ.get(OUTPUT_DIR_ENV) or None)

    @property
    def snr_grid(self) -> list[float]:
        return make_snr_grid(self.snr_start_db, self.snr_stop_db, self.snr_step_db)

    @property
    def estimator_mode(self) -> str:
        return self.radar.estimator_mode

    @property
    def twiddle_sign(self) -> int:
        return self.radar.twiddle_sign


_NUMBER = re.compile(r"^[+-]?(inf|(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)$", re.IGNORECASE)


def _scalar(text: str):
    t = text.strip().replace("−", "-")
    if len(t) >= 2 and t[0] == t[-1] and t[0] in "'\"":
        return t[1:-1]
    if _NUMBER.match(t):
        if re.match(r"^[+-]?\d+$", t):
            return int(t)
        return float(t)
    return t


def _split_items(body: str) -> list[str]:
    return [p for p in (s.strip() for s in body.split(",")) if p]


def _value(text: str):
    t = text.strip()
    if t.startswith("[") and t.endswith("]"):
        return [_scalar(s) for s in _split_items(t[1:-1])]
    if t.startswith("{") and t.endswith("}"):
        return tuple(_scalar(s) for s in _split_items(t[1:-1]))
    if not t:
        raise ValueError("empty value")
    return _scalar(t)


def _coerce(key, val, line):
    def bad(msg):
        return ConfigError(msg, line=line, key=key)

    if key == "pairs":
        items = val if isinstance(val, list) else [val]
        if not items or not all(isinstance(p, str) for p in items):
            raise bad("expected a list of pair specs")
        for p in items:
            try:
                parse_pair(p)
            except ApproxRadarError as exc:
                raise bad(str(exc)) from None
        return tuple(items)
    if key == "snr_grid":
        if not (isinstance(val, tuple) and len(val) == 3
                and all(isinstance(v, (int, float)) for v in val)):
            raise bad("expected {start, stop, step}")
        if not val[2] > 0:
            raise bad("snr step must be positive")
        return tuple(float(v) for v in val)
    if key in _STR_KEYS:
        if not isinstance(val, str):
            raise bad("expected a string")
        return val
    if key in _INT_KEYS:
        if not isinstance(val, int):
            raise bad("expected an integer")
        return val
    if not isinstance(val, (int, float)) or isinstance(val, bool):
        raise bad("expected a number")
    if not math.isfinite(val):
        raise bad("expected a finite number")
    return float(val)


def parse_config_text(text: str) -> RunConfig:
    radar, target, run = {}, {}, {}
    known = _RADAR_KEYS | _TARGET_KEYS | _RUN_KEYS
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, _, rhs = line.partition("=")
        key = key.strip()
        if not re.match(r"^[A-Za-z_][A-Za-z0-9_]*$", key):
            raise ConfigError(f"malformed key '{key}'", line=lineno)
        if key not in known:
            raise ConfigError("unknown key", line=lineno, key=key)
        if key in seen:
            raise ConfigError("duplicate key", line=lineno, key=key)
        seen.add(key)
        try:
            val = _value(rhs)
        except ValueError as exc:
            raise ConfigError(str(exc), line=lineno, key=key) from None
        val = _coerce(key, val, lineno)
        if key in _RADAR_KEYS:
            radar[key] = val
        elif key in _TARGET_KEYS:
            target[key] = val
        else:
            run[key] = val

    try:
        radar_cfg = RadarConfig(**radar)
        target_cfg = TargetModel(**target)
        target_cfg.validate(radar_cfg)
    except ApproxRadarError as exc:
        raise ConfigError(str(exc)) from None

    kwargs = {"radar": radar_cfg, "target": target_cfg}
    if "snr_grid" in run:
        kwargs["snr_start_db"], kwargs["snr_stop_db"], kwargs["snr_step_db"] = run.pop("snr_grid")
    if "cost_table" in run:
        kwargs["cost_table_path"] = run.pop("cost_table")
    if "runs" in run and run["runs"] < 1:
        raise ConfigError("runs must be >= 1", key="runs")
    kwargs.update(run)
    cfg = RunConfig(**kwargs)
    try:
        cfg.snr_grid
    except ApproxRadarError as exc:
        raise ConfigError(str(exc), key="snr_grid") from None
    return cfg


def parse_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read())
