"""Flat ``key = value`` run configuration.

Lines are ``key = value``; ``#`` starts a comment; dotted keys group related
settings.  Every key is optional.  Model values are ratios to omega.

    delta = 0.15            # qubit splitting
    epsilon = 0.03          # static bias
    lambda = 0.3            # coupling
    alpha = 3               # complex allowed, e.g. 3+0.5j
    parity = plus           # plus | minus
    grid.half_width = auto  # auto -> |alpha| + lambda + 5
    grid.spacing = 0.05
    times.start = 0         # scaled time omega*t
    times.stop = 100
    times.step = 1
    truncation.tail_tol = 1e-12
    truncation.n_max = auto
    outputs.directory = .
    outputs.emit_fields = true
    outputs.emit_heatmaps = false
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import ParseError, RangeError, UnknownKey
from .model import ModelParams, Parity


@dataclass(frozen=True)
class GridConfig:
    half_width: float | None = None
    spacing: float = 0.05


@dataclass(frozen=True)
class TimeConfig:
    start: float = 0.0
    stop: float = 100.0
    step: float = 1.0

    def values(self) -> list[float]:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [self.start + i * self.step for i in range(count)]


@dataclass(frozen=True)
class TruncationConfig:
    tail_tol: float = 1e-12
    n_max: int | None = None


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "."
    emit_fields: bool = True
    emit_heatmaps: bool = False


DEFAULT_MODEL = ModelParams(delta=0.15, epsilon=0.03, lam=0.3, alpha=3.0)


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams = DEFAULT_MODEL
    grid: GridConfig = field(default_factory=GridConfig)
    times: TimeConfig = field(default_factory=TimeConfig)
    truncation: TruncationConfig = field(default_factory=TruncationConfig)
    outputs: OutputConfig = field(default_factory=OutputConfig)

    @property
    def half_width(self) -> float:
        if self.grid.half_width is not None:
            return self.grid.half_width
        return abs(self.model.alpha) + self.model.lam / self.model.omega + 5.0


def _float(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"non-finite value {text!r}")
    return value


def _bool(text):
    lowered = text.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _auto(convert):
    def parse(text):
        return None if text.lower() == "auto" else convert(text)

    return parse


# key -> (section, attribute, converter)
_KEYS = {
    "delta": ("model", "delta", _float),
    "epsilon": ("model", "epsilon", _float),
    "lambda": ("model", "lam", _float),
    "alpha": ("model", "alpha", complex),
    "parity": ("model", "parity", Parity),
    "grid.half_width": ("grid", "half_width", _auto(_float)),
    "grid.spacing": ("grid", "spacing", _float),
    "times.start": ("times", "start", _float),
    "times.stop": ("times", "stop", _float),
    "times.step": ("times", "step", _float),
    "truncation.tail_tol": ("truncation", "tail_tol", _float),
    "truncation.n_max": ("truncation", "n_max", _auto(int)),
    "outputs.directory": ("outputs", "directory", str),
    "outputs.emit_fields": ("outputs", "emit_fields", _bool),
    "outputs.emit_heatmaps": ("outputs", "emit_heatmaps", _bool),
}


def parse_config(text: str) -> RunConfig:
    sections = {"model": {}, "grid": {}, "times": {}, "truncation": {}, "outputs": {}}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        if key not in _KEYS:
            raise UnknownKey(f"unknown key {key!r}", lineno)
        section, attr, convert = _KEYS[key]
        try:
            sections[section][attr] = convert(value)
        except ValueError as exc:
            raise ParseError(f"bad value for {key}: {exc}", lineno) from None
        lines[(section, attr)] = lineno
    return _validated(sections, lines)


def _validated(sections, lines) -> RunConfig:
    def check(ok, section, attr, message):
        if not ok:
            raise RangeError(message, lines.get((section, attr)))

    model_kwargs = {"delta": 0.15, "epsilon": 0.03, "lam": 0.3, "alpha": 3.0, "parity": Parity.PLUS}
    model_kwargs.update(sections["model"])
    check(model_kwargs["delta"] >= 0, "model", "delta", "delta must be >= 0")
    check(model_kwargs["lam"] >= 0, "model", "lam", "lambda must be >= 0")
    alpha = model_kwargs["alpha"]
    check(math.isfinite(alpha.real) and math.isfinite(alpha.imag), "model", "alpha", "alpha must be finite")
    model = ModelParams(**model_kwargs)

    grid = replace(GridConfig(), **sections["grid"])
    check(grid.spacing > 0, "grid", "spacing", "grid.spacing must be > 0")
    if grid.half_width is not None:
        check(grid.half_width >= grid.spacing, "grid", "half_width", "grid.half_width must be >= grid.spacing")

    times = replace(TimeConfig(), **sections["times"])
    check(times.step > 0, "times", "step", "times.step must be > 0")
    check(times.stop >= times.start, "times", "stop", "times.stop must be >= times.start")

    trunc = replace(TruncationConfig(), **sections["truncation"])
    check(0 < trunc.tail_tol < 1, "truncation", "tail_tol", "truncation.tail_tol must lie in (0, 1)")
    if trunc.n_max is not None:
        check(trunc.n_max >= 0, "truncation", "n_max", "truncation.n_max must be >= 0")

    outputs = replace(OutputConfig(), **sections["outputs"])
    return RunConfig(model, grid, times, trunc, outputs)


def _fmt(value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Parity):
        return value.value
    if isinstance(value, complex):
        return repr(value.real) if value.imag == 0 else repr(value).strip("()")
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_config(cfg: RunConfig) -> str:
    lines = []
    for key, (section, attr, _) in _KEYS.items():
        lines.append(f"{key} = {_fmt(getattr(getattr(cfg, section), attr))}")
    return "\n".join(lines) + "\n"


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
