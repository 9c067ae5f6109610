"""Phase-space integrals, negativity, entropies and the time sweep."""

from __future__ import annotations

import io
from dataclasses import astuple, dataclass, fields

import numpy as np

from .density import reduced_density
from .errors import KindMismatch
from .model import ModelParams, choose_truncation, derive_params
from .phasespace import Field, FieldKind, PhaseGrid, husimi_field, wigner_field

CLAMP = 1e-300
DEFECT_LIMIT = 2e-3


def integrate(f: Field) -> float:
    """Midpoint rule h^2 * sum, reduced in a fixed row-major pairwise order."""
    return _integrate(f.values, f.grid.spacing)


def _integrate(values: np.ndarray, spacing: float) -> float:
    flat = np.ascontiguousarray(values, dtype=float).ravel()
    return float(np.add.reduce(flat)) * spacing * spacing


def _require(f: Field, kind: FieldKind) -> None:
    if f.kind is not kind:
        raise KindMismatch(f"expected a {kind.value} field, got {f.kind.value}")


def _entropy(values: np.ndarray, spacing: float) -> float:
    v = np.where(values < CLAMP, 0.0, values)
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = np.where(v > 0.0, v * np.log(np.where(v > 0.0, v, 1.0)), 0.0)
    return -_integrate(integrand, spacing)


def negativity(w: Field) -> float:
    """Negative volume measure: integral of |W| minus one."""
    _require(w, FieldKind.WIGNER)
    return _integrate(np.abs(w.values), w.grid.spacing) - 1.0


def wehrl_entropy(q: Field) -> float:
    """-int Q ln Q in nats."""
    _require(q, FieldKind.HUSIMI)
    return _entropy(q.values, q.grid.spacing)


def wigner_entropy(w: Field) -> float:
    """-int |W| ln |W| in nats."""
    _require(w, FieldKind.WIGNER)
    return _entropy(np.abs(w.values), w.grid.spacing)


@dataclass(frozen=True)
class SweepRecord:
    time: float
    negativity: float
    wigner_entropy: float
    wehrl_entropy: float
    trace_defect: float
    w_norm_defect: float
    q_norm_defect: float

    @property
    def flagged(self) -> bool:
        return max(self.trace_defect, self.w_norm_defect, self.q_norm_defect) >= DEFECT_LIMIT


CSV_HEADER = "omega_t,negativity,wigner_entropy,wehrl_entropy,trace_defect,w_norm_defect,q_norm_defect"


def _decimal(value: float) -> str:
    """Positional notation with 12 significant digits, trailing zeros kept."""
    text = np.format_float_positional(value, precision=12, unique=False, fractional=False, trim="k")
    return text + "0" if text.endswith(".") else text


@dataclass(frozen=True)
class TimeSeries:
    records: tuple

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    @property
    def times(self) -> np.ndarray:
        return self.column("time")

    def flagged(self) -> list:
        return [r for r in self.records if r.flagged]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(CSV_HEADER + "\n")
        for r in self.records:
            out.write(",".join(_decimal(v) for v in astuple(r)) + "\n")
        return out.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "TimeSeries":
        lines = [ln for ln in text.strip().splitlines() if ln]
        if lines[0] != CSV_HEADER:
            raise ValueError("unexpected CSV header")
        names = [f.name for f in fields(SweepRecord)]
        records = [SweepRecord(**dict(zip(names, map(float, ln.split(","))))) for ln in lines[1:]]
        return cls(tuple(records))


def measure(p: ModelParams, time: float, g: PhaseGrid, n_max: int) -> SweepRecord:
    b = reduced_density(p, time, n_max)
    w = wigner_field(b, g)
    q = husimi_field(b, g)
    return SweepRecord(
        time=float(time),
        negativity=negativity(w),
        wigner_entropy=wigner_entropy(w),
        wehrl_entropy=wehrl_entropy(q),
        trace_defect=abs(b.trace() - 1.0),
        w_norm_defect=abs(integrate(w) - 1.0),
        q_norm_defect=abs(integrate(q) - 1.0),
    )


def sweep(
    p: ModelParams,
    times,
    g: PhaseGrid,
    n_max: int | None = None,
    tail_tol: float = 1e-12,
    progress=None,
) -> TimeSeries:
    """Evaluate every measure at each scaled time; ``times`` must increase."""
    times = [float(t) for t in times]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("times must be strictly increasing")
    if n_max is None:
        n_max = choose_truncation(derive_params(p), tail_tol)
    records = []
    for t in times:
        records.append(measure(p, t, g, n_max))
        if progress is not None:
            progress(records[-1])
    return TimeSeries(tuple(records))
