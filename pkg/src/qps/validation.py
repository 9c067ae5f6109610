"""Self-checks run by ``qps validate``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .density import coherent_density, reduced_density
from .dispmat import identity_lhs, identity_rhs
from .measures import integrate, negativity, wehrl_entropy, wigner_entropy
from .model import build_spectral_table, choose_truncation, derive_params
from .phasespace import husimi_field, make_grid, wigner_field, wigner_field_series


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value)) and self.value <= self.tolerance


def _coefficient_checks(cfg, n_max):
    table = build_spectral_table(derive_params(cfg.model), n_max)
    times = np.linspace(0.0, 100.0, 21)
    norm = max(
        np.abs(np.abs(table.coefficients("plus", t)) ** 2 + np.abs(table.coefficients("minus", t)) ** 2 - 2).max()
        for t in times
    )
    start = max(np.abs(table.coefficients(b, 0.0) - 1).max() for b in ("plus", "minus"))
    return [Check("|C+|^2 + |C-|^2 = 2", norm, 1e-12), Check("C(0) = 1", start, 1e-12)]


def _identity_check():
    worst = 0.0
    for x in (0.25, 1.0, 4.0):
        for m in range(13):
            for n in range(13):
                lhs, rhs = identity_lhs(m, n, x), identity_rhs(m, n, x)
                if rhs != 0.0:
                    worst = max(worst, abs(lhs - rhs) / abs(rhs))
                else:
                    worst = max(worst, abs(lhs))
    return Check("2F0 summation identity (rel)", worst, 1e-8)


def _entropy_checks():
    g = make_grid(9.0, 0.05)
    one = coherent_density(1.0 + 0.5j, 60)
    pair = coherent_density(4.0, 60, second=-4.0)
    s_q = 1.0 + math.log(math.pi)
    s_w = 1.0 + math.log(math.pi / 2.0)
    return [
        Check("S_Q coherent = 1 + ln pi", abs(wehrl_entropy(husimi_field(one, g)) - s_q), 2e-3),
        Check("S_W coherent = 1 + ln(pi/2)", abs(wigner_entropy(wigner_field(one, g)) - s_w), 2e-3),
        Check("S_Q two peaks adds ln 2", abs(wehrl_entropy(husimi_field(pair, g)) - s_q - math.log(2)), 5e-3),
        Check("S_W two peaks adds ln 2", abs(wigner_entropy(wigner_field(pair, g)) - s_w - math.log(2)), 5e-3),
    ]


def run_validation(cfg: RunConfig, report=None) -> list[Check]:
    """Run the invariant suite for ``cfg.model``; ``report`` receives each Check."""
    p = cfg.model
    d = derive_params(p)
    n_max = cfg.truncation.n_max
    if n_max is None:
        n_max = choose_truncation(d, cfg.truncation.tail_tol)
    grid = make_grid(cfg.half_width, cfg.grid.spacing)
    checks = []

    def add(items):
        for c in items:
            checks.append(c)
            if report is not None:
                report(c)

    add(_coefficient_checks(cfg, n_max))
    trace = max(abs(reduced_density(p, t, n_max).trace() - 1.0) for t in np.linspace(0, 100, 50))
    add([Check("trace of reduced state = 1", trace, 1e-10)])
    for t in (0.0, 50.0, 100.0):
        b = reduced_density(p, t, n_max)
        w = wigner_field(b, grid)
        q = husimi_field(b, grid)
        add(
            [
                Check(f"int W = 1 at t={t:g}", abs(integrate(w) - 1.0), 2e-3),
                Check(f"int Q = 1 at t={t:g}", abs(integrate(q) - 1.0), 2e-3),
                Check(f"Q >= 0 at t={t:g}", max(0.0, -q.values.min()), 1e-14),
                Check(f"|W| <= 2/pi at t={t:g}", max(0.0, np.abs(w.values).max() - 2 / math.pi), 1e-6),
            ]
        )
        if t == 0.0:
            add([Check("negativity at t=0", abs(negativity(w)), 2e-3)])
    coarse = make_grid(cfg.half_width, 2.0 * cfg.half_width / 40.0)
    b = reduced_density(p, 50.0, n_max)
    route = np.abs(wigner_field(b, coarse).values - wigner_field_series(b, coarse).values).max()
    add([Check("closed form vs series W (41x41, t=50)", route, 1e-6)])
    add([_identity_check()])
    add(_entropy_checks())
    return checks
