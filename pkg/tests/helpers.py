"""Shared parameter sets and cached fields for the test suite."""

from __future__ import annotations

import functools
import math
from fractions import Fraction

from qps import ModelParams, default_grid, husimi_field, reduced_density, wigner_field
from qps.model import choose_truncation, derive_params

STRONG = ModelParams(delta=0.15, epsilon=0.03, lam=0.3, alpha=3.0)
WEAK = ModelParams(delta=0.15, epsilon=0.03, lam=0.08, alpha=2.0)



def n_max_for(p: ModelParams) -> int:
    return choose_truncation(derive_params(p))


@functools.lru_cache(maxsize=None)
def strong_fields(time: float, spacing: float = 0.05):
    """(density, W, Q) at the strong-coupling parameters on the default grid."""
    g = default_grid(STRONG, spacing)
    b = reduced_density(STRONG, time, n_max_for(STRONG))
    return b, wigner_field(b, g), husimi_field(b, g)


def exact_two_f_zero(m: int, n: int, z) -> Fraction:
    """Terminating 2F0(-m, -n;; z) in rational arithmetic from explicit Pochhammers."""
    z = Fraction(z)
    total = Fraction(0)
    for r in range(min(m, n) + 1):
        poch_m = math.prod(-m + i for i in range(r))
        poch_n = math.prod(-n + i for i in range(r))
        total += Fraction(poch_m * poch_n, math.factorial(r)) * z**r
    return total
