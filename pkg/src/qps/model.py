"""Adiabatic-approximation model of the biased qubit-oscillator system.

Every quantity here is expressed in units of the oscillator frequency: energies
are divided by omega and times are the scaled time omega*t.  The physical
model is

    H = -Delta/2 sigma_x - epsilon/2 sigma_z + omega a^dag a + lambda sigma_z (a^dag + a)

and, in the adiabatic regime Delta << omega, each Fock level n of the displaced
oscillators couples only the pair |+1, n_+> and |-1, n_->, giving a two-level
problem with splitting 2*chi_n.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateLevel, IndexOutOfRange


class Parity(str, Enum):
    """Sign of the quasi-Bell superposition (|1,a> +/- |-1,-a>)/sqrt(2)."""

    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> int:
        return 1 if self is Parity.PLUS else -1

    @property
    def flipped(self) -> "Parity":
        return Parity.MINUS if self is Parity.PLUS else Parity.PLUS


@dataclass(frozen=True)
class ModelParams:
    """Physical inputs.  ``delta``, ``epsilon`` and ``lam`` share the units of ``omega``."""

    delta: float
    epsilon: float
    lam: float
    alpha: complex
    omega: float = 1.0
    parity: Parity = Parity.PLUS

    def __post_init__(self):
        object.__setattr__(self, "parity", Parity(self.parity))
        object.__setattr__(self, "alpha", complex(self.alpha))
        for name in ("delta", "epsilon", "lam", "omega"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if not (math.isfinite(self.alpha.real) and math.isfinite(self.alpha.imag)):
            raise ValueError("alpha must be finite")
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.delta < 0:
            raise ValueError("delta must be non-negative")
        if self.lam < 0:
            raise ValueError("lam must be non-negative")


@dataclass(frozen=True)
class DerivedParams:
    """Dimensionless derived symbols (energies in units of omega)."""

    x: float
    delta_tilde: float
    eps_tilde: float
    alpha_plus: complex
    shift: float


def derive_params(p: ModelParams) -> DerivedParams:
    shift = p.lam / p.omega
    x = (2.0 * shift) ** 2
    return DerivedParams(
        x=x,
        delta_tilde=(p.delta / p.omega) * math.exp(-0.5 * x),
        eps_tilde=0.5 * p.epsilon / p.omega,
        alpha_plus=p.alpha + shift,
        shift=shift,
    )


def laguerre(n: int, x: float) -> float:
    """Laguerre polynomial L_n(x) by forward three-term recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    prev, cur = 0.0, 1.0
    for k in range(n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur


def laguerre_table(n_max: int, x: float) -> np.ndarray:
    """All values L_0(x) .. L_{n_max}(x)."""
    out = np.empty(n_max + 1)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 - x
    for k in range(1, n_max):
        out[k + 1] = ((2 * k + 1 - x) * out[k] - k * out[k - 1]) / (k + 1)
    return out


@dataclass(frozen=True)
class SpectralTable:
    """Per-level adiabatic quantities for n = 0 .. n_max.

    ``a_plus[n]`` holds A_n^+ = (chi_n + eps_t + (-1)^n delta_n) / (2 chi_n) and
    ``b_plus[n]`` holds B_n^+ = (chi_n - eps_t + (-1)^n delta_n) / (2 chi_n);
    the minus arrays flip the sign of the (-1)^n delta_n term.
    """

    n_max: int
    eps_tilde: float
    delta_n: np.ndarray
    chi_n: np.ndarray
    a_plus: np.ndarray
    a_minus: np.ndarray
    b_plus: np.ndarray
    b_minus: np.ndarray

    def coefficients(self, branch, time: float) -> np.ndarray:
        """C_n^branch(time) for every level, time in units of 1/omega.

        C_n^+ = A_n^- e^{i chi_n t} + B_n^+ e^{-i chi_n t}, and the minus branch
        swaps the roles of the superscripts.
        """
        branch = Parity(branch)
        phase = np.exp(1j * self.chi_n * time)
        if branch is Parity.PLUS:
            return self.a_minus * phase + self.b_plus * np.conj(phase)
        return self.a_plus * phase + self.b_minus * np.conj(phase)


def build_spectral_table(d: DerivedParams, n_max: int) -> SpectralTable:
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    lag = laguerre_table(n_max, d.x)
    delta_n = -0.5 * d.delta_tilde * lag
    chi_n = np.hypot(delta_n, d.eps_tilde)
    zero = np.flatnonzero(chi_n == 0.0)
    if zero.size:
        raise DegenerateLevel(int(zero[0]))
    signed = (-1.0) ** np.arange(n_max + 1) * delta_n
    two_chi = 2.0 * chi_n
    arrays = [
        (chi_n + d.eps_tilde + signed) / two_chi,
        (chi_n + d.eps_tilde - signed) / two_chi,
        (chi_n - d.eps_tilde + signed) / two_chi,
        (chi_n - d.eps_tilde - signed) / two_chi,
    ]
    for arr in (delta_n, chi_n, *arrays):
        arr.setflags(write=False)
    return SpectralTable(n_max, d.eps_tilde, delta_n, chi_n, *arrays)


def coefficient_c(t: SpectralTable, n: int, branch, time: float) -> complex:
    if not 0 <= n <= t.n_max:
        raise IndexOutOfRange(f"level {n} outside 0..{t.n_max}")
    branch = Parity(branch)
    phase = cmath.exp(1j * t.chi_n[n] * time)
    if branch is Parity.PLUS:
        return complex(t.a_minus[n] * phase + t.b_plus[n] / phase)
    return complex(t.a_plus[n] * phase + t.b_minus[n] / phase)


def poisson_tail(mean: float, n: int) -> float:
    """Sum of Poisson(mean) probabilities for levels strictly above n.

    Summed directly from the smallest terms upward so that tails far below
    machine epsilon are still resolved.
    """
    if mean == 0.0:
        return 0.0
    log_mean = math.log(mean)
    k = n + 1
    terms = []
    peak = 0.0
    while True:
        term = math.exp(k * log_mean - mean - math.lgamma(k + 1))
        terms.append(term)
        peak = max(peak, term)
        # past the mode the terms decay faster than geometrically
        if k > mean and term <= 1e-40 * peak:
            break
        k += 1
    return math.fsum(reversed(terms))


def choose_truncation(d: DerivedParams, tail_tol: float = 1e-12) -> int:
    """Fock cutoff N for the displaced-basis sums.

    N is the smallest level whose Poisson tail (mean |alpha_+|^2) falls below
    ``tail_tol``, raised to at least |a|^2 + 10|a| + 20 so that the oscillatory
    grid sums keep enough terms.
    """
    if not 0.0 < tail_tol < 1.0:
        raise ValueError("tail_tol must lie in (0, 1)")
    amp = abs(d.alpha_plus)
    mean = amp * amp
    floor = math.ceil(mean + 10.0 * amp + 20.0)
    n = 0
    while poisson_tail(mean, n) >= tail_tol:
        n += 1
    return max(n, floor)
