"""Displacement-operator matrix elements <m|D(beta)|k> in the Fock basis."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels


def two_f_zero(m: int, n: int, z: complex) -> complex:
    """Terminating 2F0(-m, -n; ; z) = sum_r (-m)_r (-n)_r z^r / r!.

    The series stops after min(m, n) + 1 terms; it is summed in ascending r
    with a running product of the Pochhammer ratios.
    """
    if m < 0 or n < 0:
        raise ValueError("m and n must be non-negative")
    term = 1.0 + 0j
    total = term
    for r in range(min(m, n)):
        term *= (r - m) * (r - n) * z / (r + 1)
        total += term
    return total


def generalized_laguerre(n: int, a: int, x: float) -> float:
    """Associated Laguerre polynomial L_n^{(a)}(x) by forward recurrence."""
    prev, cur = 0.0, 1.0
    for k in range(n):
        prev, cur = cur, ((2 * k + 1 + a - x) * cur - (k + a) * prev) / (k + 1)
    return cur


def displacement_element(m: int, k: int, beta: complex) -> complex:
    """<m|D(beta)|k> from the associated-Laguerre closed form.

    For m >= k this is sqrt(k!/m!) beta^(m-k) e^{-|beta|^2/2} L_k^{(m-k)}(|beta|^2);
    m < k uses the conjugate-reflected argument -conj(beta).  Finite at beta = 0.
    """
    if m < 0 or k < 0:
        raise ValueError("indices must be non-negative")
    beta = complex(beta)
    if m < k:
        m, k = k, m
        beta = -beta.conjugate()
    d = m - k
    x = abs(beta) ** 2
    if x == 0.0:
        return complex(d == 0)
    log_mag = 0.5 * (math.lgamma(k + 1) - math.lgamma(m + 1)) + d * 0.5 * math.log(x) - 0.5 * x
    phase = cmath.exp(1j * d * cmath.phase(beta))
    return math.exp(log_mag) * generalized_laguerre(k, d, x) * phase


def displacement_element_hypergeometric(m: int, k: int, beta: complex) -> complex:
    """<m|D(beta)|k> through the 2F0 form; singular at beta = 0.

    (-1)^k e^{-|beta|^2/2} beta^m conj(beta)^k / sqrt(m! k!) 2F0(-m, -k; ; -1/|beta|^2)
    """
    beta = complex(beta)
    x = abs(beta) ** 2
    if x == 0.0:
        raise ZeroDivisionError("the hypergeometric form is undefined at beta = 0")
    log_mag = -0.5 * x + 0.5 * (m + k) * math.log(x) - 0.5 * (math.lgamma(m + 1) + math.lgamma(k + 1))
    phase = cmath.exp(1j * (m - k) * cmath.phase(beta))
    sign = -1.0 if k % 2 else 1.0
    return sign * math.exp(log_mag) * phase * two_f_zero(m, k, -1.0 / x)


@dataclass(frozen=True)
class DisplacementMatrix:
    beta: complex
    rows: int
    cols: int
    entries: np.ndarray

    def unitarity_defect(self) -> np.ndarray:
        """Per-row max |sum_k D_mk conj(D_m'k) - delta_mm'|."""
        gram = self.entries @ self.entries.conj().T
        return np.abs(gram - np.eye(self.rows)).max(axis=1)


def displacement_matrix(beta: complex, rows: int, cols: int) -> DisplacementMatrix:
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    entries = _kernels.displacement_block(complex(beta), int(rows), int(cols))
    entries.setflags(write=False)
    return DisplacementMatrix(complex(beta), int(rows), int(cols), entries)


def identity_lhs(m: int, n: int, x: float, tol: float = 1e-18) -> float:
    """sum_k (-1)^k x^k/k! 2F0(-k,-m;;-1/x) 2F0(-k,-n;;-1/x), summed until negligible.

    Summation stops once k exceeds both max(m, n) and x and the term magnitude
    drops below ``tol``.
    """
    total = 0.0
    compensation = 0.0
    k = 0
    log_x = math.log(x)
    while True:
        weight = math.exp(k * log_x - math.lgamma(k + 1))
        term = weight * (two_f_zero(k, m, -1.0 / x) * two_f_zero(k, n, -1.0 / x)).real
        if k % 2:
            term = -term
        # Kahan summation; the alternating terms peak far above the result
        y = term - compensation
        t = total + y
        compensation = (t - total) - y
        total = t
        if k > max(m, n) and k > x and abs(term) < tol:
            return total
        k += 1


def identity_rhs(m: int, n: int, x: float) -> float:
    """2^(m+n) e^{-x} 2F0(-m, -n; ; -1/(4x))."""
    return (2.0 ** (m + n) * math.exp(-x) * two_f_zero(m, n, -0.25 / x)).real
