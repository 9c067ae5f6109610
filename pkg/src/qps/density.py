"""Reduced oscillator density matrix under the adiabatic approximation.

The composite state at scaled time t = omega*t is

    |psi(t)> = sum_n e^{-i n t} c_n / sqrt(2)
               ( C_n^p(t) |+1, n_+>  +/-  (-1)^n conj(C_n^q(t)) |-1, n_-> )

with c_n = e^{-|a+|^2/2} a+^n / sqrt(n!), p the parity, q its flip, and
|n_+/-> = D(-/+ lambda/omega)|n>.  Tracing out the qubit leaves two rank-one
blocks, one per displaced basis.  The branched form keeps the two amplitude
vectors and builds the Fock-basis matrix only on request.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .dispmat import displacement_matrix
from .errors import DimensionMismatch, TruncationSpill
from .model import (
    ModelParams,
    Parity,
    build_spectral_table,
    choose_truncation,
    derive_params,
)


def coherent_amplitudes(alpha: complex, size: int) -> np.ndarray:
    """Fock amplitudes e^{-|a|^2/2} a^n / sqrt(n!) for n < size."""
    n = np.arange(size)
    alpha = complex(alpha)
    if alpha == 0:
        out = np.zeros(size, dtype=complex)
        out[0] = 1.0
        return out
    log_mag = n * math.log(abs(alpha)) - 0.5 * abs(alpha) ** 2 - 0.5 * gammaln(n + 1)
    return np.exp(log_mag + 1j * n * np.angle(alpha))


@dataclass(frozen=True)
class BranchedDensity:
    """rho = |v+><v+| in the D(-s) basis + |v-><v-| in the D(+s) basis.

    ``plus_amplitudes[n]`` is e^{-i n t} c_n C_n^p(t) / sqrt(2) and
    ``minus_amplitudes[n]`` is +/- e^{-i n t} (-1)^n c_n conj(C_n^q(t)) / sqrt(2);
    the overall parity sign is irrelevant for the reduced state.
    """

    n_max: int
    plus_amplitudes: np.ndarray
    minus_amplitudes: np.ndarray
    shift: float
    time: float
    parity: Parity

    @functools.cached_property
    def plus_block(self) -> np.ndarray:
        v = self.plus_amplitudes
        return np.outer(v, v.conj())

    @functools.cached_property
    def minus_block(self) -> np.ndarray:
        v = self.minus_amplitudes
        return np.outer(v, v.conj())

    def trace(self) -> float:
        return float(
            np.sum(np.abs(self.plus_amplitudes) ** 2) + np.sum(np.abs(self.minus_amplitudes) ** 2)
        )

    def branches(self):
        """(shift applied to beta, amplitudes) for each displaced basis."""
        return ((self.shift, self.plus_amplitudes), (-self.shift, self.minus_amplitudes))


def reduced_density(p: ModelParams, time: float, n_max: int | None = None) -> BranchedDensity:
    """Reduced oscillator state at scaled time ``time`` (= omega t)."""
    d = derive_params(p)
    if n_max is None:
        n_max = choose_truncation(d)
    table = build_spectral_table(d, n_max)
    n = np.arange(n_max + 1)
    c = coherent_amplitudes(d.alpha_plus, n_max + 1)
    rotation = np.exp(-1j * n * time)
    sign = (-1.0) ** n
    plus = c * table.coefficients(p.parity, time) * rotation / math.sqrt(2.0)
    minus = p.parity.sign * sign * c * np.conj(table.coefficients(p.parity.flipped, time)) * rotation
    minus /= math.sqrt(2.0)
    plus.setflags(write=False)
    minus.setflags(write=False)
    return BranchedDensity(n_max, plus, minus, d.shift, float(time), p.parity)


def coherent_density(alpha: complex, n_max: int, second: complex | None = None) -> BranchedDensity:
    """|alpha><alpha| in branched form, or the equal mixture with |second>.

    Both branches use the undisplaced basis (shift 0).
    """
    v = coherent_amplitudes(alpha, n_max + 1)
    if second is None:
        w = np.zeros(n_max + 1, dtype=complex)
    else:
        v = v / math.sqrt(2.0)
        w = coherent_amplitudes(second, n_max + 1) / math.sqrt(2.0)
    return BranchedDensity(n_max, v, w, 0.0, 0.0, Parity.PLUS)


@dataclass(frozen=True)
class FockDensity:
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Diagnostics:
    trace: float
    purity: float
    herm_defect: float
    min_eig: float


def default_fock_dim(n_max: int, shift: float) -> int:
    return n_max + math.ceil(8.0 * shift * math.sqrt(n_max)) + 16


def to_fock(b: BranchedDensity, dim: int | None = None) -> FockDensity:
    """Expand both displaced blocks in the undisplaced Fock basis."""
    if dim is None:
        dim = default_fock_dim(b.n_max, b.shift)
    if dim < b.n_max + 1:
        raise DimensionMismatch(f"dim {dim} smaller than the branched basis size {b.n_max + 1}")
    rho = np.zeros((dim, dim), dtype=complex)
    # |n_+> = D(-s)|n> is column n of D(-s); |n_-> = D(+s)|n>
    for basis_shift, amps in ((-b.shift, b.plus_amplitudes), (b.shift, b.minus_amplitudes)):
        u = displacement_matrix(basis_shift, dim, b.n_max + 1).entries
        psi = u @ amps
        rho += np.outer(psi, psi.conj())
    defect = abs(np.trace(rho).real - b.trace())
    if defect > 1e-6:
        raise TruncationSpill(f"Fock expansion to dim={dim} lost weight {defect:.3e}")
    return FockDensity(rho)


def matrix_diagnostics(f: FockDensity) -> Diagnostics:
    rho = f.matrix
    herm = 0.5 * (rho + rho.conj().T)
    return Diagnostics(
        trace=float(np.trace(rho).real),
        purity=float(np.real(np.vdot(rho.conj().T, rho))),
        herm_defect=float(np.abs(rho - rho.conj().T).max()),
        min_eig=float(np.linalg.eigvalsh(herm)[0]),
    )


def trace_distance(a: FockDensity, b: FockDensity) -> float:
    if a.matrix.shape != b.matrix.shape:
        raise DimensionMismatch(f"dims differ: {a.dim} vs {b.dim}")
    diff = a.matrix - b.matrix
    eig = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return 0.5 * float(np.sum(np.abs(eig)))


def ladder(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), 1)


def composite_hamiltonian(p: ModelParams, dim: int) -> np.ndarray:
    """Full qubit-oscillator Hamiltonian in units of omega.

    Basis ordering is qubit-major: index q*dim + n with q = 0 for sigma_z = +1.
    """
    w = p.omega
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    sz = np.diag([1.0, -1.0])
    a = ladder(dim)
    qubit = -0.5 * (p.delta / w) * sx - 0.5 * (p.epsilon / w) * sz
    h = np.kron(qubit, np.eye(dim))
    h += np.kron(np.eye(2), np.diag(np.arange(dim, dtype=float)))
    h += (p.lam / w) * np.kron(sz, a + a.T)
    return h


@functools.lru_cache(maxsize=8)
def _eigensystem(delta, epsilon, lam, omega, dim):
    p = ModelParams(delta, epsilon, lam, 0.0, omega)
    return np.linalg.eigh(composite_hamiltonian(p, dim))


@dataclass(frozen=True)
class ExactEvolution:
    """Dense-eigendecomposition propagator for repeated exact evaluations."""

    params: ModelParams
    dim: int
    _psi0_eig: np.ndarray = field(repr=False)
    _energies: np.ndarray = field(repr=False)
    _vectors: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, p: ModelParams, dim: int) -> "ExactEvolution":
        energies, vectors = _eigensystem(p.delta, p.epsilon, p.lam, p.omega, dim)
        up = coherent_amplitudes(p.alpha, dim)
        down = coherent_amplitudes(-p.alpha, dim)
        psi0 = np.concatenate([up, p.parity.sign * down]) / math.sqrt(2.0)
        return cls(p, dim, vectors.conj().T @ psi0, energies, vectors)

    def state(self, time: float) -> np.ndarray:
        return self._vectors @ (np.exp(-1j * self._energies * time) * self._psi0_eig)

    def reduced(self, time: float) -> FockDensity:
        psi = self.state(time).reshape(2, self.dim)
        return FockDensity(psi.T @ psi.conj())


def exact_evolve(p: ModelParams, time: float, dim: int | None = None) -> FockDensity:
    """Exact reduced oscillator state from the full Hamiltonian at scaled time ``time``."""
    if dim is None:
        d = derive_params(p)
        dim = default_fock_dim(choose_truncation(d), d.shift)
    return ExactEvolution.build(p, dim).reduced(time)
