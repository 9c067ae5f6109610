"""Wigner, Husimi and Glauber-Sudarshan representations on a square grid."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.ndimage import correlate1d
from scipy.special import gammaln

from . import _kernels
from .density import BranchedDensity
from .errors import KindMismatch
from .model import ModelParams, build_spectral_table, derive_params


class FieldKind(str, Enum):
    WIGNER = "wigner"
    HUSIMI = "husimi"


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform square grid over Re(beta), Im(beta) in [-L, L].

    Points sit at (i - (n-1)/2) * spacing, so the spacing is exact and the grid
    is symmetric about the origin even when 2L/h is not an integer.
    """

    half_width: float
    spacing: float
    nx: int
    ny: int

    @property
    def axis(self) -> np.ndarray:
        return (np.arange(self.nx) - 0.5 * (self.nx - 1)) * self.spacing

    @property
    def re_axis(self) -> np.ndarray:
        return self.axis

    @property
    def im_axis(self) -> np.ndarray:
        return (np.arange(self.ny) - 0.5 * (self.ny - 1)) * self.spacing

    def points(self) -> np.ndarray:
        """Complex beta values, shape (ny, nx); rows follow Im(beta)."""
        return self.re_axis[None, :] + 1j * self.im_axis[:, None]

    @property
    def max_radius(self) -> float:
        return math.hypot(self.re_axis[-1], self.im_axis[-1])


def make_grid(half_width: float, spacing: float) -> PhaseGrid:
    if not spacing > 0 or not half_width >= spacing:
        raise ValueError("need half_width >= spacing > 0")
    n = int(round(2.0 * half_width / spacing)) + 1
    return PhaseGrid(float(half_width), float(spacing), n, n)


def default_grid(p: ModelParams, spacing: float = 0.05) -> PhaseGrid:
    return make_grid(abs(p.alpha) + p.lam / p.omega + 5.0, spacing)


@dataclass(frozen=True)
class Field:
    grid: PhaseGrid
    kind: FieldKind
    values: np.ndarray
    time: float


def _stacked(b: BranchedDensity):
    shifts = np.array([s for s, _ in b.branches()])
    amps = np.ascontiguousarray(np.stack([v for _, v in b.branches()]))
    return shifts, amps


def wigner_field(b: BranchedDensity, g: PhaseGrid) -> Field:
    """W on the grid from the closed double sum over displaced-basis elements.

    Each branch contributes (2/pi) sum_{n,m} rho_nm (-1)^n <m|D(2 beta_s)|n>,
    which equals the 2F0 form with the removable 1/|beta_s|^2 singularity
    resolved through the associated-Laguerre recurrence.
    """
    shifts, amps = _stacked(b)
    values = _kernels.wigner_closed_grid(g.re_axis, g.im_axis, shifts, amps)
    return Field(g, FieldKind.WIGNER, values, b.time)


def series_cutoff(n_max: int, radius: float) -> int:
    """Displaced-number cutoff k_max for the alternating Wigner series.

    D(-beta)|n> for n <= n_max has Fock weight concentrated below
    (sqrt(n_max) + |beta|)^2; the margin covers its Poisson-like tail.
    """
    reach = math.sqrt(n_max) + radius
    return math.ceil(reach * reach + 10.0 * reach + 20.0)


def wigner_field_series(b: BranchedDensity, g: PhaseGrid, k_max: int | None = None) -> Field:
    """W from (2/pi) sum_k (-1)^k <beta,k|rho|beta,k>, an independent route."""
    if k_max is None:
        k_max = series_cutoff(b.n_max, g.max_radius + abs(b.shift))
    shifts, amps = _stacked(b)
    values = _kernels.wigner_series_grid(g.re_axis, g.im_axis, shifts, amps, int(k_max))
    return Field(g, FieldKind.WIGNER, values, b.time)


def wigner_series_terms(b: BranchedDensity, beta: complex, k_max: int) -> np.ndarray:
    """Per-k contributions (2/pi)(-1)^k <beta,k|rho|beta,k> at one point."""
    terms = np.zeros(k_max + 1)
    for shift, amps in b.branches():
        u = _kernels.displaced_projections(beta.real + shift, beta.imag, np.ascontiguousarray(amps), k_max)
        terms += np.abs(u) ** 2
    terms[1::2] *= -1.0
    return 2.0 / math.pi * terms


def wigner_imag_residue(b: BranchedDensity, g: PhaseGrid) -> float:
    """Max |Im W| from the unpaired double sum; the closed form must be real."""
    from .dispmat import displacement_matrix

    size = b.n_max + 1
    parity = (-1.0) ** np.arange(size)
    worst = 0.0
    for beta in g.points().ravel():
        total = 0j
        for shift, v in b.branches():
            dm = displacement_matrix(2.0 * (beta + shift), size, size).entries
            total += np.conj(v) @ dm @ (parity * v)
        worst = max(worst, abs(2.0 / math.pi * total.imag))
    return worst


def wigner_hypergeometric_point(p: ModelParams, time: float, beta: complex, n_max: int) -> float:
    """W at one point straight from the 2F0 double sum (fails at beta = +/-s).

    Kept as a literal cross-check of the closed form; it loses accuracy where
    |beta +/- s| is small because of the 1/|beta_s|^2 argument.
    """
    from .dispmat import two_f_zero

    d = derive_params(p)
    table = build_spectral_table(d, n_max)
    n = np.arange(n_max + 1)
    ap = d.alpha_plus
    c_p = table.coefficients(p.parity, time)
    c_q = table.coefficients(p.parity.flipped, time)
    total = 0j
    for bs, first in ((beta + d.shift, True), (beta - d.shift, False)):
        r2 = abs(bs) ** 2
        w = np.exp(n * np.log(2.0 * ap * np.conj(bs) + 0j) - gammaln(n + 1)) * np.exp(-1j * n * time)
        cn = c_p if first else np.conj(c_q) * (-1.0) ** n
        left = w * cn
        for i in range(n_max + 1):
            for j in range(n_max + 1):
                total += (
                    math.exp(-2.0 * r2) * left[i] * np.conj(left[j]) * two_f_zero(j, i, -0.25 / r2)
                )
    return float((math.exp(-abs(ap) ** 2) / math.pi * total).real)


def fourier_sums(p: ModelParams, time: float, beta, n_max: int):
    """The two Fourier sums entering Q, returned as (X, Y) arrays.

    X = sum_n (a+ conj(beta_+))^n / n! C_n^p e^{-i n t}
    Y = sum_n (-1)^n (a+ conj(beta_-))^n / n! conj(C_n^q) e^{-i n t}
    """
    d = derive_params(p)
    table = build_spectral_table(d, n_max)
    n = np.arange(n_max + 1)
    rot = np.exp(-1j * n * time)
    cx = table.coefficients(p.parity, time) * rot
    cy = (-1.0) ** n * np.conj(table.coefficients(p.parity.flipped, time)) * rot
    beta = np.asarray(beta, dtype=complex)
    ux = d.alpha_plus * np.conj(beta + d.shift)
    uy = d.alpha_plus * np.conj(beta - d.shift)
    inv_fact = np.exp(-gammaln(n + 1))
    return _horner(cx * inv_fact, ux), _horner(cy * inv_fact, uy)


def _horner(coeffs: np.ndarray, u: np.ndarray) -> np.ndarray:
    acc = np.full(u.shape, coeffs[-1], dtype=complex)
    for c in coeffs[-2::-1]:
        acc *= u
        acc += c
    return acc


def _scaled_square(log_scale, s):
    """exp(log_scale) * |s|^2 without overflowing |s|^2."""
    mag = np.abs(s)
    with np.errstate(divide="ignore"):
        return np.where(mag > 0, np.exp(log_scale + 2.0 * np.log(np.where(mag > 0, mag, 1.0))), 0.0)


def husimi_field(b: BranchedDensity, g: PhaseGrid) -> Field:
    """Q = (1/pi) <beta|rho|beta> evaluated through the displaced Fourier sums."""
    beta = g.points()
    n = np.arange(b.n_max + 1)
    inv_sqrt_fact = np.exp(-0.5 * gammaln(n + 1))
    q = np.zeros(beta.shape)
    for shift, amps in b.branches():
        bs = beta + shift
        s = _horner(amps * inv_sqrt_fact, np.conj(bs))
        q += _scaled_square(-np.abs(bs) ** 2, s)
    return Field(g, FieldKind.HUSIMI, q / math.pi, b.time)


def husimi_from_fourier_sums(p: ModelParams, g: PhaseGrid, time: float, n_max: int) -> Field:
    """Q assembled literally as (1/2pi) e^{-|a+|^2} (e^{-|b+|^2}|X|^2 + e^{-|b-|^2}|Y|^2)."""
    d = derive_params(p)
    beta = g.points()
    x, y = fourier_sums(p, time, beta, n_max)
    base = -abs(d.alpha_plus) ** 2
    q = _scaled_square(base - np.abs(beta + d.shift) ** 2, x)
    q += _scaled_square(base - np.abs(beta - d.shift) ** 2, y)
    return Field(g, FieldKind.HUSIMI, q / (2.0 * math.pi), time)


def weak_coupling_sums(p: ModelParams, time: float, beta):
    """Closed forms of X and Y with L_n(x) replaced by 1 - n x.

    Phi = a+ conj(beta_+) e^{-it}, Psi = a+ conj(beta_-) e^{-it}; the parallel and
    perpendicular parts carry cos and sin of x*tau/2 with tau = Delta~ t.
    """
    d = derive_params(p)
    beta = np.asarray(beta, dtype=complex)
    x = d.x
    tau = d.delta_tilde * time
    sign = p.parity.sign
    r1 = p.epsilon / p.omega / d.delta_tilde
    r2 = 0.5 * r1 * r1
    rot = np.exp(-1j * time)
    phi = d.alpha_plus * np.conj(beta + d.shift) * rot
    psi = d.alpha_plus * np.conj(beta - d.shift) * rot
    cos_h, sin_h = math.cos(0.5 * x * tau), math.sin(0.5 * x * tau)
    half, skew = 0.5 * tau, 0.5 * (1.0 - x) * tau
    phi_par, phi_perp = phi * cos_h, phi * sin_h
    psi_par, psi_perp = psi * cos_h, psi * sin_h

    big_x = (
        np.exp(phi_par) * np.cos(phi_perp - half)
        + sign * 1j * np.exp(-phi_par) * np.sin(phi_perp + half)
        - 1j * r1 * np.exp(phi_par) * (np.sin(phi_perp - half) + x * phi * np.sin(phi_perp - skew))
        - sign
        * 1j
        * r2
        * np.exp(-phi_par)
        * (np.sin(phi_perp + half) - 2.0 * x * phi * np.sin(phi_perp + skew))
    )
    big_y = (
        np.exp(-psi_par) * np.cos(psi_perp + half)
        - sign * 1j * np.exp(psi_par) * np.sin(psi_perp - half)
        - 1j * r1 * np.exp(-psi_par) * (np.sin(psi_perp + half) - x * psi * np.sin(psi_perp + skew))
        + sign
        * 1j
        * r2
        * np.exp(psi_par)
        * (np.sin(psi_perp - half) + 2.0 * x * psi * np.sin(psi_perp - skew))
    )
    return big_x, big_y


def husimi_weak_closed(p: ModelParams, g: PhaseGrid, time: float) -> Field:
    """Q from the linearised-Laguerre closed forms; meant for lambda/omega <~ 0.1."""
    d = derive_params(p)
    beta = g.points()
    x, y = weak_coupling_sums(p, time, beta)
    base = -abs(d.alpha_plus) ** 2
    q = _scaled_square(base - np.abs(beta + d.shift) ** 2, x)
    q += _scaled_square(base - np.abs(beta - d.shift) ** 2, y)
    return Field(g, FieldKind.HUSIMI, q / (2.0 * math.pi), time)


SMOOTHING_RADIUS = 4.0


def smooth_w_to_q(w: Field) -> Field:
    """Convolve W with the normalised kernel (2/pi) e^{-2|beta-gamma|^2}.

    The kernel factorises over Re and Im, so the direct sum runs as two 1-D
    passes truncated at |offset| <= 4 (tail below e^{-32}).  Points outside
    the grid count as zero.
    """
    if w.kind is not FieldKind.WIGNER:
        raise KindMismatch(f"expected a wigner field, got {w.kind.value}")
    h = w.grid.spacing
    reach = int(math.floor(SMOOTHING_RADIUS / h + 1e-9))
    offsets = np.arange(-reach, reach + 1) * h
    kernel = math.sqrt(2.0 / math.pi) * h * np.exp(-2.0 * offsets**2)
    values = correlate1d(w.values, kernel, axis=1, mode="constant")
    values = correlate1d(values, kernel, axis=0, mode="constant")
    return Field(w.grid, FieldKind.HUSIMI, values, w.time)


@dataclass(frozen=True)
class PRecord:
    n: int
    m: int
    branch: str
    coefficient: complex


@dataclass(frozen=True)
class PCoefficients:
    """Weights of e^{|b_s|^2} d^n/d beta^n d^m/d conj(beta)^m delta^2(b_s) terms.

    The derivatives act on the delta function only; ``plus_shift`` terms sit at
    beta_+ = beta + s and ``minus_shift`` terms at beta_- = beta - s.
    """

    n_max: int
    shift: float
    time: float
    plus_shift: np.ndarray
    minus_shift: np.ndarray

    def records(self):
        for name, table in (("plus_shift", self.plus_shift), ("minus_shift", self.minus_shift)):
            for n in range(self.n_max + 1):
                for m in range(self.n_max + 1):
                    yield PRecord(n, m, name, complex(table[n, m]))

    def trace(self) -> float:
        """Trace of rho recovered from the table: sum_n n! (p+_nn + p-_nn)."""
        n = np.arange(self.n_max + 1)
        diag = np.diag(self.plus_shift) + np.diag(self.minus_shift)
        return float(np.sum(diag.real * np.exp(gammaln(n + 1))))


def p_coefficients(p: ModelParams, time: float, n_max: int) -> PCoefficients:
    """Symbolic P-function weights of the reduced state.

    plus_shift[n, m]  = 1/2 e^{-|a+|^2} a+^n conj(a+)^m / (n! m!) (-1)^(n+m) C_n^p conj(C_m^p) e^{-i(n-m)t}
    minus_shift[n, m] = 1/2 e^{-|a+|^2} a+^n conj(a+)^m / (n! m!) conj(C_n^q) C_m^q e^{-i(n-m)t}
    """
    d = derive_params(p)
    table = build_spectral_table(d, n_max)
    n = np.arange(n_max + 1)
    ap = d.alpha_plus
    if ap == 0:
        weight = (n == 0).astype(complex)
    else:
        weight = np.exp(n * (math.log(abs(ap)) + 1j * np.angle(ap)) - gammaln(n + 1) - 0.5 * abs(ap) ** 2)
    weight = weight * np.exp(-1j * n * time)
    c_p = table.coefficients(p.parity, time)
    c_q = table.coefficients(p.parity.flipped, time)
    sign = (-1.0) ** n
    left_plus = weight * sign * c_p
    left_minus = weight * np.conj(c_q)
    plus = 0.5 * np.outer(left_plus, left_plus.conj())
    minus = 0.5 * np.outer(left_minus, left_minus.conj())
    # make the Hermitian pairing exact rather than exact up to rounding
    plus = 0.5 * (plus + plus.conj().T)
    minus = 0.5 * (minus + minus.conj().T)
    return PCoefficients(n_max, d.shift, float(time), plus, minus)


def husimi_from_p(pc: PCoefficients, beta) -> np.ndarray:
    """Q obtained by smearing the P table with (1/pi) e^{-|beta - gamma|^2}.

    Each term integrates to (1/pi) p_nm (-1)^(n+m) conj(b)^n b^m e^{-|b|^2}.
    """
    beta = np.asarray(beta, dtype=complex)
    n = np.arange(pc.n_max + 1)
    sign = (-1.0) ** n
    total = np.zeros(beta.shape)
    for bs, table in ((beta + pc.shift, pc.plus_shift), (beta - pc.shift, pc.minus_shift)):
        signed = sign[:, None] * table * sign[None, :]
        powers = np.conj(bs)[..., None] ** n
        quad = np.einsum("...n,nm,...m->...", powers, signed, np.conj(powers))
        total += (quad * np.exp(-np.abs(bs) ** 2)).real
    return total / math.pi


def write_field(f: Field, path) -> None:
    """Plain-text dump: five '#' header lines then ny rows of nx values."""
    g = f.grid
    lines = [
        f"# kind {f.kind.value}",
        f"# time {f.time!r}",
        f"# half_width {g.half_width!r}",
        f"# spacing {g.spacing!r}",
        f"# nx ny {g.nx} {g.ny}",
    ]
    body = "\n".join(" ".join(f"{v:.17g}" for v in row) for row in f.values)
    Path(path).write_text("\n".join(lines) + "\n" + body + "\n", encoding="ascii")


def read_field(path) -> Field:
    text = Path(path).read_text(encoding="ascii").splitlines()
    header = {}
    for line in text[:5]:
        key, _, rest = line[1:].strip().partition(" ")
        if key == "nx":
            rest = rest.split(" ", 1)[1]
        header[key] = rest
    nx, ny = (int(v) for v in header["nx"].split())
    values = np.array([[float(v) for v in row.split()] for row in text[5:] if row.strip()])
    if values.shape != (ny, nx):
        raise ValueError(f"field body has shape {values.shape}, header says {(ny, nx)}")
    grid = PhaseGrid(float(header["half_width"]), float(header["spacing"]), nx, ny)
    return Field(grid, FieldKind(header["kind"]), values, float(header["time"]))


def write_pgm(f: Field, path) -> None:
    """8-bit ASCII graymap with fixed scales: W in [-2/pi, 2/pi], Q in [0, 1/pi].

    The top image row is the largest Im(beta).
    """
    if f.kind is FieldKind.WIGNER:
        lo, hi = -2.0 / math.pi, 2.0 / math.pi
    else:
        lo, hi = 0.0, 1.0 / math.pi
    scaled = np.clip(np.rint((f.values - lo) / (hi - lo) * 255.0), 0, 255).astype(int)[::-1]
    rows = "\n".join(" ".join(str(v) for v in row) for row in scaled)
    Path(path).write_text(f"P2\n{f.grid.nx} {f.grid.ny}\n255\n{rows}\n", encoding="ascii")
