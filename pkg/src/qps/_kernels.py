"""Compiled inner loops for displacement elements and Wigner grid sums.

All routines share one recurrence.  Along a diagonal of the displacement
matrix, m = n + d, the element factorises as

    D_{n+d,n}(z) = h_d(z) * g_n,     h_d = e^{-|z|^2/2} z^d / sqrt(d!)

where g_n = sqrt(d! n!/(n+d)!) L_n^{(d)}(|z|^2) is real and obeys

    g_{n+1} = ((2n+1+d - x) g_n - sqrt(n(n+d)) g_{n-1}) / sqrt((n+1)(n+1+d)),

with g_0 = 1 and x = |z|^2.  Elements above the diagonal follow from
D_{n,n+d}(z) = h_d(-conj(z)) g_n.  The forward recurrence is stable for the
Laguerre polynomials and keeps every product of order one.
"""

import math
import os

import numba
import numpy as np
from numba import njit, prange

if numba.config.THREADING_LAYER == "default":
    numba.config.THREADING_LAYER = "workqueue"

_LOG_TINY = -740.0


def apply_worker_cap() -> int:
    """Limit compiled loops to QPS_WORKERS threads when that variable is set."""
    cap = os.environ.get("QPS_WORKERS")
    if cap:
        numba.set_num_threads(max(1, min(int(cap), numba.config.NUMBA_NUM_THREADS)))
    return numba.get_num_threads()


@njit(cache=True)
def displacement_block(z, rows, cols):
    out = np.zeros((rows, cols), dtype=np.complex128)
    x = z.real * z.real + z.imag * z.imag
    for upper in range(2):
        w = z if upper == 0 else -np.conj(z)
        h = math.exp(-0.5 * x) + 0j
        d_stop = rows if upper == 0 else cols
        for d in range(upper, d_stop):
            if d > 0:
                h = h * w / math.sqrt(d)
            if upper == 0:
                last = min(cols - 1, rows - 1 - d)
            else:
                last = min(rows - 1, cols - 1 - d)
            if last < 0:
                break
            g0 = 0.0
            g1 = 1.0
            for n in range(last + 1):
                if upper == 0:
                    out[n + d, n] = h * g1
                else:
                    out[n, n + d] = h * g1
                g2 = ((2 * n + 1 + d - x) * g1 - math.sqrt(n * (n + d + 0.0)) * g0) / math.sqrt(
                    (n + 1.0) * (n + 1 + d)
                )
                g0 = g1
                g1 = g2
    return out


@njit(cache=True)
def _parity_weighted(amps):
    """coef[d, n] = conj(v_{n+d}) v_n (-1)^n for one branch."""
    size = amps.shape[0]
    coef = np.zeros((size, size), dtype=np.complex128)
    for d in range(size):
        for n in range(size - d):
            sign = 1.0 if n % 2 == 0 else -1.0
            coef[d, n] = np.conj(amps[n + d]) * amps[n] * sign
    return coef


@njit(cache=True)
def _recurrence_tables(size):
    """Coefficients of g_{n+1} = (a - x b) g_n - c g_{n-1} on every diagonal d."""
    a = np.zeros((size, size))
    b = np.zeros((size, size))
    c = np.zeros((size, size))
    for d in range(size):
        for n in range(size - d):
            r = 1.0 / math.sqrt((n + 1.0) * (n + 1 + d))
            a[d, n] = (2 * n + 1 + d) * r
            b[d, n] = r
            c[d, n] = math.sqrt(n * (n + d + 0.0)) * r
    return a, b, c


@njit(cache=True)
def _closed_form_point(zr, zi, coef, ta, tb, tc, size):
    """Re of sum_{n,m} conj(v_m) v_n (-1)^n D_{mn}(z), pairing m<n with m>n."""
    x = zr * zr + zi * zi
    log_abs = 0.5 * math.log(x) if x > 0.0 else 0.0
    theta = math.atan2(zi, zr)
    acc = 0.0
    for d in range(size):
        if d > 0 and x == 0.0:
            break
        log_h = -0.5 * x + d * log_abs - 0.5 * math.lgamma(d + 1.0)
        if log_h < _LOG_TINY:
            continue
        sr = 0.0
        si = 0.0
        g0 = 0.0
        g1 = 1.0
        for n in range(size - d):
            cv = coef[d, n]
            sr += cv.real * g1
            si += cv.imag * g1
            g2 = (ta[d, n] - x * tb[d, n]) * g1 - tc[d, n] * g0
            g0 = g1
            g1 = g2
        term = math.exp(log_h) * (sr * math.cos(d * theta) - si * math.sin(d * theta))
        acc += term if d == 0 else 2.0 * term
    return acc


@njit(cache=True, parallel=True)
def wigner_closed_grid(re_axis, im_axis, shifts, amps):
    """Wigner field of sum_b |v_b><v_b| with branch b displaced by -shifts[b].

    W(beta) = (2/pi) sum_b sum_{n,m} v_n conj(v_m) (-1)^n D_{mn}(2 (beta + s_b)).
    Rows of the output follow ``im_axis``, columns ``re_axis``.
    """
    ny = im_axis.shape[0]
    nx = re_axis.shape[0]
    nb, size = amps.shape
    coefs = np.zeros((nb, size, size), dtype=np.complex128)
    for b in range(nb):
        coefs[b] = _parity_weighted(amps[b])
    ta, tb, tc = _recurrence_tables(size)
    out = np.zeros((ny, nx))
    for iy in prange(ny):
        for ix in range(nx):
            total = 0.0
            for b in range(nb):
                zr = 2.0 * (re_axis[ix] + shifts[b])
                zi = 2.0 * im_axis[iy]
                total += _closed_form_point(zr, zi, coefs[b], ta, tb, tc, size)
            out[iy, ix] = 2.0 / math.pi * total
    return out


@njit(cache=True)
def displaced_projections(br, bi, amps, k_max):
    """u_k = sum_m conj(v_m) D_{mk}(beta) for k = 0..k_max."""
    size = amps.shape[0]
    x = br * br + bi * bi
    z = complex(br, bi)
    u = np.zeros(k_max + 1, dtype=np.complex128)
    conj_v = np.conj(amps)
    for upper in range(2):
        w = z if upper == 0 else -np.conj(z)
        h = math.exp(-0.5 * x) + 0j
        d_stop = size if upper == 0 else k_max + 1
        for d in range(upper, d_stop):
            if d > 0:
                h = h * w / math.sqrt(d)
            if upper == 0:
                last = min(k_max, size - 1 - d)
            else:
                last = min(size - 1, k_max - d)
            if last < 0:
                break
            g0 = 0.0
            g1 = 1.0
            for n in range(last + 1):
                if upper == 0:
                    # element (m, k) = (n + d, n)
                    u[n] += conj_v[n + d] * h * g1
                else:
                    # element (m, k) = (n, n + d)
                    u[n + d] += conj_v[n] * h * g1
                g2 = ((2 * n + 1 + d - x) * g1 - math.sqrt(n * (n + d + 0.0)) * g0) / math.sqrt(
                    (n + 1.0) * (n + 1 + d)
                )
                g0 = g1
                g1 = g2
    return u


@njit(cache=True, parallel=True)
def wigner_series_grid(re_axis, im_axis, shifts, amps, k_max):
    """W(beta) = (2/pi) sum_b sum_k (-1)^k |u_k^b(beta + s_b)|^2."""
    ny = im_axis.shape[0]
    nx = re_axis.shape[0]
    nb = amps.shape[0]
    out = np.zeros((ny, nx))
    for iy in prange(ny):
        for ix in range(nx):
            total = 0.0
            for b in range(nb):
                u = displaced_projections(re_axis[ix] + shifts[b], im_axis[iy], amps[b], k_max)
                for k in range(k_max + 1):
                    p = u[k].real * u[k].real + u[k].imag * u[k].imag
                    total += p if k % 2 == 0 else -p
            out[iy, ix] = 2.0 / math.pi * total
    return out
