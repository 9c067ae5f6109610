import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import STRONG, n_max_for
from qps import ModelParams, Parity, build_spectral_table, choose_truncation, coefficient_c, derive_params, laguerre
from qps.errors import DegenerateLevel, IndexOutOfRange
from qps.model import DerivedParams, laguerre_table, poisson_tail


def _series(n, x):
    x = Fraction(x)
    return sum(Fraction((-1) ** k * math.comb(n, k), math.factorial(k)) * x**k for k in range(n + 1))


def test_derive_params_strong():
    d = derive_params(STRONG)
    assert d.x == pytest.approx(0.36, abs=1e-15)
    assert d.delta_tilde == pytest.approx(0.15 * math.exp(-0.18), rel=1e-15)
    assert d.eps_tilde == pytest.approx(0.015, abs=1e-17)
    assert d.alpha_plus == pytest.approx(3.3, abs=1e-15)
    assert d.alpha_plus - STRONG.alpha == pytest.approx(d.shift, abs=1e-15)
    assert d.delta_tilde <= STRONG.delta


def test_derive_params_zero_coupling():
    p = ModelParams(0.2, 0.01, 0.0, 1.5 - 0.5j)
    d = derive_params(p)
    assert (d.x, d.delta_tilde, d.alpha_plus) == (0.0, 0.2, 1.5 - 0.5j)


@pytest.mark.parametrize(
    "kwargs",
    [dict(omega=0.0), dict(delta=-0.1), dict(lam=-0.1), dict(epsilon=math.inf), dict(alpha=complex(math.nan, 0))],
)
def test_model_params_validation(kwargs):
    base = dict(delta=0.15, epsilon=0.03, lam=0.3, alpha=3.0)
    base.update(kwargs)
    with pytest.raises(ValueError):
        ModelParams(**base)


def test_laguerre_small_cases():
    assert laguerre(0, 7.3) == 1.0
    assert laguerre(1, 0.36) == pytest.approx(0.64, abs=1e-16)
    assert laguerre(5, 2.0) == pytest.approx(float(_series(5, 2)), rel=1e-14)


@pytest.mark.parametrize("x", np.round(np.linspace(-4.0, 4.0, 33), 12))
def test_laguerre_matches_series(x):
    table = laguerre_table(30, x)
    for n in range(31):
        exact = float(_series(n, x))
        assert laguerre(n, x) == pytest.approx(exact, rel=1e-10, abs=0)
        assert table[n] == laguerre(n, x)


def test_table_degenerate_limit():
    # epsilon = 0 with lambda -> 0: delta_0 = -Delta/2 < 0, so A_0^+ = 0 and A_0^- = 1
    d = DerivedParams(x=0.0, delta_tilde=0.2, eps_tilde=0.0, alpha_plus=1.0, shift=0.0)
    t = build_spectral_table(d, 4)
    assert t.delta_n[0] == -0.1 and t.chi_n[0] == 0.1
    assert (t.a_plus[0], t.a_minus[0]) == (0.0, 1.0)
    assert (t.b_plus[0], t.b_minus[0]) == (0.0, 1.0)


def test_table_strong_invariants():
    n_max = n_max_for(STRONG)
    t = build_spectral_table(derive_params(STRONG), n_max)
    for arr in (t.delta_n, t.chi_n, t.a_plus, t.a_minus, t.b_plus, t.b_minus):
        assert arr.shape == (n_max + 1,)
        assert np.all(np.isfinite(arr))
        assert not arr.flags.writeable
    assert np.all(t.chi_n > 0)
    np.testing.assert_allclose(t.chi_n, np.hypot(t.delta_n, t.eps_tilde), rtol=1e-15)
    np.testing.assert_allclose(t.a_minus + t.b_plus, 1.0, atol=1e-14)
    np.testing.assert_allclose(t.a_plus + t.b_minus, 1.0, atol=1e-14)


def test_degenerate_level_reported():
    # x = 1 puts a root of L_1 exactly on the grid of levels
    p = ModelParams(delta=0.15, epsilon=0.0, lam=0.5, alpha=1.0)
    with pytest.raises(DegenerateLevel) as info:
        build_spectral_table(derive_params(p), 10)
    assert info.value.n == 1


def test_table_invariant_under_omega_rescaling():
    a = ModelParams(0.15, 0.03, 0.3, 3.0)
    b = ModelParams(0.45, 0.09, 0.9, 3.0, omega=3.0)
    ta = build_spectral_table(derive_params(a), 40)
    tb = build_spectral_table(derive_params(b), 40)
    for name in ("delta_n", "chi_n", "a_plus", "a_minus", "b_plus", "b_minus"):
        np.testing.assert_allclose(getattr(ta, name), getattr(tb, name), rtol=1e-12, atol=1e-15)


def test_coefficients_at_zero_time():
    t = build_spectral_table(derive_params(STRONG), 64)
    for branch in Parity:
        np.testing.assert_allclose(t.coefficients(branch, 0.0), 1.0, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(0, 64), time=st.floats(-1e3, 1e3))
def test_coefficient_norm_identity(n, time):
    t = build_spectral_table(derive_params(STRONG), 64)
    plus = coefficient_c(t, n, "plus", time)
    minus = coefficient_c(t, n, Parity.MINUS, time)
    assert abs(abs(plus) ** 2 + abs(minus) ** 2 - 2.0) < 1e-12
    assert plus == pytest.approx(t.coefficients("plus", time)[n], abs=1e-13)


def test_zero_bias_coefficients_are_phases():
    p = ModelParams(0.15, 0.0, 0.3, 3.0)
    t = build_spectral_table(derive_params(p), 30)
    for time in (0.3, 17.0, 99.0):
        for branch in Parity:
            np.testing.assert_allclose(np.abs(t.coefficients(branch, time)), 1.0, atol=1e-14)


def test_coefficient_index_checked():
    t = build_spectral_table(derive_params(STRONG), 5)
    with pytest.raises(IndexOutOfRange):
        coefficient_c(t, 6, "plus", 1.0)
    with pytest.raises(IndexOutOfRange):
        coefficient_c(t, -1, "plus", 1.0)


def test_truncation_vacuum_floor():
    d = DerivedParams(x=0.0, delta_tilde=0.1, eps_tilde=0.01, alpha_plus=0.0, shift=0.0)
    assert choose_truncation(d) == 20


def test_truncation_strong_tail():
    d = derive_params(STRONG)
    n = choose_truncation(d, 1e-12)
    assert poisson_tail(abs(d.alpha_plus) ** 2, n) < 1e-12
    assert n >= math.ceil(3.3**2 + 33 + 20)


@pytest.mark.parametrize("alpha", [0.5, 2.0, 3.3, 6.0, 9.0])
def test_truncation_monotone_in_tolerance(alpha):
    d = DerivedParams(x=0.0, delta_tilde=0.1, eps_tilde=0.01, alpha_plus=alpha, shift=0.0)
    assert choose_truncation(d, 1e-14) >= choose_truncation(d, 1e-8)


def test_poisson_tail_against_complement():
    mean = 4.0
    head = sum(math.exp(-mean) * mean**k / math.factorial(k) for k in range(6))
    assert poisson_tail(mean, 5) == pytest.approx(1.0 - head, rel=1e-12)
    assert poisson_tail(0.0, 3) == 0.0
