import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import exact_two_f_zero
from qps import displacement_element, displacement_matrix, two_f_zero
from qps.density import coherent_amplitudes
from qps.dispmat import (
    displacement_element_hypergeometric,
    generalized_laguerre,
    identity_lhs,
    identity_rhs,
)
from qps.model import poisson_tail


def _log_abs(q: Fraction) -> float:
    return math.log(abs(q.numerator)) - math.log(q.denominator)


def exact_route(m: int, k: int, beta: complex) -> complex:
    """D_mk(beta) via the 2F0 form with the polynomial evaluated in rationals."""
    x = abs(beta) ** 2
    poly = exact_two_f_zero(m, k, -1 / Fraction(x))
    if poly == 0:
        return 0j
    log_mag = -0.5 * x + 0.5 * (m + k) * math.log(x) - 0.5 * (math.lgamma(m + 1) + math.lgamma(k + 1))
    sign = (-1) ** k * (1 if poly > 0 else -1)
    return sign * math.exp(log_mag + _log_abs(poly)) * cmath.exp(1j * (m - k) * cmath.phase(beta))


def test_two_f_zero_trivial_cases():
    assert two_f_zero(0, 7, 3.5) == 1
    assert two_f_zero(5, 0, -2.0) == 1
    for z in (-0.25, 0.7, 1.5 - 2j):
        assert two_f_zero(1, 1, z) == pytest.approx(1 + z, abs=1e-15)


def test_two_f_zero_rational_oracle():
    exact = exact_two_f_zero(3, 2, Fraction(-1, 4))
    assert exact == Fraction(1) + Fraction(6) * Fraction(-1, 4) + Fraction(6) * Fraction(1, 16)
    assert two_f_zero(3, 2, -0.25) == pytest.approx(float(exact), rel=1e-15)


@settings(max_examples=100, deadline=None)
@given(m=st.integers(0, 25), n=st.integers(0, 25), z=st.fractions(-2, 2, max_denominator=64))
def test_two_f_zero_matches_rationals(m, n, z):
    exact = exact_two_f_zero(m, n, z)
    scale = sum(
        abs(Fraction(math.prod(-m + i for i in range(r)) * math.prod(-n + i for i in range(r)), math.factorial(r)) * z**r)
        for r in range(min(m, n) + 1)
    )
    assert abs(two_f_zero(m, n, float(z)) - float(exact)) <= 1e-14 * float(scale)


def test_generalized_laguerre_small():
    x = 0.7
    assert generalized_laguerre(0, 3, x) == 1.0
    assert generalized_laguerre(1, 3, x) == pytest.approx(4 - x)
    assert generalized_laguerre(2, 1, x) == pytest.approx(0.5 * (x * x - 6 * x + 6))


def test_element_vacuum_and_origin():
    beta = 1.3 - 0.4j
    assert displacement_element(0, 0, beta) == pytest.approx(math.exp(-abs(beta) ** 2 / 2), rel=1e-15)
    for m in range(6):
        for k in range(6):
            assert displacement_element(m, k, 0) == (1.0 if m == k else 0.0)


def test_element_first_column_is_coherent_state():
    beta = -2.1 + 0.8j
    column = [displacement_element(m, 0, beta) for m in range(40)]
    np.testing.assert_allclose(column, coherent_amplitudes(beta, 40), rtol=1e-13, atol=1e-300)


def test_routes_agree_against_exact_2f0():
    worst = 0.0
    for r in (1e-3, 0.05, 0.9, 2.5, 5.0, 8.0):
        beta = cmath.rect(r, 0.37 + r)
        for m in range(0, 41, 3):
            for k in range(0, 41, 3):
                ref = exact_route(m, k, beta)
                got = displacement_element(m, k, beta)
                if ref == 0:
                    continue
                worst = max(worst, abs(got - ref) / abs(ref))
    assert worst < 1e-9


def test_float_hypergeometric_route_agrees_where_well_conditioned():
    for beta in (0.5 + 0.5j, -1.2 + 0.3j, 2.0j, 3.0):
        for m in range(11):
            for k in range(11):
                ref = displacement_element(m, k, beta)
                got = displacement_element_hypergeometric(m, k, beta)
                assert abs(got - ref) <= 1e-9 * max(abs(ref), 1e-12)
    with pytest.raises(ZeroDivisionError):
        displacement_element_hypergeometric(1, 1, 0)


def test_matrix_identity_at_origin():
    dm = displacement_matrix(0, 12, 9)
    np.testing.assert_array_equal(dm.entries, np.eye(12, 9))
    assert not dm.entries.flags.writeable


def test_matrix_matches_elements():
    beta = 1.7 - 2.2j
    dm = displacement_matrix(beta, 30, 25)
    ref = np.array([[displacement_element(m, k, beta) for k in range(25)] for m in range(30)])
    np.testing.assert_allclose(dm.entries, ref, rtol=1e-12, atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(r=st.floats(0.0, 4.0), phi=st.floats(0, 2 * math.pi), size=st.integers(20, 80))
def test_unitarity_defect_within_tail(r, phi, size):
    dm = displacement_matrix(cmath.rect(r, phi), size, size)
    gram = dm.entries @ dm.entries.conj().T
    tail = poisson_tail(r * r, size - 1)
    # row 0 is the coherent state |-beta>: its norm misses exactly the Poisson
    # tail and its overlaps with other rows are bounded by Cauchy-Schwarz
    assert abs(gram[0, 0] - 1.0) <= tail + 1e-13
    assert dm.unitarity_defect()[0] <= math.sqrt(tail) + 1e-13


def test_product_with_inverse_is_identity():
    beta = 0.9 + 1.4j
    big = 120
    d_plus = displacement_matrix(beta, big, big).entries
    d_minus = displacement_matrix(-beta, big, big).entries
    block = (d_plus @ d_minus)[:30, :30]
    np.testing.assert_allclose(block, np.eye(30), atol=1e-12)
    adjoint = (d_plus @ d_plus.conj().T)[:30, :30]
    np.testing.assert_allclose(adjoint, np.eye(30), atol=1e-12)


def test_reflection_symmetry():
    beta = -0.6 + 2.3j
    dm = displacement_matrix(beta, 25, 25).entries
    sign = (-1.0) ** np.subtract.outer(np.arange(25), np.arange(25))
    np.testing.assert_allclose(dm, sign * dm.conj().T, atol=1e-14)


def test_summation_identity():
    worst = 0.0
    for x in (0.25, 1.0, 4.0):
        for m in range(13):
            for n in range(13):
                lhs, rhs = identity_lhs(m, n, x), identity_rhs(m, n, x)
                if rhs == 0.0:
                    # exact zeros of the right-hand polynomial: compare on its natural scale
                    assert abs(lhs) < 1e-8 * 2.0 ** (m + n) * math.exp(-x)
                    continue
                worst = max(worst, abs(lhs - rhs) / abs(rhs))
    assert worst < 1e-8


def test_identity_rhs_zeros_are_genuine():
    assert identity_rhs(1, 1, 0.25) == 0.0
    assert identity_rhs(1, 4, 1.0) == 0.0
    assert float(exact_two_f_zero(1, 4, Fraction(-1, 4))) == 0.0
