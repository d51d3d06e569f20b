from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from jschanuel.qseries import (
    DALETH, LaurentSeries, SingularLocus, eisenstein_e4, eisenstein_e6, j_series, solve_daleth_for_j3,
    theta, verify_modular_ode,
)


def delta_product(m):
    """q prod (1 - q^n)^24 through q^m, straight from the product."""
    c = [0] * (m + 1)
    c[0] = 1
    for n in range(1, m + 1):
        for _ in range(24):
            for k in range(m, n - 1, -1):
                c[k] -= c[k - n]
    return LaurentSeries(1, [Fraction(x) for x in c[: m]], m)


def test_known_j_coefficients():
    j = j_series(4)
    assert [j[n] for n in range(-1, 5)] == [1, 744, 196884, 21493760, 864299970, 20245856256]


def test_discriminant_identity_against_product():
    m = 25
    e4, e6 = eisenstein_e4(m), eisenstein_e6(m)
    lhs = (e4 ** 3 - e6 ** 2)
    assert (lhs - delta_product(m) * 1728).is_zero()


def test_j_against_product_oracle():
    m = 20
    e4 = eisenstein_e4(m + 2)
    j_oracle = e4 ** 3 * delta_product(m + 2).inverse()
    assert (j_oracle.truncate(m) - j_series(m)).is_zero()


st_series = st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), min_size=1, max_size=6)


@given(st_series, st_series, st.integers(-2, 2), st.integers(-2, 2))
def test_series_product_is_commutative_and_theta_is_a_derivation(a, b, va, vb):
    A, B = LaurentSeries(va, a, 8), LaurentSeries(vb, b, 8)
    assert (A * B - B * A).is_zero()
    p = min((A * B).precision, 6)
    lhs = theta(A * B).truncate(p)
    rhs = (theta(A) * B + A * theta(B)).truncate(p)
    assert (lhs - rhs).is_zero()


@settings(max_examples=25)
@given(st_series)
def test_inverse(a):
    if a[0] == 0:
        a = [Fraction(1)] + a
    A = LaurentSeries(0, a, 10)
    one = (A * A.inverse()).truncate(8)
    assert one[0] == 1 and all(one[n] == 0 for n in range(1, 9))


def test_modular_ode_is_exactly_zero():
    assert verify_modular_ode(30).is_zero()


def test_modular_ode_negative_control():
    bad = j_series(40) + LaurentSeries.monomial(3, 1, 40)
    assert not verify_modular_ode(30, bad).is_zero()


def test_daleth_solve_roundtrip():
    j0, j1, j2 = Fraction(5), Fraction(-2, 3), Fraction(7)
    j3 = solve_daleth_for_j3(j0, j1, j2)
    assert sum(DALETH.terms(j0, j1, j2, j3)) == 0
    with pytest.raises(SingularLocus):
        solve_daleth_for_j3(1728, 1, 1)
