from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from jschanuel.exactnum import (
    CycloCoeff, IntPoly2, MultiPoly, RationalFunction, nullspace, parse_expression, poly_coefficient_split,
    rank, reassemble, rational_from_str, rational_to_str,
)

VARS = ("x", "y")
small = st.integers(-6, 6)
fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def polys(draw, variables=VARS):
    n = draw(st.integers(0, 4))
    terms = {tuple(draw(st.integers(0, 3)) for _ in variables): draw(fracs) for _ in range(n)}
    return MultiPoly(variables, terms)


@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a - a == MultiPoly(VARS)


@given(polys(), fracs, fracs)
def test_evaluation_is_a_homomorphism(p, x, y):
    q = p * p + p
    at = {"x": x, "y": y}
    v = p.evaluate(at)
    assert q.evaluate(at) == v * v + v


@given(polys(), polys())
def test_product_rule(a, b):
    assert (a * b).diff("x") == a.diff("x") * b + a * b.diff("x")


@given(polys())
def test_records_roundtrip(p):
    assert MultiPoly.from_records(VARS, p.to_records()) == p


def test_rational_strings():
    for q in (Fraction(0), Fraction(-3, 7), Fraction(12)):
        assert rational_from_str(rational_to_str(q)) == q


def test_univariate_fraction_reduces():
    t = RationalFunction.var("t")
    f = (t * t - 1) / (t - 1)
    assert f == t + 1
    assert f.den.is_constant()


@given(st.integers(1, 5), st.integers(-5, 5))
def test_parse_expression_matches_arithmetic(a, b):
    f = parse_expression(f"({a}*t + {b})/(t^2 + 1)", ("t",))
    t = RationalFunction.var("t")
    assert f == (a * t + b) / (t * t + 1)


def test_parse_rejects_unknown_names():
    with pytest.raises(ValueError):
        parse_expression("u + 1", ("t",))


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=4))
def test_rank_nullity(rows):
    rows = [[Fraction(x) for x in r] for r in rows]
    ns = nullspace(rows, 3)
    assert rank(rows) + len(ns) == 3
    for v in ns:
        for r in rows:
            assert sum(a * b for a, b in zip(r, v)) == 0


def test_coefficient_split_reassembles():
    x = MultiPoly.var("x", ("x",))
    g = [[x * 2 + 1, x], [MultiPoly.constant(3, ("x",)), x * x - 1]]
    split = poly_coefficient_split(g)
    back = reassemble(split, ("x",))
    assert back[0][0] == g[0][0] and back[1][1] == g[1][1]


def test_intpoly_symmetry_and_partials():
    p = IntPoly2({(2, 0): 1, (0, 2): 1, (1, 1): -3})
    assert p.is_symmetric()
    assert p.partial_x().coeffs == {(1, 0): 2, (0, 1): -3}
    assert p.evaluate(2, 3) == 4 + 9 - 18


@settings(max_examples=40)
@given(st.integers(1, 12), st.integers(0, 30), st.integers(0, 30))
def test_cyclotomic_roots_of_unity(n, j, k):
    z1, z2 = CycloCoeff.zeta_power(n, j), CycloCoeff.zeta_power(n, k)
    assert z1 * z2 == CycloCoeff.zeta_power(n, j + k)
    total = CycloCoeff.from_int(n, 0)
    for i in range(n):
        total = total + CycloCoeff.zeta_power(n, i * j)
    assert total.to_int() == (n if j % n == 0 else 0)
