import random
from fractions import Fraction

import pytest

from jschanuel.exactnum import RationalFunction
from jschanuel.moebius import Dependent, RatMatrix2, act
from jschanuel.pregeom import (
    GclConfig, GclOracle, MixedRepresentation, NoRelation, Witness, disjoint1_extract,
    disjoint2_check, gcl_dimension, gcl_pair, linear_span_oracle, pregeometry_property_suite,
)

from oracles import disjoint1_instance, doubling_oracle, gcl_sample, interval_hull_oracle


def test_gcl_suite_on_exact_sample():
    pts = gcl_sample()
    rep = pregeometry_property_suite(GclOracle(pts), list(pts), 5)
    assert rep.all_passed, rep.failing
    assert rep.checked["exchange"] > 0


def test_gcl_suite_over_a_base_field():
    pts = gcl_sample()
    rep = pregeometry_property_suite(GclOracle(pts, GclConfig(("s",))), list(pts), 3)
    assert rep.all_passed, rep.failing


def test_linear_span_is_a_pregeometry():
    vecs = {i: [Fraction(x) for x in v] for i, v in enumerate([(1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 0, 1), (2, 0, 0)])}
    assert pregeometry_property_suite(linear_span_oracle(vecs), list(vecs), 4).all_passed


def test_negative_controls_fail():
    vals = {f"p{i}": i for i in range(6)}
    rep = pregeometry_property_suite(interval_hull_oracle(vals), list(vals), 3)
    assert rep.failing == ["exchange"]
    vals = {f"p{i}": 2 ** i for i in range(5)}
    rep = pregeometry_property_suite(doubling_oracle(vals), list(vals), 3)
    assert "idempotence" in rep.failing


def test_gcl_pair_orientation():
    pts = gcl_sample()
    r = gcl_pair(pts["2t+1"], pts["t"], GclConfig())
    assert isinstance(r, Dependent)
    assert act(r.witness, pts["t"]) == pts["2t+1"]


def test_gcl_dimension_exact():
    pts = gcl_sample()
    rep = gcl_dimension([pts["t"], pts["1/t"], pts["t^2"], pts["s"]])
    assert rep.dim == 3 and rep.caveat == "exact"
    over_s = gcl_dimension([pts["t"], pts["s*t"]], cfg=GclConfig(("s",)))
    assert over_s.dim == 1


def test_gcl_dimension_numeric_is_bounded():
    x = complex(0.2, 1.3)
    rep = gcl_dimension([x, 2 * x, complex(0.1, 1.7)])
    assert rep.dim == 2 and rep.caveat.startswith("bounded")


def test_mixed_representation_rejected():
    with pytest.raises(MixedRepresentation):
        gcl_pair(RationalFunction.var("t"), complex(0, 1), GclConfig())


def test_disjoint1_random_instances():
    rng = random.Random(11)
    for _ in range(20):
        g, l1, l2, h = disjoint1_instance(rng)
        r = disjoint1_extract(g, l1, l2)
        assert isinstance(r, Witness)
        assert all(isinstance(e, Fraction) for e in r.witness.entries())
        assert act(r.witness, l2) == l1


def test_disjoint1_no_relation_and_scalar():
    from jschanuel.exactnum import MultiPoly

    t = RationalFunction.var("t")
    x = MultiPoly.var("x", ("x",))
    one, zero = MultiPoly.constant(1, ("x",)), MultiPoly(("x",))
    assert isinstance(disjoint1_extract([[x + 1, one], [zero, one]], t, t * t * t), NoRelation)
    with pytest.raises(ValueError):
        disjoint1_extract([[x + 1, zero], [zero, x + 1]], t, t)


def test_disjoint2_inequality_holds_on_fresh_parameter():
    V = ("tau", "t")
    tau, t = RationalFunction.var("tau", V), RationalFunction.var("t", V)
    xs = [t, tau * t, t * t]
    res = disjoint2_check(xs, [], [t], GclConfig(()), GclConfig(("tau",)))
    assert res.holds
