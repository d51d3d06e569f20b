import random

import pytest

from jschanuel.exactnum import RationalFunction
from jschanuel.jfield import (
    FAIL, PASS, UNVERIFIED, FragmentPoint, JFieldFragment, check_axioms, corrupt_fragment,
    fragment_from_evaluator,
)

LEVEL2 = [[2, 0], [0, 1]]


@pytest.fixture(scope="module")
def base():
    return fragment_from_evaluator(["0.2,1.3", complex(-0.31, 0.9)], [LEVEL2], apply_to=[0])


def test_evaluator_fragment_passes(base):
    rep = check_axioms(base)
    assert all(s == PASS for s in rep.statuses.values()), rep.to_json()


def test_random_evaluator_fragments_never_fail():
    rng = random.Random(4)
    mats = [LEVEL2, [[1, 1], [0, 1]], [[1, 0], [1, 3]], [[2, 1], [1, 1]]]
    for _ in range(4):
        taus = [complex(rng.uniform(-1, 1), rng.uniform(0.5, 1.6)) for _ in range(2)]
        f = fragment_from_evaluator(taus, rng.sample(mats, 2), apply_to=[0])
        st = check_axioms(f).statuses
        assert [st[k] for k in (1, 2, 3, 4)] == [PASS] * 4
        assert FAIL not in (st[5], st[6])


@pytest.mark.parametrize("axiom", [1, 2, 3, 4, 5, 6])
def test_corruption_fails_only_its_axiom(base, axiom):
    rep = check_axioms(corrupt_fragment(base, axiom))
    assert rep.failing == [axiom], rep.statuses


def test_stabiliser_witness_at_i():
    f = fragment_from_evaluator([1j])
    res = check_axioms(f).results[6]
    assert res.status == PASS
    assert any(d.get("witness") == ["0", "1", "-1", "0"] or d.get("witness") == ["0", "-1", "1", "0"]
               for d in res.details if isinstance(d, dict))


def test_unrelated_numeric_points_are_unverified_for_axiom5():
    f = fragment_from_evaluator([complex(0.13, 1.21), complex(-0.4, 0.77)])
    rep = check_axioms(f, level_bound=2)
    assert rep.status(5) in (PASS, UNVERIFIED)


def test_json_roundtrip_is_byte_identical(base):
    text = base.dumps()
    assert JFieldFragment.loads(text).dumps() == text


def test_exact_fragment_roundtrip():
    t = RationalFunction.var("t")
    f = JFieldFragment((FragmentPoint("a", t, (5, 1, 0, None)),), variables=("t",))
    g = JFieldFragment.loads(f.dumps())
    assert g.dumps() == f.dumps()
    assert g.point("a").exact and g.point("a").exact_jet


def test_validation():
    with pytest.raises(ValueError):
        JFieldFragment((FragmentPoint("a", 1j, (1, 1, 1, 1)), FragmentPoint("a", 2j, (1, 1, 1, 1))))
