"""Finite fragments of j-fields and a checker for the six j-field axioms.

A fragment is a list of points of D, each with its value alpha(z) in K and
its jet (j, j', j'', j'''), plus group elements and declared orbit
relations ``dst = g src``.  Values and jets are either complex numbers
(checked to a relative tolerance) or exact: rationals for jets, rational
functions in the fragment's variables for values.

Axioms 5 and 6 are infinite disjunctions; a bounded search that finds no
witness yields UNVERIFIED, never FAIL, unless the data are exact and the
disjunction can be refuted outright.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from .exactnum import RationalFunction, parse_expression, rational_to_str
from .modpoly import MAX_LEVEL, build_modular_polynomial, chain_factors, cosets, derived_relation
from .moebius import (
    S_MATRIX,
    Dependent,
    RatMatrix2,
    act,
    orbit_decide_exact,
    orbit_decide_numeric,
    primitive_form,
    primitive_integer_matrices,
    reduce_to_fundamental_domain,
)
from .qseries import DALETH, SingularLocus, solve_daleth_for_j3

PASS, FAIL, UNVERIFIED = "PASS", "FAIL", "UNVERIFIED"
ORIENTATION = "Phi_N(j(src), j(g src)), derivatives with respect to src"
DEFAULT_TOL = 1e-6
DEFAULT_HEIGHT = 6
DEFAULT_LEVEL_BOUND = 5


@dataclass(frozen=True)
class FragmentPoint:
    id: str
    value: Any  # complex or RationalFunction
    jet: tuple  # (j0, j1, j2, j3-or-None), complex or Fraction

    @property
    def exact(self) -> bool:
        return isinstance(self.value, RationalFunction)

    @property
    def exact_jet(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.jet if v is not None)


@dataclass(frozen=True)
class JFieldFragment:
    points: tuple[FragmentPoint, ...]
    group: tuple[RatMatrix2, ...] = ()
    relations: tuple[tuple[int, str, str], ...] = ()
    tolerance: float = DEFAULT_TOL
    variables: tuple[str, ...] = ()

    def __post_init__(self):
        ids = [p.id for p in self.points]
        if len(set(ids)) != len(ids):
            raise ValueError("point ids must be unique")
        for g in self.group:
            if g.det() == 0:
                raise ValueError("group elements must be non-singular")
        for gi, s, d in self.relations:
            if not 0 <= gi < len(self.group):
                raise ValueError(f"no group element {gi}")
            if s not in ids or d not in ids:
                raise ValueError(f"relation mentions an unknown point ({s}, {d})")

    def point(self, pid: str) -> FragmentPoint:
        for p in self.points:
            if p.id == pid:
                return p
        raise KeyError(pid)

    # -- JSON -----------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "variables": list(self.variables),
            "points": [{"id": p.id, "value": _value_json(p.value), "jet": [_value_json(v) for v in p.jet]}
                       for p in self.points],
            "group": [g.to_strings() for g in self.group],
            "relations": [list(r) for r in self.relations],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, data: Mapping) -> "JFieldFragment":
        variables = tuple(data.get("variables", ()))
        pts = []
        for p in data["points"]:
            jet = list(p["jet"]) + [None] * (4 - len(p["jet"]))
            pts.append(FragmentPoint(str(p["id"]), _value_parse(p["value"], variables, point=True),
                                     tuple(_value_parse(v, variables) for v in jet)))
        group = tuple(RatMatrix2.from_strings([str(x) for x in g]) if len(g) == 4
                      else RatMatrix2.of(g) for g in data.get("group", []))
        rels = tuple((int(r[0]), str(r[1]), str(r[2])) for r in data.get("relations", []))
        return cls(tuple(pts), group, rels, float(data.get("tolerance", DEFAULT_TOL)), variables)

    @classmethod
    def loads(cls, text: str) -> "JFieldFragment":
        return cls.from_json(json.loads(text))


def _value_json(v: Any) -> Any:
    if v is None:
        return None
    if isinstance(v, RationalFunction):
        return str(v)
    if isinstance(v, (int, Fraction)):
        return rational_to_str(Fraction(v))
    v = complex(v)
    return {"re": v.real, "im": v.imag}


def _value_parse(v: Any, variables: Sequence[str], point: bool = False) -> Any:
    if v is None:
        return None
    if isinstance(v, Mapping):
        return complex(float(v["re"]), float(v["im"]))
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        if point:
            return parse_expression(v, variables)
        return Fraction(v)
    if isinstance(v, (int, Fraction)):
        return parse_expression(str(v), variables) if point else Fraction(v)
    return complex(v)


# ---------------------------------------------------------------------------
# Construction from the analytic j-function


def fragment_from_evaluator(points: Sequence[Any], gs: Sequence[Any] = (), terms: int | None = None,
                            tolerance: float = DEFAULT_TOL, apply_to: Sequence[int] | None = None) -> JFieldFragment:
    """Points tau, and g tau for every g, with evaluator jets.

    ``apply_to`` restricts the images g tau to the listed indices of ``points``.
    """
    from .evaluator import _to_mpc, evaluate_jet

    group = tuple(g if isinstance(g, RatMatrix2) else RatMatrix2.of(g) for g in gs)
    group = tuple(RatMatrix2(*(Fraction(x) for x in g.entries())) for g in group)
    out: list[FragmentPoint] = []
    rels: list[tuple[int, str, str]] = []

    def add(tau) -> str:
        jet = evaluate_jet(tau, terms=terms)
        pid = f"p{len(out)}"
        out.append(FragmentPoint(pid, complex(jet.tau), tuple(complex(v) for v in jet.values)))
        return pid

    for i, tau in enumerate(points):
        tau = complex(_to_mpc(tau))
        src = add(tau)
        if apply_to is not None and i not in apply_to:
            continue
        for gi, g in enumerate(group):
            a, b, c, d = (float(x) for x in g.entries())
            dst = add((a * tau + b) / (c * tau + d))
            rels.append((gi, src, dst))
    return JFieldFragment(tuple(out), group, tuple(rels), tolerance)


# ---------------------------------------------------------------------------
# The checker


@dataclass
class AxiomResult:
    axiom: int
    status: str
    details: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"axiom": self.axiom, "status": self.status, "details": self.details}


@dataclass
class AxiomReport:
    results: dict[int, AxiomResult]
    tolerance: float
    height: int
    level_bound: int
    orientation: str = ORIENTATION

    def status(self, k: int) -> str:
        return self.results[k].status

    @property
    def statuses(self) -> dict[int, str]:
        return {k: r.status for k, r in sorted(self.results.items())}

    @property
    def failing(self) -> list[int]:
        return [k for k, s in self.statuses.items() if s == FAIL]

    def to_json(self) -> dict:
        return {"axioms": {str(k): r.to_json() for k, r in sorted(self.results.items())},
                "tolerance": self.tolerance, "height": self.height, "level_bound": self.level_bound,
                "orientation": self.orientation}


def _combine(statuses: Iterable[str]) -> str:
    statuses = list(statuses)
    if FAIL in statuses:
        return FAIL
    if UNVERIFIED in statuses:
        return UNVERIFIED
    return PASS


def _close(a: Any, b: Any, tol: float) -> bool:
    return abs(complex(a) - complex(b)) <= tol * max(1.0, abs(complex(a)), abs(complex(b)))


def _is_zero(x: Any, scale: float, tol: float) -> bool:
    if isinstance(x, (int, Fraction, RationalFunction)):
        return (x.is_zero() if isinstance(x, RationalFunction) else x == 0)
    return abs(complex(x)) <= tol * max(scale, 1e-300)


def _jet_full(p: FragmentPoint) -> tuple | None:
    """The jet with j3 filled in from the daleth form when it is absent."""
    if p.jet[3] is not None:
        return p.jet
    try:
        j3 = solve_daleth_for_j3(*p.jet[:3])
    except (SingularLocus, ZeroDivisionError):
        return None
    return tuple(p.jet[:3]) + (j3,)


def _singular(p: FragmentPoint, tol: float) -> bool:
    j0, j1 = p.jet[0], p.jet[1]
    if p.exact_jet:
        return j0 == 0 or j0 == 1728 or j1 == 0
    return abs(complex(j0)) <= tol or abs(complex(j0) - 1728) <= tol * 1728 or abs(complex(j1)) <= tol * max(1.0, abs(complex(j0)))


def _axiom1(f: JFieldFragment) -> AxiomResult:
    bad = []
    pts = f.points
    for i in range(len(pts)):
        for k in range(i + 1, len(pts)):
            a, b = pts[i], pts[k]
            if a.exact != b.exact:
                continue  # different embeddings are distinct by construction
            same = (a.value == b.value) if a.exact else _close(a.value, b.value, f.tolerance)
            if same:
                bad.append({"points": [a.id, b.id]})
    return AxiomResult(1, FAIL if bad else PASS, bad)


def _axiom2(f: JFieldFragment) -> AxiomResult:
    details = []
    for gi, s, d in f.relations:
        g = f.group[gi]
        src, dst = f.point(s), f.point(d)
        if src.exact != dst.exact:
            details.append({"relation": [gi, s, d], "status": UNVERIFIED, "reason": "mixed representation"})
            continue
        if src.exact:
            ok = act(g, src.value) == dst.value
        else:
            gf = [float(x) for x in g.entries()]
            z = complex(src.value)
            ok = _close((gf[0] * z + gf[1]) / (gf[2] * z + gf[3]), dst.value, f.tolerance)
        details.append({"relation": [gi, s, d], "status": PASS if ok else FAIL})
    return AxiomResult(2, _combine(x["status"] for x in details), details)


def _axiom3(f: JFieldFragment) -> AxiomResult:
    details = []
    for p in f.points:
        if _singular(p, f.tolerance):
            details.append({"point": p.id, "status": PASS, "reason": "hypothesis not met (singular locus)"})
            continue
        if p.jet[3] is None:
            details.append({"point": p.id, "status": PASS, "reason": "j3 filled from the daleth form"})
            continue
        terms = DALETH.terms(*p.jet)
        if p.exact_jet:
            ok = sum(terms) == 0
            details.append({"point": p.id, "status": PASS if ok else FAIL, "residual": str(sum(terms))})
        else:
            res = abs(complex(sum(terms))) / max(abs(complex(t)) for t in terms)
            details.append({"point": p.id, "status": PASS if res <= f.tolerance else FAIL, "residual": res})
    return AxiomResult(3, _combine(x["status"] for x in details), details)


def _axiom4(f: JFieldFragment) -> AxiomResult:
    details = []
    for gi, s, d in f.relations:
        g = f.group[gi]
        src, dst = f.point(s), f.point(d)
        entry: dict[str, Any] = {"relation": [gi, s, d], "orientation": "(src, g src)"}
        try:
            pf = primitive_form(g)
        except Exception as exc:  # pragma: no cover - validated on construction
            entry.update(status=FAIL, reason=str(exc))
            details.append(entry)
            continue
        n = pf.index
        if n > MAX_LEVEL:
            entry.update(status=UNVERIFIED, reason=f"level {n} above {MAX_LEVEL}")
            details.append(entry)
            continue
        exact = src.exact and dst.exact and src.exact_jet and dst.exact_jet
        if (src.exact or dst.exact) and not exact:
            entry.update(status=UNVERIFIED, reason="mixed representation")
            details.append(entry)
            continue
        phi = build_modular_polynomial(n)
        residuals: dict[str, Any] = {}
        statuses = []
        v0 = phi.poly.evaluate(src.jet[0], dst.jet[0])
        if exact:
            residuals["order0"] = str(v0)
            statuses.append(PASS if v0 == 0 else FAIL)
        else:
            r0 = abs(complex(v0)) / max(phi.poly.abs_evaluate(complex(src.jet[0]), complex(dst.jet[0])), 1e-300)
            residuals["order0"] = r0
            statuses.append(PASS if r0 <= f.tolerance else FAIL)
        js, jd = _jet_full(src), _jet_full(dst)
        for order in (1, 2, 3):
            if order == 3 and (js is None or jd is None):
                residuals["order3"] = None
                statuses.append(UNVERIFIED)
                continue
            jet_s = js if js is not None else tuple(src.jet[:3]) + (0,)
            jet_d = jd if jd is not None else tuple(dst.jet[:3]) + (0,)
            rel = derived_relation(n, order)
            if exact:
                val = _exact_derived(rel, g, src.value, jet_s, jet_d)
                residuals[f"order{order}"] = str(val)
                statuses.append(PASS if val.is_zero() else FAIL)
            else:
                chain = chain_factors(RatMatrix2(*(complex(float(x)) for x in g.entries())), complex(src.value))
                val, scale = rel.evaluate([complex(v) for v in jet_s], [complex(v) for v in jet_d], chain)
                r = abs(complex(val)) / max(scale, 1e-300)
                residuals[f"order{order}"] = r
                statuses.append(PASS if r <= f.tolerance else FAIL)
        entry.update(level=n, residuals=residuals, status=_combine(statuses))
        details.append(entry)
    return AxiomResult(4, _combine(x["status"] for x in details), details)


def _exact_derived(rel, g: RatMatrix2, z: RationalFunction, jet_s, jet_d) -> RationalFunction:
    from .modpoly import JET_VARS, _partial
    from .exactnum import MultiPoly

    chain = chain_factors(RatMatrix2(*(Fraction(x) for x in g.entries())), z)
    vals = {"u1": jet_s[1], "u2": jet_s[2], "u3": jet_s[3], "v1": jet_d[1], "v2": jet_d[2], "v3": jet_d[3],
            "w1": chain[0], "w2": chain[1], "w3": chain[2]}
    vals = {k: v if isinstance(v, RationalFunction) else RationalFunction.constant(Fraction(v), z.variables)
            for k, v in vals.items()}
    total = RationalFunction.constant(0, z.variables)
    for (a, b), mono in rel.terms.items():
        pv = _partial(rel.level, a, b).evaluate(Fraction(jet_s[0]), Fraction(jet_d[0]))
        total = total + mono.evaluate(vals, one=RationalFunction.constant(1, z.variables)) * Fraction(pv)
    return total


def _sl2_small() -> list[RatMatrix2]:
    out = []
    for a, b, c, d in primitive_integer_matrices(2):
        if a * d - b * c == 1:
            out.append(RatMatrix2.of([[a, b], [c, d]]))
    return out


def _numeric_level_witness(x: complex, y: complex, n: int, tol: float) -> RatMatrix2 | None:
    """A matrix of level n sending y to x, searched over all SL2(Z)-cosets of level n."""
    flip = RatMatrix2.of([[-1, 0], [0, 1]])
    pre_x = RatMatrix2.identity()
    pre_y = RatMatrix2.identity()
    if x.imag < 0:
        x, pre_x = -x, flip
    if y.imag < 0:
        y, pre_y = -y, flip
    rx = reduce_to_fundamental_domain(x)
    for a, b, d in cosets(n):
        m = RatMatrix2.of([[a, b], [0, d]])
        yy = (a * y + b) / d
        ry = reduce_to_fundamental_domain(yy)
        for gam in _sl2_small():
            ga, gb, gc, gd = (int(v) for v in gam.entries())
            den = gc * ry.tau0 + gd
            if den == 0:
                continue
            if abs((ga * ry.tau0 + gb) / den - rx.tau0) <= tol * max(1.0, abs(rx.tau0)):
                w = pre_x.inverse() @ rx.matrix.inverse() @ gam @ ry.matrix @ m @ pre_y
                return w
    return None


def _axiom5(f: JFieldFragment, height: int, level_bound: int) -> AxiomResult:
    details = []
    pts = f.points
    for i in range(len(pts)):
        for k in range(len(pts)):
            if i == k:
                continue
            a, b = pts[i], pts[k]
            if k < i:
                continue
            for n in range(1, level_bound + 1):
                phi = build_modular_polynomial(n)
                exact_jets = a.exact_jet and b.exact_jet
                v = phi.poly.evaluate(a.jet[0], b.jet[0])
                if exact_jets:
                    vanishes = v == 0
                else:
                    scale = phi.poly.abs_evaluate(complex(a.jet[0]), complex(b.jet[0]))
                    vanishes = abs(complex(v)) <= f.tolerance * max(scale, 1e-300)
                if not vanishes:
                    continue
                entry: dict[str, Any] = {"pair": [a.id, b.id], "level": n}
                if a.exact and b.exact:
                    r = orbit_decide_exact(b.value, a.value)
                    if isinstance(r, Dependent) and primitive_form(r.witness).index == n:
                        entry.update(status=PASS, witness=r.witness.to_strings())
                    elif isinstance(r, Dependent):
                        entry.update(status=FAIL, reason=f"related only at level {primitive_form(r.witness).index}")
                    else:
                        entry.update(status=FAIL, reason="values are not in one G-orbit")
                elif a.exact or b.exact:
                    entry.update(status=UNVERIFIED, reason="mixed representation")
                else:
                    w = None
                    r = orbit_decide_numeric(complex(b.value), complex(a.value), height, f.tolerance)
                    if isinstance(r, Dependent) and primitive_form(r.witness).index == n:
                        w = r.witness
                    if w is None:
                        w = _numeric_level_witness(complex(a.value), complex(b.value), n, f.tolerance)
                    if w is not None:
                        entry.update(status=PASS, witness=w.to_strings())
                    else:
                        entry.update(status=UNVERIFIED, reason=f"no witness found (height {height} and level-{n} cosets)")
                details.append(entry)
    return AxiomResult(5, _combine(x["status"] for x in details), details)


def _axiom6(f: JFieldFragment, height: int) -> AxiomResult:
    details = []
    for p in f.points:
        if not _singular(p, f.tolerance):
            continue
        entry: dict[str, Any] = {"point": p.id}
        if p.exact:
            z = p.value
            if z.is_constant():
                entry.update(status=UNVERIFIED, reason="constant value")
            else:
                # c z^2 + (d - a) z - b = 0 forces a scalar matrix when z is not constant
                entry.update(status=FAIL, reason="no non-scalar rational matrix fixes a non-constant element")
            details.append(entry)
            continue
        z = complex(p.value)
        w = _stabilizer(z, height, f.tolerance)
        if w is not None:
            entry.update(status=PASS, witness=w.to_strings())
        else:
            entry.update(status=UNVERIFIED, reason=f"no non-scalar stabilizer up to height {height}")
        details.append(entry)
    return AxiomResult(6, _combine(x["status"] for x in details), details)


def _stabilizer(z: complex, height: int, tol: float) -> RatMatrix2 | None:
    cands = sorted((m for m in primitive_integer_matrices(min(height, 3))),
                   key=lambda m: (max(abs(v) for v in m), abs(m[0] * m[3] - m[1] * m[2]), m))
    for a, b, c, d in cands:
        g = RatMatrix2.of([[a, b], [c, d]])
        if g.is_scalar():
            continue
        den = c * z + d
        if den != 0 and abs((a * z + b) / den - z) <= tol * max(1.0, abs(z)):
            return g
    # conjugate the stabilizers of i and rho back from the fundamental domain
    y = z if z.imag > 0 else -z
    red = reduce_to_fundamental_domain(y)
    rho = complex(-0.5, 3 ** 0.5 / 2)
    for base, stab in ((1j, S_MATRIX), (rho, RatMatrix2.of([[0, -1], [1, 1]]))):
        if abs(red.tau0 - base) <= tol:
            R = red.matrix
            g = R.inverse() @ stab @ R
            if z.imag < 0:
                flip = RatMatrix2.of([[-1, 0], [0, 1]])
                g = flip @ g @ flip
            return g
    if height > 3:
        for a, b, c, d in primitive_integer_matrices(height):
            g = RatMatrix2.of([[a, b], [c, d]])
            if g.is_scalar():
                continue
            den = c * z + d
            if den != 0 and abs((a * z + b) / den - z) <= tol * max(1.0, abs(z)):
                return g
    return None


def check_axioms(f: JFieldFragment, height: int = DEFAULT_HEIGHT, tol: float | None = None,
                 level_bound: int = DEFAULT_LEVEL_BOUND) -> AxiomReport:
    """Per-axiom PASS / FAIL / UNVERIFIED report; never raises on failures."""
    if tol is not None:
        f = replace(f, tolerance=tol)
    results = {
        1: _axiom1(f),
        2: _axiom2(f),
        3: _axiom3(f),
        4: _axiom4(f),
        5: _axiom5(f, height, level_bound),
        6: _axiom6(f, height),
    }
    return AxiomReport(results, f.tolerance, height, level_bound)


# ---------------------------------------------------------------------------
# Corrupted fragments (negative controls)


def _with_point(f: JFieldFragment, p: FragmentPoint, variables: Sequence[str] = ()) -> JFieldFragment:
    vs = tuple(f.variables) + tuple(v for v in variables if v not in f.variables)
    return replace(f, points=f.points + (p,), variables=vs)


def _replace_point(f: JFieldFragment, p: FragmentPoint) -> JFieldFragment:
    return replace(f, points=tuple(p if q.id == p.id else q for q in f.points))


def _standalone(f: JFieldFragment) -> FragmentPoint:
    used = {x for _, s, d in f.relations for x in (s, d)}
    for p in f.points:
        if p.id not in used and not p.exact:
            return p
    raise ValueError("fragment needs a numeric point outside every relation")


def corrupt_fragment(f: JFieldFragment, axiom: int) -> JFieldFragment:
    """A copy of ``f`` that should fail exactly the given axiom.

    ``f`` must be evaluator-built, contain at least one relation and one
    point outside every relation.
    """
    if axiom == 1:
        p = _standalone(f)
        return _with_point(f, FragmentPoint(p.id + "_dup", p.value, p.jet))
    if axiom == 2:
        _, _, d = f.relations[0]
        p = f.point(d)
        # j is 1-periodic, so the jets stay right for the shifted value
        return _replace_point(f, FragmentPoint(p.id, complex(p.value) + 1, p.jet))
    if axiom == 3:
        p = _standalone(f)
        j0, j1, j2, j3 = _jet_full(p)
        return _replace_point(f, FragmentPoint(p.id, p.value, (j0, j1, j2, complex(j3) * (1 + 1e-3))))
    if axiom == 4:
        _, _, d = f.relations[0]
        p = f.point(d)
        j0, j1, j2 = p.jet[:3]
        j2 = complex(j2) * (1 + 1e-3)
        return _replace_point(f, FragmentPoint(p.id, p.value, (j0, j1, j2, complex(solve_daleth_for_j3(j0, j1, j2)))))
    if axiom == 5:
        # two values in different G-orbits carrying the same j-invariant
        t = ("t_",)
        jet = (Fraction(5), Fraction(1), Fraction(0), None)
        g = _with_point(f, FragmentPoint("x5a", parse_expression("t_", t), jet), t)
        return _with_point(g, FragmentPoint("x5b", parse_expression("t_^2", g.variables), jet))
    if axiom == 6:
        s = ("s_",)
        jet = (Fraction(1728), Fraction(0), Fraction(1), None)
        return _with_point(f, FragmentPoint("x6", parse_expression("s_", s), jet), s)
    raise ValueError("axiom must be 1..6")
