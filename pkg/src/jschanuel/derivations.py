"""Derivations on finitely presented fields with j-points.

A :class:`Presentation` lists generators, polynomial relations among them,
a set of constants, j-points (z, j(z), j'(z), j''(z), optionally j'''(z))
and orbit declarations ``dst = g src``.  From it we build the Jacobian of
all relations at a random point of the variety they cut out:

* Omega(K/C) is the cokernel of (Jacobian rows + unit rows of C);
* Xi(K/C) additionally quotients by d j0 - j1 dz, d j1 - j2 dz,
  d j2 - j3 dz for every j-point;
* transcendence degrees are ranks of Jacobian rows plus unit rows.

Ranks are computed numerically (mpmath, 50 digits) at a point of the
variety found by solving the relations one unknown at a time, with a
Gauss-Newton projection when that does not close.  The rank at a random
point of an irreducible variety is the generic rank with probability one;
several independent draws are made and the largest rank is kept.

Presentations are taken at face value: nothing here decides whether a
presentation is realisable in an actual j-field.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

import mpmath

from .exactnum import MultiPoly, RationalFunction, parse_expression, row_reduce
from .modpoly import _derived_terms, _partial, build_modular_polynomial
from .moebius import RatMatrix2, primitive_form
from .qseries import DALETH

DEFAULT_SEED = 20240601
SPECIALIZATION_ATTEMPTS = 8
CERTIFY_DRAWS = 3
HEIGHT_BOX = 100
WORK_DPS = 50
RANK_TOL = mpmath.mpf(10) ** -25

# rows and points are built in several places; keep all of it at full precision
mpmath.mp.dps = max(mpmath.mp.dps, WORK_DPS)
REALIZABILITY_NOTE = ("dimensions are computed on the presented field; they agree with the "
                      "ambient j-field only if the presentation is realisable")


class SpecializationFailure(RuntimeError):
    pass


class SingularSystem(ArithmeticError):
    pass


class NotRealizable(ValueError):
    pass


class HypothesisUncertified(ValueError):
    pass


class PreconditionFailed(ValueError):
    pass


# ---------------------------------------------------------------------------
# Presentations


@dataclass(frozen=True)
class JPoint:
    z: str
    j0: str
    j1: str
    j2: str
    j3: str | None = None
    j3_mode: str = "daleth"

    @property
    def jets(self) -> tuple[str, str, str]:
        return (self.j0, self.j1, self.j2)

    @property
    def names(self) -> tuple[str, ...]:
        return (self.z, self.j0, self.j1, self.j2) + ((self.j3,) if self.j3 else ())


@dataclass(frozen=True)
class Orbit:
    """Declares ``dst = g src`` for j-points named by their z generators."""

    g: tuple[str, str, str, str]
    src: str
    dst: str
    derived_orders: tuple[int, ...] = (1, 2, 3)


@dataclass(eq=False)
class Presentation:
    generators: tuple[str, ...]
    relations: tuple[MultiPoly, ...] = ()
    constants: tuple[str, ...] = ()
    jpoints: tuple[JPoint, ...] = ()
    orbits: tuple[Orbit, ...] = ()

    def __post_init__(self):
        self.generators = tuple(self.generators)
        if len(set(self.generators)) != len(self.generators):
            raise ValueError("duplicate generator names")
        gens = set(self.generators)
        self.relations = tuple(self._as_poly(r) for r in self.relations)
        self.constants = tuple(self.constants)
        self.jpoints = tuple(p if isinstance(p, JPoint) else JPoint(**p) for p in self.jpoints)
        self.orbits = tuple(o if isinstance(o, Orbit) else Orbit(tuple(o["g"]), o["src"], o["dst"],
                                                                  tuple(o.get("derived_orders", (1, 2, 3))))
                            for o in self.orbits)
        for c in self.constants:
            if c not in gens:
                raise ValueError(f"constant {c!r} is not a generator")
        seen: set[str] = set()
        for p in self.jpoints:
            if p.j3_mode not in ("daleth", "free"):
                raise ValueError(f"unknown j3 mode {p.j3_mode!r}")
            if p.j3_mode == "free" and not p.j3:
                raise ValueError("a free j3 must be a named generator")
            if len(set(p.names)) != len(p.names):
                raise ValueError(f"j-point {p.z!r} reuses a name")
            for n in p.names:
                if n not in gens:
                    raise ValueError(f"{n!r} is not a generator")
                if n in seen:
                    raise ValueError(f"{n!r} belongs to two j-points")
                seen.add(n)
        zs = {p.z for p in self.jpoints}
        for o in self.orbits:
            if o.src not in zs or o.dst not in zs:
                raise ValueError("orbit endpoints must be z's of j-points")
            if any(k not in (1, 2, 3) for k in o.derived_orders):
                raise ValueError("derived orders are 1, 2, 3")
            if self.orbit_matrix(o).det() == 0:
                raise ValueError("orbit matrix is singular")

    def _as_poly(self, r: Any) -> MultiPoly:
        if isinstance(r, str):
            r = parse_expression(r, self.generators)
        if isinstance(r, RationalFunction):
            r = r.num
        if not isinstance(r, MultiPoly):
            raise TypeError("relations must be polynomials or expression strings")
        return _restrict(r.extend(self.generators + tuple(v for v in r.variables if v not in self.generators)),
                         self.generators)

    def jpoint(self, z: str) -> JPoint:
        for p in self.jpoints:
            if p.z == z:
                return p
        raise KeyError(f"no j-point with z = {z!r}")

    def orbit_matrix(self, o: Orbit) -> RatMatrix2:
        return RatMatrix2(*(parse_expression(str(e), self.generators) for e in o.g))

    def constant_matrix(self, o: Orbit) -> RatMatrix2 | None:
        """The orbit's matrix over Q, or None when it involves generators."""
        m = self.orbit_matrix(o)
        if all(e.is_constant() for e in m.entries()):
            return RatMatrix2(*(e.constant_value() for e in m.entries()))
        return None

    # -- JSON --------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "relations": [r.to_records() for r in self.relations],
            "constants": list(self.constants),
            "jpoints": [{"z": p.z, "j0": p.j0, "j1": p.j1, "j2": p.j2, "j3": p.j3, "j3_mode": p.j3_mode}
                        for p in self.jpoints],
            "orbits": [{"g": list(o.g), "src": o.src, "dst": o.dst, "derived_orders": list(o.derived_orders)}
                       for o in self.orbits],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Presentation":
        gens = tuple(data["generators"])
        rels = []
        for r in data.get("relations", []):
            rels.append(r if isinstance(r, str) else MultiPoly.from_records(gens, r))
        return cls(gens, tuple(rels), tuple(data.get("constants", [])),
                   tuple(data.get("jpoints", [])), tuple(data.get("orbits", [])))

    def with_constants(self, constants: Iterable[str]) -> "Presentation":
        return Presentation(self.generators, self.relations, tuple(constants), self.jpoints, self.orbits)


def generic_jpoint_presentation(k: int = 1, prefix: str = "") -> Presentation:
    """``k`` unrelated j-points with free z, j0, j1, j2."""
    pts = [JPoint(f"{prefix}z{i}", f"{prefix}j0_{i}", f"{prefix}j1_{i}", f"{prefix}j2_{i}") for i in range(1, k + 1)]
    if k == 1:
        pts = [JPoint(f"{prefix}z", f"{prefix}j0", f"{prefix}j1", f"{prefix}j2")]
    gens = tuple(n for p in pts for n in p.names)
    return Presentation(gens, jpoints=tuple(pts))


# ---------------------------------------------------------------------------
# Effective relations


def _restrict(p: MultiPoly, variables: Sequence[str]) -> MultiPoly:
    """Drop variables that ``p`` does not use (they must be unused)."""
    variables = tuple(variables)
    if p.variables == variables:
        return p
    p = p.extend(tuple(variables) + tuple(v for v in p.variables if v not in variables))
    n = len(variables)
    out = {}
    for e, c in p.terms.items():
        if any(e[n:]):
            raise ValueError("polynomial uses variables outside the presentation")
        out[e[:n]] = c
    return MultiPoly(variables, out)


def _bivariate(poly, x: str, y: str, variables: Sequence[str]) -> MultiPoly:
    ix, iy = variables.index(x), variables.index(y)
    out = {}
    for (i, j), c in poly.coeffs.items():
        e = [0] * len(variables)
        e[ix] += i
        e[iy] += j
        out[tuple(e)] = out.get(tuple(e), 0) + c
    return MultiPoly(variables, out)


def _clear_aux(p: MultiPoly, aux: str, den: MultiPoly) -> MultiPoly:
    """Multiply ``p`` (polynomial in ``aux`` = 1/den) by den^deg and eliminate aux."""
    if aux not in p.variables:
        return p
    i = p.variables.index(aux)
    deg = p.degree(aux)
    if deg <= 0:
        return p
    den = den.extend(p.variables)
    powers = [MultiPoly.constant(1, p.variables)]
    for _ in range(deg):
        powers.append(powers[-1] * den)
    out = MultiPoly(p.variables)
    buckets: dict[int, dict] = {}
    for e, c in p.terms.items():
        k = e[i]
        ne = list(e)
        ne[i] = 0
        buckets.setdefault(k, {})[tuple(ne)] = c
    for k, terms in buckets.items():
        out = out + MultiPoly(p.variables, terms) * powers[deg - k]
    return out


def _j3_parts(p: JPoint, variables: Sequence[str]) -> tuple[MultiPoly, MultiPoly]:
    """Numerator and denominator of the daleth solution for j3."""
    X, Y, Z = (MultiPoly.var(n, variables) for n in p.jets)
    e = X * X * (X - 1728) ** 2
    num = 3 * Z * Z * e - (X * X - 1968 * X + 2654208) * Y ** 4
    den = 2 * Y * e
    return num, den


def effective_relations(P: Presentation) -> list[tuple[str, MultiPoly]]:
    """Declared relations plus those implied by j-points and orbits."""
    gens = P.generators
    out = [(f"declared[{i}]", r) for i, r in enumerate(P.relations)]
    for p in P.jpoints:
        if p.j3 and p.j3_mode == "daleth":
            sub = {v: MultiPoly.var(n, gens) for v, n in zip("XYZW", p.jets + (p.j3,))}
            out.append((f"daleth({p.z})", DALETH.numerator.evaluate(sub, one=MultiPoly.constant(1, gens))))
    for k, o in enumerate(P.orbits):
        m = P.orbit_matrix(o)
        a, b, c, d = m.entries()
        zs = RationalFunction.var(o.src, gens)
        zd = RationalFunction.var(o.dst, gens)
        out.append((f"orbit[{k}]:z", ((c * zs + d) * zd - (a * zs + b)).num))
        g = P.constant_matrix(o)
        if g is None:
            continue
        level = primitive_form(g).index
        src, dst = P.jpoint(o.src), P.jpoint(o.dst)
        out.append((f"orbit[{k}]:Phi{level}",
                    _bivariate(build_modular_polynomial(level).poly, src.j0, dst.j0, gens)))
        for order in sorted(set(o.derived_orders)):
            out.append((f"orbit[{k}]:order{order}", _derived_poly(P, g, level, src, dst, order)))
    return [(lab, r) for lab, r in out if not r.is_zero()]


def _derived_poly(P: Presentation, g: RatMatrix2, level: int, src: JPoint, dst: JPoint, order: int) -> MultiPoly:
    gens = P.generators
    aux = ("_L", "_Rs", "_Rd")
    vs = gens + aux
    var = lambda n: MultiPoly.var(n, vs)
    a, b, c, d = g.entries()
    det = a * d - b * c
    L = var("_L")
    zs = var(src.z)
    w = {"w1": det * L ** 2, "w2": -2 * c * det * L ** 3, "w3": 6 * c * c * det * L ** 4}

    def jet3(p: JPoint, r: str) -> MultiPoly:
        if p.j3:
            return var(p.j3)
        num, _ = _j3_parts(p, vs)
        return num * var(r)

    vals = {"u1": var(src.j1), "u2": var(src.j2), "u3": jet3(src, "_Rs"),
            "v1": var(dst.j1), "v2": var(dst.j2), "v3": jet3(dst, "_Rd"), **w}
    one = MultiPoly.constant(1, vs)
    total = MultiPoly(vs)
    for (pa, pb), mono in _derived_terms(order).items():
        phi = _bivariate(_partial(level, pa, pb), src.j0, dst.j0, vs)
        total = total + phi * mono.evaluate(vals, one=one)
    total = _clear_aux(total, "_L", c * zs + d)
    total = _clear_aux(total, "_Rs", _j3_parts(src, vs)[1])
    total = _clear_aux(total, "_Rd", _j3_parts(dst, vs)[1])
    return _restrict(total, gens)


# ---------------------------------------------------------------------------
# Specialization


def _random_rational(rng: random.Random) -> Fraction:
    while True:
        v = Fraction(rng.randint(-HEIGHT_BOX, HEIGHT_BOX), rng.randint(1, HEIGHT_BOX))
        if v:
            return v


def _to_mp(x: Any) -> Any:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpmathify(x)


def _univariate_at(p: MultiPoly, x: str, vals: Mapping[str, Any]) -> list:
    i = p.variables.index(x)
    coeffs: dict[int, Any] = {}
    for e, c in p.terms.items():
        t = _to_mp(c)
        for v, k in zip(p.variables, e):
            if k and v != x:
                t *= vals[v] ** k
        coeffs[e[i]] = coeffs.get(e[i], 0) + t
    deg = max(coeffs)
    return [coeffs.get(k, 0) for k in range(deg + 1)]


def _poly_value(p: MultiPoly, vals: Mapping[str, Any]) -> tuple[Any, Any]:
    """Value and sum of absolute values of the terms."""
    total = mpmath.mpc(0)
    scale = mpmath.mpf(0)
    for e, c in p.terms.items():
        t = _to_mp(c)
        for v, k in zip(p.variables, e):
            if k:
                t *= vals[v] ** k
        total += t
        scale += abs(t)
    return total, scale


def _consistent(p: MultiPoly, vals: Mapping[str, Any]) -> bool:
    v, s = _poly_value(p, vals)
    return abs(v) <= mpmath.mpf(10) ** -35 * max(s, 1)


def _greedy_point(rels: Sequence[MultiPoly], gens: Sequence[str], rng: random.Random) -> dict | None:
    vals: dict[str, Any] = {}
    pending = [r for r in rels]
    order = list(gens)
    while True:
        progress = False
        for r in list(pending):
            unknown = [v for v in r.used_variables() if v not in vals]
            if not unknown:
                if not _consistent(r, vals):
                    return None
                pending.remove(r)
                progress = True
            elif len(unknown) == 1:
                x = unknown[0]
                coeffs = _univariate_at(r, x, vals)
                big = max(abs(c) for c in coeffs)
                while len(coeffs) > 1 and abs(coeffs[-1]) <= mpmath.mpf(10) ** -35 * big:
                    coeffs.pop()
                if len(coeffs) == 1:
                    if big and abs(coeffs[0]) > mpmath.mpf(10) ** -35 * big:
                        return None
                    continue
                if len(coeffs) == 2:
                    vals[x] = -coeffs[0] / coeffs[1]
                else:
                    roots = mpmath.polyroots(list(reversed(coeffs)), maxsteps=200, extraprec=200)
                    vals[x] = mpmath.mpc(rng.choice(roots))
                pending.remove(r)
                progress = True
            if progress:
                break
        if progress:
            continue
        if not pending:
            for v in order:
                if v not in vals:
                    vals[v] = _to_mp(_random_rational(rng))
            return vals
        free = [v for v in order if v not in vals]
        if not free:  # pragma: no cover - every pending relation has unknowns
            return None
        # prefer a generator that appears in some pending relation last, so
        # that relations get a chance to determine it
        vals[free[0]] = _to_mp(_random_rational(rng))


def _newton_point(rels: Sequence[MultiPoly], gens: Sequence[str], rng: random.Random,
                  start: Mapping[str, Any] | None = None, steps: int = 80) -> dict | None:
    """Gauss-Newton projection of a random point onto the variety."""
    gens = list(gens)
    x = [mpmath.mpc(_to_mp(_random_rational(rng)), _to_mp(_random_rational(rng)) / 10) for _ in gens]
    if start:
        x = [mpmath.mpc(start.get(v, x[i])) for i, v in enumerate(gens)]
    diffs = [[r.diff(v) for v in gens] for r in rels]
    for _ in range(steps):
        vals = dict(zip(gens, x))
        f = [_poly_value(r, vals)[0] for r in rels]
        if all(_consistent(r, vals) for r in rels):
            return vals
        J = mpmath.matrix([[_poly_value(dv, vals)[0] if not dv.is_zero() else 0 for dv in row] for row in diffs])
        JH = J.transpose_conj()
        A = J * JH
        for i in range(A.rows):
            A[i, i] += mpmath.mpf(10) ** -40
        try:
            y = mpmath.lu_solve(A, mpmath.matrix(f))
        except ZeroDivisionError:
            return None
        dx = JH * y
        x = [x[i] - dx[i] for i in range(len(gens))]
    return None


@dataclass
class Specialization:
    seed: int
    draw: int
    point: dict
    method: str


def specialize(P: Presentation, rng: random.Random, seed: int, draw: int) -> Specialization:
    rels = [r for _, r in effective_relations_cached(P)]
    with mpmath.workdps(WORK_DPS):
        vals = _greedy_point(rels, P.generators, rng)
        method = "triangular"
        if vals is None:
            vals = _newton_point(rels, P.generators, rng)
            method = "gauss-newton"
        if vals is None:
            raise SpecializationFailure("could not place a point on the variety")
        for p in P.jpoints:
            if p.j3 is None:
                j0, j1, j2 = (vals[n] for n in p.jets)
                if abs(j1) == 0 or abs(j0) == 0 or abs(j0 - 1728) == 0:
                    raise SpecializationFailure("j-point landed on the daleth singular locus")
                vals[("j3", p.z)] = 3 * j2 ** 2 / (2 * j1) - DALETH.r_coefficient(j0) * j1 ** 3
    return Specialization(seed, draw, vals, method)


_EFFECTIVE: dict[int, tuple[Presentation, list]] = {}


def effective_relations_cached(P: Presentation) -> list[tuple[str, MultiPoly]]:
    key = id(P)
    hit = _EFFECTIVE.get(key)
    if hit is None or hit[0] is not P:
        hit = (P, effective_relations(P))
        _EFFECTIVE[key] = hit
    return hit[1]


# ---------------------------------------------------------------------------
# Numeric linear algebra


def _normalize_row(row: Sequence[Any]) -> list:
    m = max((abs(x) for x in row), default=0)
    if not m:
        return [mpmath.mpc(0)] * len(row)
    return [x / m for x in row]


def numeric_rank(rows: Sequence[Sequence[Any]]) -> int:
    rows = [_normalize_row(r) for r in rows]
    rows = [r for r in rows if any(abs(x) > RANK_TOL for x in r)]
    if not rows:
        return 0
    with mpmath.workdps(WORK_DPS):
        return len(row_reduce(rows, is_zero=lambda x: abs(x) <= RANK_TOL, pivot_key=abs)[1])


def numeric_nullspace(rows: Sequence[Sequence[Any]], ncols: int) -> list[list]:
    rows = [_normalize_row(r) for r in rows]
    rows = [r for r in rows if any(abs(x) > RANK_TOL for x in r)]
    one, zero = mpmath.mpc(1), mpmath.mpc(0)
    if not rows:
        return [[one if i == j else zero for i in range(ncols)] for j in range(ncols)]
    with mpmath.workdps(WORK_DPS):
        red, pivots = row_reduce(rows, is_zero=lambda x: abs(x) <= RANK_TOL, pivot_key=abs)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for r, p in enumerate(pivots):
            v[p] = -red[r][f]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# The analysed presentation


class Analysis:
    """Jacobian data of a presentation at a certified generic point."""

    def __init__(self, P: Presentation, seed: int = DEFAULT_SEED, draws: int = CERTIFY_DRAWS):
        self.P = P
        self.seed = seed
        self.relations = effective_relations_cached(P)
        self.gens = P.generators
        self.index = {g: i for i, g in enumerate(self.gens)}
        rng = random.Random(seed)
        candidates = []
        failures = 0
        attempt = 0
        while len(candidates) < draws and attempt < SPECIALIZATION_ATTEMPTS:
            attempt += 1
            try:
                spec = specialize(P, rng, seed, attempt)
            except (SpecializationFailure, ZeroDivisionError):
                failures += 1
                continue
            jac = self._jacobian(spec.point)
            xi = self._xi_rows(spec.point)
            score = (numeric_rank(jac + xi), numeric_rank(jac))
            candidates.append((score, attempt, spec, jac, xi))
        if not candidates:
            raise SpecializationFailure(f"all {SPECIALIZATION_ATTEMPTS} specializations failed (seed {seed})")
        candidates.sort(key=lambda c: (c[0], -c[1]), reverse=True)
        _, _, self.spec, self.jac, self.xi = candidates[0]
        self.draws = attempt
        self.failures = failures
        self.generic_ranks_agree = len({c[0] for c in candidates}) == 1

    # -- rows -------------------------------------------------------------
    def _jacobian(self, point: Mapping[str, Any]) -> list[list]:
        rows = []
        with mpmath.workdps(WORK_DPS):
            for _, r in self.relations:
                rows.append([_poly_value(r.diff(g), point)[0] if g in r.used_variables() else mpmath.mpc(0)
                             for g in self.gens])
        return [_normalize_row(r) for r in rows]

    def _xi_rows(self, point: Mapping[str, Any]) -> list[list]:
        rows = []
        for p in self.P.jpoints:
            j3 = point[p.j3] if p.j3 else point[("j3", p.z)]
            coeffs = (point[p.j1], point[p.j2], j3)
            for name, c in zip(p.jets, coeffs):
                row = [mpmath.mpc(0)] * len(self.gens)
                row[self.index[name]] = mpmath.mpc(1)
                row[self.index[p.z]] = -c
                rows.append(_normalize_row(row))
        return rows

    def unit(self, name: str) -> list:
        row = [mpmath.mpc(0)] * len(self.gens)
        row[self.index[name]] = mpmath.mpc(1)
        return row

    def units(self, names: Iterable[str]) -> list[list]:
        return [self.unit(n) for n in names]

    # -- dimensions ---------------------------------------------------------
    def td(self, names: Iterable[str], over: Iterable[str] = ()) -> int:
        """Transcendence degree of Q(names, over) over Q(over)."""
        names, over = set(names), set(over)
        r_all = numeric_rank(self.jac + self.units(names | over))
        r_over = numeric_rank(self.jac + self.units(over))
        return r_all - r_over

    def omega_dimension(self, C: Iterable[str] = ()) -> int:
        return len(self.gens) - numeric_rank(self.jac + self.units(set(C)))

    def _xi_base(self, C: Iterable[str]) -> list[list]:
        return self.jac + self.xi + self.units(set(C))

    def xi_dimension(self, C: Iterable[str] = ()) -> int:
        return len(self.gens) - numeric_rank(self._xi_base(C))

    def jcl_member(self, a: str, C: Iterable[str] = ()) -> bool:
        base = self._xi_base(C)
        return numeric_rank(base + [self.unit(a)]) == numeric_rank(base)

    def jcl_closure(self, C: Iterable[str] = ()) -> tuple[str, ...]:
        C = set(C)
        return tuple(g for g in self.gens if g in C or self.jcl_member(g, C))

    def dim_j(self, names: Iterable[str], C: Iterable[str] = ()) -> int:
        base = self._xi_base(C)
        return numeric_rank(base + self.units(set(names))) - numeric_rank(base)

    def derivation_basis(self, C: Iterable[str] = (), j: bool = True) -> list[list]:
        """Values (d(x_1), ..., d(x_n)) of a basis of (j-)derivations vanishing on C."""
        rows = (self._xi_base(C) if j else self.jac + self.units(set(C)))
        return numeric_nullspace(rows, len(self.gens))

    def point_json(self) -> dict:
        return {g: _complex_json(self.spec.point[g]) for g in self.gens}


def _complex_json(v: Any) -> dict:
    v = complex(v)
    return {"re": v.real, "im": v.imag}


def analyze(P: Presentation | Analysis, seed: int = DEFAULT_SEED) -> Analysis:
    if isinstance(P, Analysis):
        return P
    return Analysis(P, seed)


def _meta(A: Analysis) -> dict:
    return {"seed": A.seed, "draws": A.draws, "specialization": A.spec.method,
            "note": REALIZABILITY_NOTE}


# ---------------------------------------------------------------------------
# Public operations


def omega_dimension(P: Presentation | Analysis, C: Iterable[str] | None = None, seed: int = DEFAULT_SEED) -> int:
    A = analyze(P, seed)
    return A.omega_dimension(A.P.constants if C is None else C)


def xi_dimension(P: Presentation | Analysis, C: Iterable[str] | None = None, seed: int = DEFAULT_SEED) -> int:
    A = analyze(P, seed)
    return A.xi_dimension(A.P.constants if C is None else C)


def jcl_member(P: Presentation | Analysis, a: str, C: Iterable[str] = (), seed: int = DEFAULT_SEED) -> bool:
    return analyze(P, seed).jcl_member(a, C)


def jcl_support(P: Presentation | Analysis, a: str, C: Iterable[str], seed: int = DEFAULT_SEED) -> tuple[str, ...] | None:
    """A subset C0 of C with a in jcl(C0), or None when a is not in jcl(C)."""
    A = analyze(P, seed)
    C0 = list(C)
    if not A.jcl_member(a, C0):
        return None
    for c in list(C0):
        trial = [x for x in C0 if x != c]
        if A.jcl_member(a, trial):
            C0 = trial
    return tuple(C0)


def jcl_oracle(P: Presentation | Analysis, seed: int = DEFAULT_SEED):
    """jcl on the generators, as a closure oracle for the property suite."""
    from .moebius import Dependent, Independent, RatMatrix2
    from .pregeom import ClosureOracle

    A = analyze(P, seed)

    def depends(x, s):
        return Dependent(RatMatrix2.identity()) if A.jcl_member(x, s) else Independent()

    return ClosureOracle(depends, "jcl")


def dimension_chain(P: Presentation | Analysis, C: Iterable[str] = (), seed: int = DEFAULT_SEED) -> dict:
    """dim^j(K/C) <= dim Xi(K/C) <= dim Omega(K/jcl(C)) = t.d.(K/jcl(C))."""
    A = analyze(P, seed)
    C = tuple(C)
    closed = A.jcl_closure(C)
    return {
        "dim_j": A.dim_j(A.gens, C),
        "xi": A.xi_dimension(C),
        "omega_over_jcl": A.omega_dimension(closed),
        "td_over_jcl": A.td(A.gens, closed),
        "jcl": list(closed),
    }


# -- geodesic dimension from declared orbits ---------------------------------


def _orbit_classes(P: Presentation) -> tuple[dict[str, str], set[str]]:
    """Union-find over orbits with rational matrices; also the special z's."""
    parent = {p.z: p.z for p in P.jpoints}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    special = set()
    for o in P.orbits:
        g = P.constant_matrix(o)
        if g is None:
            continue
        if o.src == o.dst:
            if not g.is_scalar():
                special.add(o.src)
            continue
        parent[find(o.src)] = find(o.dst)
    roots = {z: find(z) for z in parent}
    special_roots = {roots[z] for z in special}
    return roots, special_roots


def gcl_dimension_declared(P: Presentation, zs: Sequence[str], over: Iterable[str] = ()) -> int:
    """dim^g(zs/over) over Q, read off the declared orbits."""
    roots, special = _orbit_classes(P)
    over_d = {roots[z] for z in over if z in roots}
    classes = {roots[z] for z in zs} - over_d - special
    return len(classes)


def _jets_of(P: Presentation, zs: Iterable[str]) -> set[str]:
    out = set()
    for z in zs:
        p = P.jpoint(z)
        out.update((p.z,) + p.jets)
    return out


@dataclass
class DeltaReport:
    zs: tuple[str, ...]
    over: tuple[str, ...]
    td: int
    dim_g: int
    seed: int | None = None

    @property
    def three_dim_g(self) -> int:
        return 3 * self.dim_g

    @property
    def delta(self) -> int:
        return self.td - 3 * self.dim_g

    @property
    def counterexample_shape(self) -> bool:
        """delta < 0: the shape of a modular Schanuel counterexample."""
        return self.delta < 0

    def to_json(self) -> dict:
        return {"z": list(self.zs), "over": list(self.over), "td": self.td, "three_dim_g": self.three_dim_g,
                "dim_g": self.dim_g, "delta": self.delta, "counterexample_shape": self.counterexample_shape,
                "seed": self.seed}


def delta(P: Presentation | Analysis, zs: Sequence[str], B: Iterable[str] = (), seed: int = DEFAULT_SEED) -> DeltaReport:
    """delta(zs/B) = t.d.(zs, j, j', j'' / B, j(A), j'(A), j''(A)) - 3 dim^g(zs/B), A = B n D."""
    A = analyze(P, seed)
    B = tuple(B)
    dpoints = [b for b in B if b in {p.z for p in A.P.jpoints}]
    over = set(B) | _jets_of(A.P, dpoints)
    td = A.td(_jets_of(A.P, zs), over)
    return DeltaReport(tuple(zs), B, td, gcl_dimension_declared(A.P, zs, dpoints), A.seed)


@dataclass
class InequalityReport:
    lhs: int
    rhs: int
    items: dict
    seed: int | None
    note: str = REALIZABILITY_NOTE

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs

    @property
    def equality(self) -> bool:
        return self.lhs == self.rhs

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds, "equality": self.equality,
                "items": self.items, "seed": self.seed, "note": self.note,
                "verdict": "HOLDS" if self.holds else "NotRealizable"}


def schanuel_verdict(td: int, dim_g: int, dim_j: int) -> InequalityReport:
    """The inequality t.d. >= 3 dim^g + dim^j on given numbers."""
    return InequalityReport(td, 3 * dim_g + dim_j, {"td": td, "dim_g": dim_g, "dim_j": dim_j}, None)


def schanuel_report(P: Presentation | Analysis, zs: Sequence[str], C: Iterable[str] = (),
                    seed: int = DEFAULT_SEED, strict: bool = False) -> InequalityReport:
    """t.d.(zs, j, j', j''/C) against 3 dim^g(zs/C) + dim^j(zs/C).

    A failure means the presentation cannot be realised in a j-field; with
    ``strict`` it raises :class:`NotRealizable`.
    """
    A = analyze(P, seed)
    C = tuple(C)
    td = A.td(_jets_of(A.P, zs), C)
    dpoints = [c for c in C if c in {p.z for p in A.P.jpoints}]
    dg = gcl_dimension_declared(A.P, zs, dpoints)
    dj = A.dim_j(zs, C)
    rep = InequalityReport(td, 3 * dg + dj, {"td": td, "dim_g": dg, "three_dim_g": 3 * dg, "dim_j": dj,
                                             "z": list(zs), "C": list(C)}, A.seed)
    if strict and not rep.holds:
        raise NotRealizable(f"t.d. {td} < {rep.rhs}")
    return rep


def _is_form_ah(g: RatMatrix2) -> bool:
    """Is g a scalar (from any field) times a rational matrix?"""
    ents = list(g.entries())
    pivot = next(e for e in ents if not e.is_zero())
    return all((e / pivot).is_constant() for e in ents)


@dataclass
class MainReport:
    n: int
    m: int
    lhs: int
    hypothesis: str
    certified: dict
    seed: int

    @property
    def threshold(self) -> int:
        return 3 * self.n * self.m

    @property
    def threshold_4nm(self) -> int:
        return 4 * self.n * self.m

    @property
    def holds(self) -> bool:
        return self.lhs >= self.threshold

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "lhs": self.lhs, "threshold_3nm": self.threshold,
                "threshold_4nm": self.threshold_4nm, "holds_3nm": self.holds,
                "holds_4nm": self.lhs >= self.threshold_4nm, "hypothesis": self.hypothesis,
                "certified": self.certified, "seed": self.seed, "note": REALIZABILITY_NOTE}


def main_inequality_report(P: Presentation | Analysis, taus: Sequence[str], zs: Sequence[str],
                           gs: Sequence[Sequence[str]], hypothesis: str | None = None,
                           seed: int = DEFAULT_SEED) -> MainReport:
    """t.d.(jets of zs and of g_i zs / F, C, zs) against 3nm, F = Q(taus).

    ``gs[i]`` gives the entries (a, b, c, d) of g_i, expressions in tau_i; for
    each z and g_i the presentation must declare an orbit ``g_i z``.  C is the
    presentation's constant set.  Hypothesis "a" or "b" (or None for
    whichever certifies) must be verifiable from the data.
    """
    A = analyze(P, seed)
    P = A.P
    n, m = len(zs), len(taus)
    if len(gs) != m:
        raise ValueError("need one matrix per tau")
    cert: dict[str, Any] = {}
    cert["taus_jcl_independent"] = A.dim_j(taus) == m
    images: list[str] = []
    for i, (tau, gent) in enumerate(zip(taus, gs)):
        g = RatMatrix2(*(parse_expression(str(e), P.generators) for e in gent))
        if any(v not in (tau,) for e in g.entries() for v in e.used_variables()):
            raise ValueError(f"g_{i} must have entries in Q({tau})")
        cert[f"g{i}_not_form_ah"] = not _is_form_ah(g)
        for z in zs:
            dst = None
            for o in P.orbits:
                if o.src == z and P.orbit_matrix(o).proportional(g):
                    dst = o.dst
                    break
            if dst is None:
                raise ValueError(f"no declared orbit g_{i} {z}")
            images.append(dst)
    base_ok = cert["taus_jcl_independent"] and all(v for k, v in cert.items() if k.endswith("not_form_ah"))
    cert["z_gcl_independent"] = gcl_dimension_declared(P, zs) == n
    cert["a"] = base_ok and cert["z_gcl_independent"] and gcl_dimension_declared(P, list(zs) + images) == n * (m + 1)
    roots, special = _orbit_classes(P)
    cert["b"] = (base_ok and cert["z_gcl_independent"] and set(zs) <= set(P.constants)
                 and not any(roots[z] in special for z in zs))
    chosen = hypothesis
    if chosen is None:
        chosen = "a" if cert["a"] else "b" if cert["b"] else None
    if chosen not in ("a", "b") or not cert[chosen]:
        raise HypothesisUncertified(f"hypothesis {hypothesis or '(a) or (b)'} not certified: {cert}")
    jets = set()
    for z in list(zs) + images:
        jets.update(P.jpoint(z).jets)
    lhs = A.td(jets, set(taus) | set(P.constants) | set(zs))
    return MainReport(n, m, lhs, chosen, cert, A.seed)


# -- essential counterexamples -------------------------------------------------


@dataclass(frozen=True)
class NotEssential:
    witness: tuple[str, ...]
    delta_witness: int
    delta_input: int


@dataclass(frozen=True)
class CandidateUpTo:
    bound: int
    delta_input: int
    searched: int


def _orbit_graph_heights(P: Presentation) -> dict[tuple[str, str], int]:
    """Height of the primitive form of each declared rational orbit edge."""
    out = {}
    for o in P.orbits:
        g = P.constant_matrix(o)
        if g is None:
            continue
        h = max(abs(v) for v in primitive_form(g).matrix)
        for key in ((o.src, o.dst), (o.dst, o.src)):
            out[key] = min(out.get(key, h), h)
    return out


def essential_candidate_check(P: Presentation | Analysis, zs: Sequence[str], bound: int = 10,
                              seed: int = DEFAULT_SEED) -> NotEssential | CandidateUpTo:
    """Look for a tuple c from gcl(zs) with delta(c) < delta(zs).

    Candidates are declared j-points reachable from zs through rational
    orbit edges whose primitive forms have height <= bound; tuples have
    length <= len(zs).
    """
    A = analyze(P, seed)
    d0 = delta(A, zs).delta
    if d0 >= 0:
        raise PreconditionFailed(f"delta = {d0} >= 0: not a counterexample")
    edges = _orbit_graph_heights(A.P)
    reach = set(zs)
    frontier = list(zs)
    while frontier:
        x = frontier.pop()
        for (s, t), h in edges.items():
            if s == x and h <= bound and t not in reach:
                reach.add(t)
                frontier.append(t)
    pool = sorted(reach, key=lambda z: [p.z for p in A.P.jpoints].index(z))
    searched = 0
    best = None
    for k in range(1, len(zs) + 1):
        for c in itertools.combinations(pool, k):
            searched += 1
            d = delta(A, c).delta
            if d < d0 and (best is None or d < best[1]):
                best = (c, d)
    if best is not None:
        return NotEssential(best[0], best[1], d0)
    return CandidateUpTo(bound, d0, searched)


# ---------------------------------------------------------------------------
# Corresponding systems


def _exact_inverse(raw: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    n = len(raw)
    if any(len(r) != n for r in raw):
        raise ValueError("matrix must be square")
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(raw)]
    red, pivots = row_reduce(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise SingularSystem("(d_i tau_k) is singular")
    return [row[n:] for row in red[:n]]


def kronecker_normalize(raw: Sequence[Sequence[Any]]) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    """Coefficients A = raw^-1 and the normalised matrix A raw (the identity).

    ``raw[i][k]`` is d_i(tau_k); the new derivations are sum_k A[i][k] d_k.
    """
    A = _exact_inverse(raw)
    n = len(raw)
    normalized = [[sum((A[i][l] * Fraction(raw[l][k]) for l in range(n)), Fraction(0)) for k in range(n)]
                  for i in range(n)]
    return A, normalized


@dataclass
class DerivationSystem:
    taus: tuple[str, ...]
    generators: tuple[str, ...]
    raw: list[list]
    coefficients: list[list]
    normalized: list[list]
    complementary: list[list]
    spanning_count: int
    seed: int

    def values_on_taus(self) -> list[list]:
        idx = [self.generators.index(t) for t in self.taus]
        return [[row[k] for k in idx] for row in self.normalized]

    def to_json(self) -> dict:
        cj = lambda rows: [[_complex_json(x) for x in r] for r in rows]
        return {"taus": list(self.taus), "generators": list(self.generators), "raw": cj(self.raw),
                "coefficients": cj(self.coefficients), "normalized": cj(self.normalized),
                "complementary": cj(self.complementary), "spanning_count": self.spanning_count,
                "seed": self.seed}


def corresponding_system(P: Presentation | Analysis, taus: Sequence[str], seed: int = DEFAULT_SEED) -> DerivationSystem:
    """j-derivations d'_i with d'_i(tau_k) = delta_ik, plus complementary ones vanishing on taus."""
    A = analyze(P, seed)
    taus = tuple(taus)
    basis = A.derivation_basis(())
    idx = [A.index[t] for t in taus]
    chosen: list[int] = []
    for i, d in enumerate(basis):
        rows = [[basis[c][k] for k in idx] for c in chosen + [i]]
        if numeric_rank(rows) == len(chosen) + 1:
            chosen.append(i)
        if len(chosen) == len(taus):
            break
    if len(chosen) < len(taus):
        raise SingularSystem("(d_i tau_k) is singular: taus are not jcl-independent")
    with mpmath.workdps(WORK_DPS):
        raw = mpmath.matrix([[basis[c][k] for k in idx] for c in chosen])
        inv = raw ** -1
        m = len(taus)
        normalized = []
        for i in range(m):
            normalized.append([sum((inv[i, k] * basis[chosen[k]][x] for k in range(m)), mpmath.mpc(0))
                               for x in range(len(A.gens))])
        complementary = []
        for i, d in enumerate(basis):
            if i in chosen:
                continue
            # subtract the combination of chosen derivations agreeing with d on the taus
            b = mpmath.lu_solve(raw.T, mpmath.matrix([d[k] for k in idx]))
            complementary.append([d[x] - sum((b[k] * basis[chosen[k]][x] for k in range(m)), mpmath.mpc(0))
                                  for x in range(len(A.gens))])
    raw_rows = [[raw[i, k] for k in range(m)] for i in range(m)]
    coeff_rows = [[inv[i, k] for k in range(m)] for i in range(m)]
    return DerivationSystem(taus, A.gens, raw_rows, coeff_rows, normalized, complementary, len(basis), A.seed)
