"""Independent oracles and random instance generators shared by the tests."""
from __future__ import annotations

import random
from fractions import Fraction

import sympy

from jschanuel.derivations import JPoint, Orbit, Presentation
from jschanuel.exactnum import MultiPoly, RationalFunction
from jschanuel.moebius import Dependent, Independent, RatMatrix2
from jschanuel.pregeom import ClosureOracle


# -- broken closure operators ---------------------------------------------------


def interval_hull_oracle(values: dict) -> ClosureOracle:
    """cl(S) = everything between min S and max S: extensive, monotone,
    idempotent, but no exchange."""

    def depends(x, s):
        if not s:
            return Independent()
        vs = [values[y] for y in s]
        return Dependent(RatMatrix2.identity()) if min(vs) <= values[x] <= max(vs) else Independent()

    return ClosureOracle(depends, "interval hull")


def doubling_oracle(values: dict) -> ClosureOracle:
    """cl(S) = S together with the doubles of S: not idempotent."""

    def depends(x, s):
        hit = any(values[x] == values[y] or values[x] == 2 * values[y] for y in s)
        return Dependent(RatMatrix2.identity()) if hit else Independent()

    return ClosureOracle(depends, "doubling")


# -- exact sample universe for gcl ------------------------------------------------


def gcl_sample():
    V = ("s", "t")
    s, t = RationalFunction.var("s", V), RationalFunction.var("t", V)
    one = RationalFunction.constant(1, V)
    return {
        "t": t,
        "2t+1": 2 * t + 1,
        "1/t": one / t,
        "t^2": t * t,
        "s": s,
        "(s+3)/(s-1)": (s + 3) / (s - 1),
        "s*t": s * t,
        "s+t": s + t,
    }


# -- constructed instances for disjoint1_extract -----------------------------------


def random_rational(rng, height=6):
    return Fraction(rng.randint(-height, height), rng.randint(1, height))


def random_invertible(rng, height=6):
    while True:
        g = RatMatrix2(*(random_rational(rng, height) for _ in range(4)))
        if g.det() != 0 and not g.is_scalar():
            return g


def disjoint1_instance(rng):
    """(g over Q[x], l1, l2) with l1 = g l2, built as g = p(x) h with h over Q."""
    t = RationalFunction.var("t")
    deg = rng.randint(1, 3)
    l2 = sum((random_rational(rng) * t ** k for k in range(deg + 1)), RationalFunction.constant(0, ("t",)))
    l2 = l2 + t ** (deg + 1)
    h = random_invertible(rng)
    l1 = h.a * l2 + h.b
    l1 = l1 / (h.c * l2 + h.d)
    X = ("x",)
    p = MultiPoly.constant(random_rational(rng) or 1, X)
    for k in range(1, rng.randint(1, 3) + 1):
        p = p + MultiPoly.var("x", X) ** k * random_rational(rng)
    if p.is_constant():
        p = p + MultiPoly.var("x", X)
    g = [[p * h.a, p * h.b], [p * h.c, p * h.d]]
    return g, l1, l2, h


# -- random presentations -----------------------------------------------------------


def triangular_presentation(rng, n_points=None, n_rel=None):
    """Generic j-points plus relations ``x_k = f(earlier generators)``.

    Returns the presentation and, for each generator, its polynomial
    parametrisation (as a sympy expression in the free generators).
    """
    n_points = n_points or rng.randint(1, 2)
    pts = [JPoint(f"z{i}", f"a{i}", f"b{i}", f"c{i}") for i in range(n_points)]
    gens = [n for p in pts for n in p.names]
    extra = [f"u{i}" for i in range(rng.randint(0, 2))]
    gens += extra
    order = gens[:]
    rng.shuffle(order)
    n_rel = rng.randint(0, len(gens) - 1) if n_rel is None else n_rel
    defined = {}
    syms = {g: sympy.Symbol(g) for g in gens}
    rels = []
    for k in sorted(rng.sample(range(1, len(order)), min(n_rel, len(order) - 1))):
        target = order[k]
        earlier = order[:k]
        expr, text = 0, []
        for _ in range(rng.randint(1, 3)):
            c = rng.randint(1, 5) * rng.choice((1, -1))
            mono = [rng.choice(earlier) for _ in range(rng.randint(1, 2))]
            expr += c * sympy.Mul(*(syms[m] for m in mono))
            text.append(f"{c}*" + "*".join(mono))
        expr += rng.randint(1, 9)
        text.append(str(int(expr.subs({s: 0 for s in syms.values()}))))
        defined[target] = expr
        rels.append(f"{target} - ({' + '.join(text)})")
    P = Presentation(tuple(gens), tuple(rels), (), tuple(pts))
    free = [g for g in gens if g not in defined]
    param = {}
    for g in order:
        if g in defined:
            param[g] = sympy.expand(defined[g].subs(param))
        else:
            param[g] = syms[g]
    return P, free, param


def brute_force_td(param, free, names, over=(), draws=3, seed=0):
    """t.d.(names / over) from the Jacobian of the parametrisation, taking the
    largest ranks over ``draws`` random rational points."""
    rng = random.Random(seed)
    fs = [sympy.Symbol(f) for f in free]

    def rank(subset):
        if not subset or not fs:
            return 0
        J = sympy.Matrix([[sympy.diff(param[n], f) for f in fs] for n in subset])
        best = 0
        for _ in range(draws):
            pt = {f: sympy.Rational(rng.randint(-50, 50), rng.randint(1, 50)) for f in fs}
            best = max(best, J.subs(pt).rank())
        return best

    names, over = set(names), set(over)
    return rank(sorted(names | over)) - rank(sorted(over))


def omega_brute_force(P, param, free, C=(), draws=3, seed=0):
    """n - rank of the relation Jacobian (plus e_c, c in C) at points on the variety."""
    rng = random.Random(seed)
    syms = [sympy.Symbol(g) for g in P.generators]
    rels = [sympy.sympify(r.replace("^", "**")) if isinstance(r, str) else None for r in _relation_texts(P)]
    best = 0
    for _ in range(draws):
        pt = {sympy.Symbol(f): sympy.Rational(rng.randint(-50, 50), rng.randint(1, 50)) for f in free}
        vals = {sympy.Symbol(g): param[g].subs(pt) for g in P.generators}
        rows = [[sympy.diff(r, s).subs(vals) for s in syms] for r in rels]
        rows += [[1 if g == c else 0 for g in P.generators] for c in C]
        best = max(best, sympy.Matrix(rows).rank() if rows else 0)
    return len(syms) - best


def _relation_texts(P):
    out = []
    for r in P.relations:
        terms = []
        for e, c in r.terms.items():
            mono = "*".join(f"{v}**{k}" for v, k in zip(r.variables, e) if k)
            terms.append(f"({c})" + (f"*{mono}" if mono else ""))
        out.append(" + ".join(terms) or "0")
    return out


SMALL_MATRICES = (("2", "0", "0", "1"), ("1", "1", "0", "1"), ("0", "-1", "1", "0"), ("1", "0", "1", "2"))


def orbit_configuration(rng):
    """Random j-points, rational orbits forming a forest, and triangular
    relations among the generators of the root points.

    Returns (presentation, roots, param, free) where ``roots[z]`` is the
    root of z's orbit tree and ``param`` parametrises root generators.
    """
    k = rng.randint(2, 4)
    pts = [JPoint(f"z{i}", f"a{i}", f"b{i}", f"c{i}") for i in range(k)]
    roots, orbits = {}, []
    for i, p in enumerate(pts):
        if i and rng.random() < 0.5:
            src = pts[rng.randrange(i)].z
            orbits.append(Orbit(rng.choice(SMALL_MATRICES), src, p.z))
            roots[p.z] = roots[src]
        else:
            roots[p.z] = p.z
    root_pts = [p for p in pts if roots[p.z] == p.z]
    gens = [n for p in pts for n in p.names]
    root_gens = [n for p in root_pts for n in p.names]
    order = root_gens[:]
    rng.shuffle(order)
    syms = {g: sympy.Symbol(g) for g in gens}
    defined, rels = {}, []
    for kk in sorted(rng.sample(range(1, len(order)), rng.randint(0, min(3, len(order) - 1)))):
        target, src = order[kk], rng.choice(order[:kk])
        c = rng.randint(1, 4)
        e = rng.randint(1, 2)
        defined[target] = c * syms[src] ** e + rng.randint(1, 9)
        rels.append(f"{target} - ({defined[target]})".replace("**", "^"))
    P = Presentation(tuple(gens), tuple(rels), (), tuple(pts), tuple(orbits))
    free = [g for g in root_gens if g not in defined]
    param = {}
    for g in order:
        param[g] = sympy.expand(defined[g].subs(param)) if g in defined else syms[g]
    return P, roots, param, free


def brute_force_delta(P, roots, param, free, zs, over=()):
    """td - 3 dim^g with every point replaced by the root of its orbit tree."""
    names = {n for z in zs for n in P.jpoint(roots[z]).names}
    base = {n for z in over for n in P.jpoint(roots[z]).names}
    td = brute_force_td(param, free, names, base)
    dim_g = len({roots[z] for z in zs} - {roots[z] for z in over})
    return td - 3 * dim_g
