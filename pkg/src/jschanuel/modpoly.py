"""Modular polynomials and the relations obtained by differentiating them.

Phi_N is built from the classical coset expansion: the ``psi(N)`` values
``j((a tau + b)/d)`` with ``ad = N, 0 <= b < d, gcd(a, b, d) = 1`` are the
roots of ``Phi_N(X, j(tau))``.  In ``Q = q^(1/N)``,

    j((a tau + b)/d) = sum_n c(n) zeta_N^(a b n) Q^(a^2 n),

so the elementary symmetric functions are series in Q over Z[zeta_N].
They are computed in the group ring Z[C_N] (residues mod ``x^N - 1``),
reduced mod the cyclotomic polynomial, checked to be rational integer
series in q, and rewritten as polynomials in j by removing principal parts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Mapping, Sequence

from .exactnum import CycloCoeff, IntPoly2, MultiPoly, reduce_mod_cyclotomic
from .qseries import LaurentSeries, int_mul_trunc, j_series_int

MAX_LEVEL = 10


class PrecisionExhausted(RuntimeError):
    pass


class NonIntegralCoefficient(ArithmeticError):
    pass


def psi(n: int) -> int:
    """Dedekind psi: n * prod_{p | n} (1 + 1/p), the number of cosets."""
    out = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            out = out // p * (p + 1)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out = out // m * (m + 1)
    return out


def cosets(n: int) -> list[tuple[int, int, int]]:
    """Upper-triangular representatives (a, b, d) for the level-n cosets."""
    out = []
    for a in range(1, n + 1):
        if n % a:
            continue
        d = n // a
        for b in range(d):
            if math.gcd(math.gcd(a, b), d) == 1:
                out.append((a, b, d))
    return out


# ---------------------------------------------------------------------------
# Series in Q with coefficients in the group ring Z[C_N]

_INF = 1 << 60


class _GRSeries:
    """sum_n sum_r data[(n - v) N + r] zeta^r Q^n, known through Q^prec."""

    __slots__ = ("n", "v", "prec", "data")

    def __init__(self, n: int, v: int, prec: int, data: list[int]):
        self.n, self.v, self.prec, self.data = n, v, prec, data

    @classmethod
    def one(cls, n: int) -> "_GRSeries":
        return cls(n, 0, _INF, [1] + [0] * (n - 1))

    def length(self) -> int:
        return len(self.data) // self.n

    def __mul__(self, o: "_GRSeries") -> "_GRSeries":
        N = self.n
        v = self.v + o.v
        prec = min(self.prec + o.v, o.prec + self.v)
        L = min(prec - v + 1, self.length() + o.length() - 1)
        if L <= 0:
            return _GRSeries(N, v, prec, [])
        S = 2 * N - 1
        fa = _spread(self.data, N, S, L)
        fb = _spread(o.data, N, S, L)
        prod = int_mul_trunc(fa, fb, L * S)
        out = [0] * (L * N)
        for k in range(L):
            base = k * S
            row = k * N
            for r in range(S):
                c = prod[base + r]
                if c:
                    out[row + (r % N)] += c
        return _GRSeries(N, v, prec, out)

    def __sub__(self, o: "_GRSeries") -> "_GRSeries":
        N = self.n
        v = min(self.v, o.v)
        prec = min(self.prec, o.prec)
        top = min(prec, max(self.v + self.length(), o.v + o.length()) - 1)
        L = max(0, top - v + 1)
        out = [0] * (L * N)
        for s, sign in ((self, 1), (o, -1)):
            off = (s.v - v) * N
            for i, c in enumerate(s.data):
                if c and off + i < len(out):
                    out[off + i] += sign * c
        return _GRSeries(N, v, prec, out)

    def __neg__(self):
        return _GRSeries(self.n, self.v, self.prec, [-c for c in self.data])


def _spread(data: list[int], n: int, stride: int, length: int) -> list[int]:
    out = [0] * (length * stride)
    for k in range(min(length, len(data) // n)):
        out[k * stride : k * stride + n] = data[k * n : (k + 1) * n]
    return out


def _coset_series(a: int, b: int, d: int, n: int, jc: Sequence[int], prec: int) -> _GRSeries:
    """j((a tau + b)/d) as a series in Q = q^(1/n) over Z[C_n], through Q^prec."""
    a2 = a * a
    if prec > a2 * (len(jc) - 1) - 1:
        raise PrecisionExhausted("not enough terms of j for the requested precision")
    v = -a2
    L = prec - v + 1
    data = [0] * (L * n)
    for idx, c in enumerate(jc):
        e = idx - 1  # exponent of q
        pos = a2 * e - v
        if pos >= L:
            break
        data[pos * n + (a * b * e) % n] += c
    return _GRSeries(n, v, prec, data)


def required_j_precision(n: int, margin: int) -> int:
    """Terms of j needed so that every coefficient of the product is known
    through q^margin: the product loses sum(a^2) powers of Q = q^(1/n)."""
    return n * margin + sum(a * a for a, _, _ in cosets(n)) + 1


def _reduce_to_int_q_series(s: _GRSeries) -> LaurentSeries:
    """Reduce mod Phi_N; require rational integer coefficients at exponents in N Z."""
    N = s.n
    if s.prec >= _INF // 2:
        raise PrecisionExhausted("unbounded precision marker leaked")
    qprec = math.floor(s.prec / N)
    coeffs: dict[int, int] = {}
    for k in range(s.length()):
        e = s.v + k
        if e > s.prec:
            break
        res = reduce_mod_cyclotomic(s.data[k * N : (k + 1) * N], N)
        if any(res[1:]):
            raise NonIntegralCoefficient(f"coefficient of Q^{e} is not rational: {res}")
        c = res[0] if res else 0
        if c:
            if e % N:
                raise NonIntegralCoefficient(f"nonzero coefficient at Q^{e}, exponent not divisible by {N}")
            if e // N <= qprec:
                coeffs[e // N] = c
    if not coeffs:
        return LaurentSeries.zero(qprec)
    v = min(coeffs)
    return LaurentSeries(v, [coeffs.get(k, 0) for k in range(v, qprec + 1)], qprec)


def _express_in_j(s: LaurentSeries, jpowers: list[LaurentSeries], margin: int) -> dict[int, int]:
    """Write s as an integer polynomial in j, checking the remainder vanishes."""
    out: dict[int, int] = {}
    rest = s
    if rest.precision < margin:
        raise PrecisionExhausted(f"series known only through q^{rest.precision}")
    while not rest.is_zero() and rest.valuation <= 0:
        k = -rest.valuation
        c = rest.leading()
        if k >= len(jpowers):
            raise PrecisionExhausted("pole order exceeds prepared powers of j")
        out[k] = c
        rest = rest - jpowers[k] * c
        if rest.precision < margin:
            raise PrecisionExhausted("elimination consumed the available precision")
    if not rest.is_zero():
        raise NonIntegralCoefficient(f"remainder {rest!r} is not a polynomial in j")
    return out


def _construct(n: int, m: int, margin: int) -> IntPoly2:
    jc = j_series_int(m).coeffs  # c(-1) .. c(m)
    target = n * margin
    total = sum(a * a for a, _, _ in cosets(n))
    poly = [_GRSeries.one(n)]
    for a, b, d in cosets(n):
        s = _coset_series(a, b, d, n, jc, target + total - a * a)
        new = []
        for k in range(len(poly) + 1):
            hi = poly[k - 1] if k >= 1 else None
            lo = (s * poly[k]) if k < len(poly) else None
            if hi is None:
                new.append(-lo)
            elif lo is None:
                new.append(hi)
            else:
                new.append(hi - lo)
        poly = new
    deg = len(poly) - 1
    jq = j_series_int(m)
    jpowers = [LaurentSeries(0, [1], m + deg + 2)]
    for _ in range(deg + 1):
        jpowers.append(jpowers[-1] * jq)
    coeffs: dict[tuple[int, int], int] = {}
    for k, series in enumerate(poly):
        if k == deg:
            coeffs[(k, 0)] = 1
            continue
        qs = _reduce_to_int_q_series(series)
        for i, c in _express_in_j(qs, jpowers, margin).items():
            coeffs[(k, i)] = c
    return IntPoly2(coeffs)


@dataclass(frozen=True, eq=False)
class ModularPolynomial:
    level: int
    poly: IntPoly2
    partial_x: IntPoly2
    partial_y: IntPoly2
    precision: int

    def __call__(self, x: Any, y: Any) -> Any:
        return self.poly.evaluate(x, y)

    def partial(self, a: int, b: int) -> IntPoly2:
        return _partial(self.level, a, b)

    def to_json(self) -> dict:
        return {"N": self.level, "coeffs": self.poly.to_records()}

    @property
    def degree(self) -> int:
        return self.poly.degree_x()


def construction_precision(n: int, margin: int = 4) -> int:
    return required_j_precision(n, margin)


@lru_cache(maxsize=None)
def build_modular_polynomial(n: int, precision: int | None = None, margin: int = 4,
                             max_level: int = MAX_LEVEL) -> ModularPolynomial:
    """Exact Phi_N; retries at doubled precision if the series run short."""
    if n < 1:
        raise ValueError("level must be positive")
    if n > max_level:
        raise ValueError(f"level {n} exceeds the configured bound {max_level}")
    m = precision or construction_precision(n, margin)
    for _ in range(8):
        try:
            p = _construct(n, m, margin)
            break
        except PrecisionExhausted:
            m *= 2
            margin *= 2
    else:
        raise PrecisionExhausted(f"could not resolve Phi_{n}")
    return ModularPolynomial(n, p, p.partial_x(), p.partial_y(), m)


@lru_cache(maxsize=None)
def _partial(n: int, a: int, b: int) -> IntPoly2:
    return build_modular_polynomial(n).poly.partial(a, b)


def build_modular_polynomial_slow(n: int, m: int | None = None) -> IntPoly2:
    """Independent route through generic LaurentSeries over CycloCoeff.

    Slow; used to cross-check the packed construction at small levels.
    """
    m = m or construction_precision(n)
    jc = j_series_int(m).coeffs
    one = CycloCoeff.from_int(n, 1)
    zero = CycloCoeff.from_int(n, 0)
    poly = [LaurentSeries(0, [one], 10 ** 9)]
    for a, b, d in cosets(n):
        a2 = a * a
        prec = a2 * m + a2 - 1
        coeffs = [zero] * (prec + a2 + 1)
        for idx, c in enumerate(jc):
            e = idx - 1
            coeffs[a2 * e + a2] = CycloCoeff.zeta_power(n, a * b * e, c)
        s = LaurentSeries(-a2, coeffs, prec)
        new = []
        for k in range(len(poly) + 1):
            terms = []
            if k >= 1:
                terms.append(poly[k - 1])
            if k < len(poly):
                terms.append(-(s * poly[k]))
            new.append(terms[0] if len(terms) == 1 else terms[0] + terms[1])
        poly = new
    deg = len(poly) - 1
    jq = j_series_int(m)
    jpowers = [LaurentSeries(0, [1], m + deg + 2)]
    for _ in range(deg + 1):
        jpowers.append(jpowers[-1] * jq)
    out: dict[tuple[int, int], int] = {(deg, 0): 1}
    for k, series in enumerate(poly[:-1]):
        qc: dict[int, int] = {}
        for e, c in series.items():
            if e > series.precision:
                break
            if not c:
                continue
            if not c.is_rational() or e % n:
                raise NonIntegralCoefficient(f"Q^{e}: {c!r}")
            qc[e // n] = c.to_int()
        qprec = series.precision // n
        qs = LaurentSeries(min(qc), [qc.get(i, 0) for i in range(min(qc), qprec + 1)], qprec) if qc else LaurentSeries.zero(qprec)
        for i, c in _express_in_j(qs, jpowers, 1).items():
            out[(k, i)] = c
    return IntPoly2(out)


def verify_series_identity(phi: ModularPolynomial | IntPoly2, n: int, m: int) -> LaurentSeries:
    """Phi_N(j(q^N), j(q)) through q^m; identically zero for the true Phi_N."""
    poly = phi.poly if isinstance(phi, ModularPolynomial) else phi
    deg = max(poly.degree_x(), poly.degree_y())
    jm = m + 2 * deg * n + 2
    while True:
        jq = j_series_int(jm)
        x = jq.substitute_power(n)
        res = poly.evaluate(x, jq)
        if res.precision >= m:
            return res.truncate(m)
        jm += m - res.precision + 1


def check_singularity(n: int, x: Any, y: Any, tol: float | None = None) -> bool:
    """True iff (x, y) is a singular point of Phi_N(X, Y) = 0.

    Exact for rational input; numeric input is compared with ``tol``
    relative to the size of the terms.
    """
    phi = build_modular_polynomial(n)
    polys = (phi.poly, phi.partial_x, phi.partial_y)
    if tol is None:
        return all(p.evaluate(x, y) == 0 for p in polys)
    return all(abs(p.evaluate(x, y)) <= tol * max(p.abs_evaluate(x, y), 1) for p in polys)


# ---------------------------------------------------------------------------
# Derived relations


JET_VARS = ("u1", "u2", "u3", "v1", "v2", "v3", "w1", "w2", "w3")


def _images() -> dict[str, MultiPoly]:
    """The derivation d/dz on jet symbols.

    u_k = j^(k)(z), v_k = j^(k)(g z), w_k = (d/dz)^k (g z).
    """
    var = lambda s: MultiPoly.var(s, JET_VARS)
    return {
        "u1": var("u2"), "u2": var("u3"),
        "v1": var("v2") * var("w1"), "v2": var("v3") * var("w1"),
        "w1": var("w2"), "w2": var("w3"),
    }


@dataclass(frozen=True, eq=False)
class DerivedRelation:
    """sum over (a, b) of Phi_N^(a,b)(j(z), j(gz)) * terms[(a, b)](jets) = 0."""

    level: int
    order: int
    terms: Mapping[tuple[int, int], MultiPoly]

    def evaluate(self, jet_z: Sequence[Any], jet_gz: Sequence[Any], chain: Sequence[Any]) -> tuple[Any, float]:
        """Value and a magnitude scale (sum of |summands|).

        ``jet_z``, ``jet_gz`` are (j0, j1, j2, j3); ``chain`` is (w1, w2, w3).
        """
        vals = {"u1": jet_z[1], "u2": jet_z[2], "u3": jet_z[3],
                "v1": jet_gz[1], "v2": jet_gz[2], "v3": jet_gz[3],
                "w1": chain[0], "w2": chain[1], "w3": chain[2]}
        total = 0
        scale = 0.0
        for (a, b), mono in self.terms.items():
            p = _partial(self.level, a, b)
            pv = p.evaluate(jet_z[0], jet_gz[0])
            pscale = p.abs_evaluate(jet_z[0], jet_gz[0])
            for e, c in mono.terms.items():
                m = MultiPoly(JET_VARS, {e: c}).evaluate(vals)
                total = total + pv * m
                scale += pscale * float(abs(m))
        return total, scale

    def __str__(self):
        parts = []
        for (a, b), mono in sorted(self.terms.items()):
            name = "Phi" + "_X" * a + "_Y" * b
            parts.append(f"{name}(j(z),j(gz))*({mono})")
        return " + ".join(parts) + " = 0"


def derived_relation(n: int, order: int) -> DerivedRelation:
    """Differentiate Phi_N(j(z), j(gz)) = 0 with respect to z ``order`` times."""
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    if n < 1:
        raise ValueError("level must be positive")
    return DerivedRelation(n, order, _derived_terms(order))


@lru_cache(maxsize=None)
def _derived_terms(order: int) -> dict[tuple[int, int], MultiPoly]:
    images = _images()
    u1 = MultiPoly.var("u1", JET_VARS)
    v1w1 = MultiPoly.var("v1", JET_VARS) * MultiPoly.var("w1", JET_VARS)
    terms: dict[tuple[int, int], MultiPoly] = {(0, 0): MultiPoly.constant(1, JET_VARS)}
    for _ in range(order):
        new: dict[tuple[int, int], MultiPoly] = {}

        def add(key, p):
            new[key] = new[key] + p if key in new else p

        for (a, b), mono in terms.items():
            add((a + 1, b), mono * u1)
            add((a, b + 1), mono * v1w1)
            dm = mono.derive(images)
            if not dm.is_zero():
                add((a, b), dm)
        terms = {k: v for k, v in new.items() if not v.is_zero()}
    return terms


def chain_factors(g: Any, z: Any) -> tuple[Any, Any, Any]:
    """(d/dz)^k of g z for k = 1, 2, 3."""
    a, b, c, d = g.entries()
    det = a * d - b * c
    den = c * z + d
    return (det / den ** 2, -2 * c * det / den ** 3, 6 * c * c * det / den ** 4)
