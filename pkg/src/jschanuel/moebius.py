"""GL2 acting on the projective line by Moebius maps.

Points are rationals (``Fraction``), elements of a rational function field
(:class:`RationalFunction`), or numeric complex numbers.  The point at
infinity is the singleton :data:`INFINITY`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Sequence

from .exactnum import MultiPoly, RationalFunction, row_reduce, nullspace


class SingularMatrix(ValueError):
    pass


class ScalarMatrix(ValueError):
    pass


class ConstantInput(ValueError):
    pass


class NotInUpperHalfPlane(ValueError):
    pass


class _Infinity:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INFINITY"


INFINITY = _Infinity()


def _is_zero(x: Any) -> bool:
    if isinstance(x, (MultiPoly, RationalFunction)):
        return x.is_zero()
    return x == 0


@dataclass(frozen=True, eq=False)
class RatMatrix2:
    """[[a, b], [c, d]] with entries in Q or in a polynomial/rational-function ring."""

    a: Any
    b: Any
    c: Any
    d: Any

    @classmethod
    def of(cls, rows: Sequence[Sequence[Any]]) -> "RatMatrix2":
        (a, b), (c, d) = rows
        conv = lambda v: Fraction(v) if isinstance(v, (int, str)) else v
        return cls(conv(a), conv(b), conv(c), conv(d))

    @classmethod
    def identity(cls) -> "RatMatrix2":
        return cls(Fraction(1), Fraction(0), Fraction(0), Fraction(1))

    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def rows(self) -> list[list]:
        return [[self.a, self.b], [self.c, self.d]]

    def det(self) -> Any:
        return self.a * self.d - self.b * self.c

    def is_scalar(self) -> bool:
        return _is_zero(self.b) and _is_zero(self.c) and _is_zero(self.a - self.d)

    def __matmul__(self, o: "RatMatrix2") -> "RatMatrix2":
        return RatMatrix2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def scale(self, k: Any) -> "RatMatrix2":
        return RatMatrix2(self.a * k, self.b * k, self.c * k, self.d * k)

    def adjugate(self) -> "RatMatrix2":
        return RatMatrix2(self.d, -self.b, -self.c, self.a)

    def inverse(self) -> "RatMatrix2":
        dt = self.det()
        if _is_zero(dt):
            raise SingularMatrix("matrix is not invertible")
        return RatMatrix2(self.d / dt, -self.b / dt, -self.c / dt, self.a / dt)

    def __eq__(self, other):
        if not isinstance(other, RatMatrix2):
            return NotImplemented
        return all(_is_zero(x - y) for x, y in zip(self.entries(), other.entries()))

    def proportional(self, other: "RatMatrix2") -> bool:
        """Same element of PGL2 (entries proportional)."""
        e, f = self.entries(), other.entries()
        return all(_is_zero(e[i] * f[k] - e[k] * f[i]) for i in range(4) for k in range(4))

    __hash__ = None

    def to_strings(self) -> list[str]:
        return [str(x) for x in self.entries()]

    @classmethod
    def from_strings(cls, entries: Sequence[str]) -> "RatMatrix2":
        return cls(*(Fraction(str(x)) for x in entries))

    def __repr__(self):
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


S_MATRIX = RatMatrix2.of([[0, -1], [1, 0]])


def translation(n: int) -> RatMatrix2:
    return RatMatrix2.of([[1, n], [0, 1]])


def act(g: RatMatrix2, x: Any) -> Any:
    """Moebius image ``(a x + b) / (c x + d)``; returns INFINITY on a pole."""
    if _is_zero(g.det()):
        raise SingularMatrix("det(g) = 0")
    if x is INFINITY:
        if _is_zero(g.c):
            return INFINITY
        return g.a / g.c
    if isinstance(x, RationalFunction) and not isinstance(g.a, RationalFunction):
        num = x * g.a + g.b
        den = x * g.c + g.d
    else:
        num = g.a * x + g.b
        den = g.c * x + g.d
    if _is_zero(den):
        return INFINITY
    return num / den


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimitiveForm:
    scale: Fraction
    matrix: tuple[int, int, int, int]
    level: int

    @property
    def index(self) -> int:
        """|det| of the primitive integral representative."""
        return abs(self.level)

    def as_matrix(self) -> RatMatrix2:
        return RatMatrix2(*(Fraction(v) for v in self.matrix))


def primitive_form(g: RatMatrix2) -> PrimitiveForm:
    """Positive rational multiple of ``g`` that is integral with coprime entries."""
    ents = [Fraction(v) for v in g.entries()]
    if ents[0] * ents[3] - ents[1] * ents[2] == 0:
        raise SingularMatrix("det(g) = 0")
    lcm = 1
    for v in ents:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in ents]
    g0 = 0
    for v in ints:
        g0 = math.gcd(g0, v)
    scale = Fraction(lcm, g0)
    m = tuple(v // g0 for v in ints)
    return PrimitiveForm(scale, m, m[0] * m[3] - m[1] * m[2])


def special_point_equation(g: RatMatrix2) -> tuple[Any, Any, Any]:
    """Coefficients of ``c x^2 + (d - a) x - b``, whose roots are the fixed points."""
    if g.is_scalar():
        raise ScalarMatrix("every point is fixed by a scalar matrix")
    return (g.c, g.d - g.a, -g.b)


def fixed_points(g: RatMatrix2) -> list[complex]:
    """Finite fixed points of a rational matrix, as complex numbers."""
    import cmath

    A, B, C = (complex(Fraction(v)) for v in special_point_equation(g))
    if A == 0:
        return [] if B == 0 else [-C / B]
    disc = cmath.sqrt(B * B - 4 * A * C)
    return [(-B + disc) / (2 * A), (-B - disc) / (2 * A)]


# ---------------------------------------------------------------------------
# Orbit decisions


@dataclass(frozen=True)
class Dependent:
    witness: RatMatrix2


@dataclass(frozen=True)
class Independent:
    pass


@dataclass(frozen=True)
class IndependentUpTo:
    height: int


def _as_rf(x: Any, variables: Sequence[str] | None = None) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, MultiPoly):
        return RationalFunction(x)
    return RationalFunction.constant(Fraction(x), tuple(variables or ()))


def _split_by_free(p: MultiPoly, base_vars: Sequence[str]) -> dict[tuple[int, ...], MultiPoly]:
    """Group terms of ``p`` by the exponents of the non-base variables."""
    base_idx = [i for i, v in enumerate(p.variables) if v in base_vars]
    free_idx = [i for i, v in enumerate(p.variables) if v not in base_vars]
    bvars = tuple(p.variables[i] for i in base_idx)
    out: dict[tuple[int, ...], dict] = {}
    for e, c in p.terms.items():
        key = tuple(e[i] for i in free_idx)
        out.setdefault(key, {})[tuple(e[i] for i in base_idx)] = c
    return {k: MultiPoly(bvars, t) for k, t in out.items()}


def orbit_decide_exact(x: Any, y: Any, base_vars: Sequence[str] = ()) -> Dependent | Independent:
    """Decide whether ``y = g x`` for some g in GL2(F), F = Q(base_vars).

    The relation ``y (c x + d) = a x + b`` is linear in (a, b, c, d); after
    clearing denominators, comparing coefficients of monomials in the
    non-base variables gives a linear system over F.  The returned witness
    satisfies ``act(witness, x) == y``.
    """
    base_vars = tuple(base_vars)
    # internally solve x = g y with the roles swapped
    x, y = _as_rf(y), _as_rf(x)
    x, y = x._coerce(y)
    for name, p in (("x", x), ("y", y)):
        if all(v in base_vars for v in p.used_variables()):
            raise ConstantInput(f"{name} lies in the base field")
    xn, xd, yn, yd = x.num, x.den, y.num, y.den
    cols = [yn * xd, yd * xd, -(xn * yn), -(xn * yd)]
    splits = [_split_by_free(c, base_vars) for c in cols]
    keys = sorted(set().union(*splits))
    if not base_vars:
        rows = [[s[k].constant_value() if k in s else Fraction(0) for s in splits] for k in keys]
        basis = nullspace(rows, 4)
    else:
        bvars = tuple(v for v in x.variables if v in base_vars)
        zero = RationalFunction.constant(0, bvars)
        one = RationalFunction.constant(1, bvars)
        rows = [[RationalFunction(s[k].extend(bvars)) if k in s else zero for s in splits] for k in keys]
        basis = nullspace(rows, 4, zero=zero, one=one, is_zero=lambda r: r.is_zero())
    for v in basis:
        g = RatMatrix2(*_clear_denominators(v, base_vars))
        if not _is_zero(g.det()):
            return Dependent(g)
    return Independent()


def _clear_denominators(v: Sequence[Any], base_vars: Sequence[str]) -> list[Any]:
    if not base_vars:
        lcm = 1
        for e in v:
            lcm = lcm * e.denominator // math.gcd(lcm, e.denominator)
        ints = [int(e * lcm) for e in v]
        g = 0
        for e in ints:
            g = math.gcd(g, e)
        return [Fraction(e // g) for e in ints]
    # over Q(base) the kernel vector is already a valid witness; entries stay
    # rational functions of the base variables
    return list(v)


@lru_cache(maxsize=None)
def primitive_integer_matrices(height: int) -> tuple[tuple[int, int, int, int], ...]:
    """Primitive invertible integer matrices with entries in [-H, H], one per
    sign class, ordered by height then lexicographically."""
    rng = range(-height, height + 1)
    out = []
    for m in itertools.product(rng, repeat=4):
        a, b, c, d = m
        if a * d - b * c == 0:
            continue
        first = next(v for v in m if v)
        if first < 0:
            continue
        if math.gcd(math.gcd(a, b), math.gcd(c, d)) != 1:
            continue
        out.append(m)
    out.sort(key=lambda m: (max(abs(v) for v in m), m))
    return tuple(out)


def orbit_decide_numeric(x: complex, y: complex, height: int, tol: float = 1e-9) -> Dependent | IndependentUpTo:
    """Bounded search for an integer g with ``|g x - y| < tol`` (so that
    ``act(witness, x)`` approximates ``y``)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    x, y = complex(x), complex(y)
    for a, b, c, d in primitive_integer_matrices(height):
        den = c * x + d
        if den == 0:
            continue
        if abs((a * x + b) / den - y) < tol:
            return Dependent(RatMatrix2.of([[a, b], [c, d]]))
    return IndependentUpTo(height)


# ---------------------------------------------------------------------------
# SL2(Z) reduction


@dataclass(frozen=True)
class Reduction:
    tau0: complex
    matrix: RatMatrix2
    word: str


def in_fundamental_domain(tau: complex, eps: float = 1e-12) -> bool:
    """Membership in {-1/2 <= x <= 0, |z| >= 1} U {0 < x < 1/2, |z| > 1}."""
    x, r = tau.real, abs(tau)
    if tau.imag <= 0:
        return False
    if -0.5 - eps <= x <= 0:
        return r >= 1 - eps
    if 0 < x < 0.5:
        return r > 1 + eps
    return False


def reduce_to_fundamental_domain(tau: complex, eps: float = 1e-12, max_steps: int = 10_000) -> Reduction:
    """Move ``tau`` into the fundamental domain by T-translations and S."""
    tau = complex(tau)
    if not tau.imag > 0:
        raise NotInUpperHalfPlane(f"Im(tau) = {tau.imag} <= 0")
    a, b, c, d = 1, 0, 0, 1
    word: list[tuple[str, int]] = []

    def push(sym, k):
        if word and word[-1][0] == sym:
            k += word.pop()[1]
            if sym == "S":
                k %= 2
            if k == 0:
                return
        word.append((sym, k))

    for _ in range(max_steps):
        n = math.floor(tau.real + 0.5)
        if n:
            tau -= n
            a, b = a - n * c, b - n * d
            push("T", -n)
        if abs(tau) ** 2 < 1 - eps:
            tau = -1 / tau
            a, b, c, d = -c, -d, a, b
            push("S", 1)
            continue
        break
    else:  # pragma: no cover - unreachable for Im(tau) > 0
        raise RuntimeError("reduction did not terminate")
    if abs(abs(tau) - 1) <= eps and tau.real > 0:
        tau = complex(-tau.real, tau.imag)
        a, b, c, d = -c, -d, a, b
        push("S", 1)
    if tau.real >= 0.5:
        tau -= 1
        a, b = a - c, b - d
        push("T", -1)
    if a < 0 or (a == 0 and c < 0):
        a, b, c, d = -a, -b, -c, -d
    text = " ".join("S" if s == "S" else f"T^{k}" for s, k in reversed(word)) or "I"
    return Reduction(tau, RatMatrix2.of([[a, b], [c, d]]), text)
