"""Exact arithmetic: rationals, multivariate polynomials over Q, rational
functions, bivariate integer polynomials and cyclotomic integers.

Rationals are :class:`fractions.Fraction`; everything else is built on top of
it.  All values are immutable.
"""
from __future__ import annotations

import ast
import math
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Iterable, Mapping, Sequence

Rational = Fraction


def to_rational(x: Any) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Rational")


def rational_to_str(x: Fraction) -> str:
    return str(Fraction(x))


def rational_from_str(s: str) -> Fraction:
    return Fraction(s)


def _glex_key(exps: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    return (sum(exps), exps)


class MultiPoly:
    """Sparse polynomial over Q in an ordered list of named variables.

    Terms are stored as ``{exponent tuple: Fraction}`` with no zero
    coefficients.  Binary operations between polynomials over different
    variable lists first merge the lists (left operand's order first).
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple[int, ...], Any] | None = None):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n:
                raise ValueError(f"exponent {e} does not match arity {n}")
            c = Fraction(c)
            if c:
                clean[e] = clean.get(e, 0) + c
                if not clean[e]:
                    del clean[e]
        self.terms = clean

    # -- construction -----------------------------------------------------
    @classmethod
    def constant(cls, value: Any, variables: Sequence[str] = ()) -> "MultiPoly":
        return cls(variables, {(0,) * len(variables): value})

    @classmethod
    def var(cls, name: str, variables: Sequence[str] | None = None) -> "MultiPoly":
        variables = tuple(variables) if variables is not None else (name,)
        e = tuple(1 if v == name else 0 for v in variables)
        if name not in variables:
            raise ValueError(f"{name!r} not among {variables}")
        return cls(variables, {e: 1})

    def extend(self, variables: Sequence[str]) -> "MultiPoly":
        """Re-express over a superset of the current variables."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        missing = set(self.variables) - set(variables)
        if missing:
            raise ValueError(f"variables {sorted(missing)} would be dropped")
        idx = [variables.index(v) for v in self.variables]
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(variables)
            for i, k in zip(idx, e):
                ne[i] = k
            out[tuple(ne)] = c
        return MultiPoly(variables, out)

    def _coerce(self, other: Any) -> tuple["MultiPoly", "MultiPoly"]:
        if isinstance(other, MultiPoly):
            if other.variables == self.variables:
                return self, other
            merged = self.variables + tuple(v for v in other.variables if v not in self.variables)
            return self.extend(merged), other.extend(merged)
        if isinstance(other, (int, Fraction)):
            return self, MultiPoly.constant(other, self.variables)
        raise TypeError(f"unsupported operand {type(other).__name__}")

    # -- queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * len(self.variables), Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, name: str) -> int:
        i = self.variables.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def used_variables(self) -> tuple[str, ...]:
        used = set()
        for e in self.terms:
            used.update(v for v, k in zip(self.variables, e) if k)
        return tuple(v for v in self.variables if v in used)

    def leading(self) -> tuple[tuple[int, ...], Fraction]:
        """Leading (exponent, coefficient) in graded lexicographic order."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_glex_key)
        return e, self.terms[e]

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return sorted(self.terms.items(), key=lambda t: _glex_key(t[0]))

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        try:
            a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(a.terms)
        for e, c in b.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(a.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        try:
            a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return MultiPoly(self.variables, {e: c * other for e, c in self.terms.items()})
        try:
            a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(a.variables, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = MultiPoly.constant(1, self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return RationalFunction(self, other)

    def __rtruediv__(self, other):
        return RationalFunction(MultiPoly.constant(other, self.variables), self)

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return other == self
        try:
            a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        return a.terms == b.terms

    __hash__ = None

    # -- calculus / evaluation ------------------------------------------
    def diff(self, name: str) -> "MultiPoly":
        if name not in self.variables:
            return MultiPoly(self.variables)
        i = self.variables.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return MultiPoly(self.variables, out)

    def derive(self, images: Mapping[str, "MultiPoly"]) -> "MultiPoly":
        """Apply the derivation sending each variable ``v`` to ``images[v]``.

        Variables missing from ``images`` are treated as constants.
        """
        result = MultiPoly(self.variables)
        for v in self.used_variables():
            if v in images:
                result = result + self.diff(v) * images[v]
        return result

    def evaluate(self, values: Mapping[str, Any], one: Any = 1) -> Any:
        """Substitute ``values`` (any ring elements) for all used variables."""
        used = self.used_variables()
        missing = [v for v in used if v not in values]
        if missing:
            raise KeyError(f"no value for {missing}")
        idx = [self.variables.index(v) for v in used]
        powers: dict[tuple[int, int], Any] = {}

        def pw(i, k):
            key = (i, k)
            if key not in powers:
                base = values[self.variables[i]]
                powers[key] = base if k == 1 else pw(i, k - 1) * base
            return powers[key]

        total = None
        for e, c in self.terms.items():
            term = None
            for i in idx:
                if e[i]:
                    p = pw(i, e[i])
                    term = p if term is None else term * p
            term = _scale(c, one) if term is None else _scale_mul(c, term)
            total = term if total is None else total + term
        if total is None:
            return _scale(Fraction(0), one)
        return total

    def substitute(self, values: Mapping[str, Any]) -> Any:
        """Partial substitution; remaining variables stay symbolic."""
        full = {v: values[v] if v in values else MultiPoly.var(v, self.variables) for v in self.variables}
        return self.evaluate(full, one=MultiPoly.constant(1, self.variables))

    def content(self) -> Fraction:
        """Positive rational g with ``self / g`` primitive with integer coefficients."""
        if not self.terms:
            return Fraction(1)
        num = 0
        den = 1
        for c in self.terms.values():
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den)

    # -- univariate helpers ----------------------------------------------
    def _univariate(self) -> list[Fraction]:
        if len(self.variables) != 1:
            raise ValueError("not univariate")
        deg = self.total_degree()
        coeffs = [Fraction(0)] * (deg + 1)
        for (k,), c in self.terms.items():
            coeffs[k] = c
        return coeffs

    @classmethod
    def _from_univariate(cls, coeffs: Sequence[Fraction], variables: Sequence[str]) -> "MultiPoly":
        return cls(variables, {(k,): c for k, c in enumerate(coeffs) if c})

    # -- serialization ----------------------------------------------------
    def to_records(self) -> list[list]:
        return [list(e) + [rational_to_str(c)] for e, c in self.sorted_terms()]

    @classmethod
    def from_records(cls, variables: Sequence[str], records: Iterable[Sequence]) -> "MultiPoly":
        return cls(variables, {tuple(int(x) for x in r[:-1]): Fraction(str(r[-1])) for r in records})

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in reversed(self.sorted_terms()):
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _scale(c: Fraction, one: Any) -> Any:
    if isinstance(one, int):
        return c * one
    return _scale_mul(c, one)


def _scale_mul(c: Fraction, term: Any) -> Any:
    if c == 1:
        return term
    if isinstance(term, (int, Fraction, complex, float, MultiPoly, RationalFunction)):
        return term * c
    # foreign numeric types (mpmath) may not accept Fraction directly
    if c.denominator == 1:
        return term * c.numerator
    return term * c.numerator / c.denominator


def _univ_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = list(a)
    while b and not b[-1]:
        b = b[:-1]
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and any(a):
        while a and not a[-1]:
            a.pop()
        if len(a) < len(b):
            break
        shift = len(a) - len(b)
        f = a[-1] / lead
        q[shift] = f
        for i, c in enumerate(b):
            a[i + shift] -= f * c
        a.pop()
    while a and not a[-1]:
        a.pop()
    return q, a


def _univ_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    while b and any(b):
        _, r = _univ_divmod(a, b)
        a, b = b, r
    while a and not a[-1]:
        a = a[:-1]
    if not a:
        return [Fraction(1)]
    return [c / a[-1] for c in a]


class RationalFunction:
    """Quotient of two :class:`MultiPoly` over the same variables.

    Univariate fractions are reduced by the polynomial gcd; with two or more
    variables only the scalar content is normalized.  Either way the leading
    (graded lex) denominator coefficient is 1, and equality is decided by
    cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Any, den: Any = 1):
        if not isinstance(num, MultiPoly):
            if isinstance(den, MultiPoly):
                num = MultiPoly.constant(num, den.variables)
            else:
                num = MultiPoly.constant(num)
        if not isinstance(den, MultiPoly):
            den = MultiPoly.constant(den, num.variables)
        num, den = num._coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if len(num.variables) == 1 and not num.is_zero():
            g = _univ_gcd(num._univariate(), den._univariate())
            if len(g) > 1:
                qn, _ = _univ_divmod(num._univariate(), g)
                qd, _ = _univ_divmod(den._univariate(), g)
                num = MultiPoly._from_univariate(qn, num.variables)
                den = MultiPoly._from_univariate(qd, den.variables)
        if num.is_zero():
            den = MultiPoly.constant(1, num.variables)
        _, lc = den.leading()
        if lc != 1:
            num, den = num * (1 / lc), den * (1 / lc)
        self.num = num
        self.den = den

    @property
    def variables(self) -> tuple[str, ...]:
        return self.num.variables

    @classmethod
    def var(cls, name: str, variables: Sequence[str] | None = None) -> "RationalFunction":
        return cls(MultiPoly.var(name, variables))

    @classmethod
    def constant(cls, value: Any, variables: Sequence[str] = ()) -> "RationalFunction":
        return cls(MultiPoly.constant(value, variables))

    def _coerce(self, other: Any) -> tuple["RationalFunction", "RationalFunction"]:
        if isinstance(other, RationalFunction):
            a_num, b_num = self.num._coerce(other.num)
            vs = a_num.variables
            return (
                RationalFunction(self.num.extend(vs), self.den.extend(vs)),
                RationalFunction(other.num.extend(vs), other.den.extend(vs)),
            )
        if isinstance(other, MultiPoly):
            return self._coerce(RationalFunction(other))
        if isinstance(other, (int, Fraction)):
            return self, RationalFunction(MultiPoly.constant(other, self.variables))
        raise TypeError(f"unsupported operand {type(other).__name__}")

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return self.num.constant_value() / self.den.constant_value()

    def used_variables(self) -> tuple[str, ...]:
        used = set(self.num.used_variables()) | set(self.den.used_variables())
        return tuple(v for v in self.variables if v in used)

    def __add__(self, other):
        try:
            a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        if a.den == b.den:
            return RationalFunction(a.num + b.num, a.den)
        return RationalFunction(a.num * b.den + b.num * a.den, a.den * b.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        try:
            a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        return RationalFunction(a.num * b.num, a.den * b.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        if b.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(a.num * b.den, a.den * b.num)

    def __rtruediv__(self, other):
        a, b = self._coerce(other)
        return b / a

    def __pow__(self, k: int):
        if k < 0:
            return RationalFunction(self.den ** (-k), self.num ** (-k))
        return RationalFunction(self.num ** k, self.den ** k)

    def __eq__(self, other):
        try:
            a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        return rational_function_equal(a, b)

    __hash__ = None

    def diff(self, name: str) -> "RationalFunction":
        return RationalFunction(
            self.num.diff(name) * self.den - self.num * self.den.diff(name), self.den * self.den
        )

    def evaluate(self, values: Mapping[str, Any], one: Any = 1) -> Any:
        d = self.den.evaluate(values, one)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the given point")
        return self.num.evaluate(values, one) / d

    def to_json(self) -> dict:
        return {"variables": list(self.variables), "num": self.num.to_records(), "den": self.den.to_records()}

    @classmethod
    def from_json(cls, data: Mapping) -> "RationalFunction":
        vs = data["variables"]
        return cls(MultiPoly.from_records(vs, data["num"]), MultiPoly.from_records(vs, data["den"]))

    def __repr__(self):
        return f"RationalFunction({self})"

    def __str__(self):
        if self.den.is_constant() and self.den.constant_value() == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"


def rational_function_equal(a: RationalFunction, b: RationalFunction) -> bool:
    """True iff ``a.num * b.den == b.num * a.den``."""
    an, bn = a.num._coerce(b.num)
    vs = an.variables
    return (a.num.extend(vs) * b.den.extend(vs)).terms == (b.num.extend(vs) * a.den.extend(vs)).terms


def poly_coefficient_split(g: Sequence[Sequence[MultiPoly]]) -> list[tuple[tuple[int, ...], "Any"]]:
    """Split a 2x2 matrix of polynomials into constant coefficient matrices.

    Returns ``[(multi_index, RatMatrix2)]`` sorted in graded lex order, one
    entry per monomial that occurs in some entry, so that
    ``sum(g_i * x**i) == g``.
    """
    from .moebius import RatMatrix2

    entries = [g[0][0], g[0][1], g[1][0], g[1][1]]
    entries = [e if isinstance(e, MultiPoly) else MultiPoly.constant(e) for e in entries]
    variables: tuple[str, ...] = ()
    for e in entries:
        variables = variables + tuple(v for v in e.variables if v not in variables)
    entries = [e.extend(variables) for e in entries]
    monos = sorted({m for e in entries for m in e.terms}, key=_glex_key)
    out = []
    for m in monos:
        a, b, c, d = (e.terms.get(m, Fraction(0)) for e in entries)
        out.append((m, RatMatrix2(a, b, c, d)))
    return out


def reassemble(split: Sequence[tuple[tuple[int, ...], Any]], variables: Sequence[str]) -> list[list[MultiPoly]]:
    out = [[MultiPoly(variables), MultiPoly(variables)], [MultiPoly(variables), MultiPoly(variables)]]
    for m, g in split:
        mono = MultiPoly(variables, {tuple(m): 1})
        out[0][0] += mono * g.a
        out[0][1] += mono * g.b
        out[1][0] += mono * g.c
        out[1][1] += mono * g.d
    return out


# ---------------------------------------------------------------------------
# Expression parsing (used by the CLI and JSON readers)

_BINOPS = {ast.Add: "__add__", ast.Sub: "__sub__", ast.Mult: "__mul__", ast.Div: "__truediv__"}


def parse_expression(text: str, variables: Sequence[str]) -> RationalFunction:
    """Parse an arithmetic expression over ``variables`` into a RationalFunction.

    Accepts ``+ - * / **`` (``^`` is read as power), integer and decimal
    literals and parentheses.
    """
    variables = tuple(variables)
    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return RationalFunction.constant(Fraction(str(node.value)), variables)
        if isinstance(node, ast.Name):
            if node.id not in variables:
                raise ValueError(f"unknown variable {node.id!r}")
            return RationalFunction.var(node.id, variables)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                exp = node.right
                if isinstance(exp, ast.UnaryOp) and isinstance(exp.op, ast.USub):
                    k = -int(exp.operand.value)
                elif isinstance(exp, ast.Constant) and isinstance(exp.value, int):
                    k = exp.value
                else:
                    raise ValueError("only integer powers are supported")
                return walk(node.left) ** k
            op = _BINOPS.get(type(node.op))
            if op is None:
                raise ValueError(f"unsupported operator {type(node.op).__name__}")
            return getattr(walk(node.left), op)(walk(node.right))
        raise ValueError(f"unsupported syntax: {ast.dump(node)}")

    return walk(tree)


# ---------------------------------------------------------------------------
# Bivariate integer polynomials


class IntPoly2:
    """Polynomial in Z[X, Y] stored as ``{(degX, degY): int}``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[tuple[int, int], int]):
        self.coeffs = {(int(i), int(j)): int(c) for (i, j), c in coeffs.items() if c}

    def degree_x(self) -> int:
        return max((i for i, _ in self.coeffs), default=-1)

    def degree_y(self) -> int:
        return max((j for _, j in self.coeffs), default=-1)

    def transpose(self) -> "IntPoly2":
        return IntPoly2({(j, i): c for (i, j), c in self.coeffs.items()})

    def is_symmetric(self) -> bool:
        return self.coeffs == self.transpose().coeffs

    def partial_x(self) -> "IntPoly2":
        return IntPoly2({(i - 1, j): i * c for (i, j), c in self.coeffs.items() if i})

    def partial_y(self) -> "IntPoly2":
        return IntPoly2({(i, j - 1): j * c for (i, j), c in self.coeffs.items() if j})

    def partial(self, a: int, b: int) -> "IntPoly2":
        p = self
        for _ in range(a):
            p = p.partial_x()
        for _ in range(b):
            p = p.partial_y()
        return p

    def evaluate(self, x: Any, y: Any) -> Any:
        """Horner evaluation; works for any ring supporting + and *."""
        if not self.coeffs:
            return 0 * x
        dx = self.degree_x()
        rows: list[dict[int, int]] = [dict() for _ in range(dx + 1)]
        for (i, j), c in self.coeffs.items():
            rows[i][j] = c
        acc = None
        for i in range(dx, -1, -1):
            row = rows[i]
            inner = None
            if row:
                for j in range(max(row), -1, -1):
                    c = row.get(j, 0)
                    inner = (c if inner is None else inner * y + c)
            else:
                inner = 0
            acc = inner if acc is None else acc * x + inner
        return acc

    def abs_evaluate(self, x: complex, y: complex) -> float:
        """Sum of absolute values of the terms, a scale for relative residuals."""
        ax, ay = abs(x), abs(y)
        return float(sum(abs(c) * ax ** i * ay ** j for (i, j), c in self.coeffs.items()))

    def to_multipoly(self, xname: str = "X", yname: str = "Y") -> MultiPoly:
        return MultiPoly((xname, yname), {(i, j): c for (i, j), c in self.coeffs.items()})

    def to_records(self) -> list[list]:
        return [[i, j, str(c)] for (i, j), c in sorted(self.coeffs.items())]

    @classmethod
    def from_records(cls, records: Iterable[Sequence]) -> "IntPoly2":
        return cls({(int(r[0]), int(r[1])): int(r[2]) for r in records})

    def __eq__(self, other):
        if not isinstance(other, IntPoly2):
            return NotImplemented
        return self.coeffs == other.coeffs

    __hash__ = None

    def __repr__(self):
        return f"IntPoly2({str(self.to_multipoly())})"


# ---------------------------------------------------------------------------
# Cyclotomic integers


def _int_poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _int_poly_divexact(a: Sequence[int], b: Sequence[int]) -> list[int]:
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    for k in range(len(q) - 1, -1, -1):
        coef, rem = divmod(a[k + len(b) - 1], b[-1])
        if rem:
            raise ArithmeticError("inexact integer polynomial division")
        q[k] = coef
        for i, c in enumerate(b):
            a[k + i] -= coef * c
    if any(a):
        raise ArithmeticError("inexact integer polynomial division")
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("n must be positive")
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _int_poly_divexact(num, cyclotomic_polynomial(d))
    return tuple(num)


def euler_phi(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


def reduce_mod_cyclotomic(coeffs: Sequence[int], n: int) -> tuple[int, ...]:
    """Reduce an integer polynomial in zeta modulo Phi_n (monic)."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    a = list(coeffs)
    for k in range(len(a) - 1, deg - 1, -1):
        c = a[k]
        if c:
            for i in range(deg + 1):
                a[k - deg + i] -= c * phi[i]
    a = a[:deg] + [0] * max(0, deg - len(a))
    return tuple(a)


class CycloCoeff:
    """Element of Z[zeta_N], stored as a residue modulo the N-th cyclotomic polynomial."""

    __slots__ = ("order", "residue")

    def __init__(self, order: int, coeffs: Sequence[int] = ()):
        self.order = int(order)
        self.residue = reduce_mod_cyclotomic([int(c) for c in coeffs], self.order)

    @classmethod
    def zeta_power(cls, order: int, k: int, scale: int = 1) -> "CycloCoeff":
        k %= order
        coeffs = [0] * (k + 1)
        coeffs[k] = scale
        return cls(order, coeffs)

    @classmethod
    def from_int(cls, order: int, value: int) -> "CycloCoeff":
        return cls(order, [value])

    def _other(self, other):
        if isinstance(other, CycloCoeff):
            if other.order != self.order:
                raise ValueError("mismatched cyclotomic orders")
            return other
        if isinstance(other, int):
            return CycloCoeff(self.order, [other])
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return CycloCoeff(self.order, [x + y for x, y in zip(self.residue, o.residue)])

    __radd__ = __add__

    def __neg__(self):
        return CycloCoeff(self.order, [-x for x in self.residue])

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return CycloCoeff(self.order, _int_poly_mul(self.residue, o.residue))

    __rmul__ = __mul__

    def __eq__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self.residue == o.residue

    __hash__ = None

    def __bool__(self):
        return any(self.residue)

    def is_rational(self) -> bool:
        return not any(self.residue[1:])

    def to_int(self) -> int:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not a rational integer")
        return self.residue[0] if self.residue else 0

    def to_complex(self) -> complex:
        import cmath

        z = cmath.exp(2j * cmath.pi / self.order)
        return sum(c * z ** k for k, c in enumerate(self.residue))

    def __repr__(self):
        return f"CycloCoeff({self.order}, {list(self.residue)})"


# ---------------------------------------------------------------------------
# Dense linear algebra over an exact or numeric field


def row_reduce(
    rows: Sequence[Sequence[Any]],
    is_zero: Callable[[Any], bool] = lambda x: x == 0,
    pivot_key: Callable[[Any], float] | None = None,
) -> tuple[list[list[Any]], list[int]]:
    """Reduced row echelon form. Returns (rref rows, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        candidates = [i for i in range(r, len(m)) if not is_zero(m[i][col])]
        if not candidates:
            continue
        if pivot_key is not None:
            best = max(candidates, key=lambda i: pivot_key(m[i][col]))
        else:
            best = candidates[0]
        m[r], m[best] = m[best], m[r]
        inv = 1 / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and not is_zero(m[i][col]):
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence[Any]], **kw) -> int:
    return len(row_reduce(rows, **kw)[1])


def nullspace(rows: Sequence[Sequence[Any]], ncols: int, zero: Any = Fraction(0), one: Any = Fraction(1), **kw) -> list[list[Any]]:
    """Basis of the right kernel ``{v : rows @ v = 0}``."""
    if not rows:
        return [[one if i == j else zero for i in range(ncols)] for j in range(ncols)]
    red, pivots = row_reduce(rows, **kw)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for r, p in enumerate(pivots):
            v[p] = -red[r][f]
        basis.append(v)
    return basis
