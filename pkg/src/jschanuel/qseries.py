"""Truncated Laurent series in q, the q-expansion of j, and the third-order
differential equation satisfied by j written with theta = q d/dq.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Sequence

from .exactnum import MultiPoly


class DivisionByZeroSeries(ZeroDivisionError):
    pass


class SingularLocus(ValueError):
    pass


def _is_zero(c: Any) -> bool:
    return not c


class LaurentSeries:
    """``sum_{n >= valuation} c_n q^n`` known through ``q^precision``.

    Coefficients are any ring elements supporting ``+``, ``*`` and truth
    testing (ints, Fractions, :class:`CycloCoeff`).  A series that is zero
    through its precision has no stored coefficients and valuation
    ``precision + 1``.
    """

    __slots__ = ("valuation", "coeffs", "precision")

    def __init__(self, valuation: int, coeffs: Sequence[Any], precision: int):
        coeffs = list(coeffs[: max(0, precision - valuation + 1)])
        k = 0
        while k < len(coeffs) and _is_zero(coeffs[k]):
            k += 1
        coeffs = coeffs[k:]
        valuation += k
        if not coeffs:
            valuation = precision + 1
        self.valuation = valuation
        self.coeffs = tuple(coeffs)
        self.precision = precision

    # -- construction -------------------------------------------------------
    @classmethod
    def monomial(cls, n: int, coeff: Any, precision: int) -> "LaurentSeries":
        return cls(n, [coeff], precision)

    @classmethod
    def zero(cls, precision: int) -> "LaurentSeries":
        return cls(precision + 1, [], precision)

    # -- access -------------------------------------------------------------
    def __getitem__(self, n: int) -> Any:
        if n > self.precision:
            raise IndexError(f"coefficient of q^{n} is beyond precision {self.precision}")
        k = n - self.valuation
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Any:
        if not self.coeffs:
            raise DivisionByZeroSeries("series is zero through its precision")
        return self.coeffs[0]

    def items(self):
        for k, c in enumerate(self.coeffs):
            yield self.valuation + k, c

    def truncate(self, precision: int) -> "LaurentSeries":
        if precision > self.precision:
            raise ValueError("cannot raise precision by truncation")
        return LaurentSeries(self.valuation, self.coeffs, precision)

    def map(self, f: Callable[[Any], Any]) -> "LaurentSeries":
        return LaurentSeries(self.valuation, [f(c) for c in self.coeffs], self.precision)

    # -- ring operations -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            other = LaurentSeries(0, [other], self.precision)
        prec = min(self.precision, other.precision)
        v = min(self.valuation, other.valuation)
        out = [0] * max(0, prec - v + 1)
        for n, c in self.items():
            if n <= prec:
                out[n - v] = out[n - v] + c
        for n, c in other.items():
            if n <= prec:
                out[n - v] = out[n - v] + c
        return LaurentSeries(v, out, prec)

    __radd__ = __add__

    def __neg__(self):
        return self.map(lambda c: -c)

    def __sub__(self, other):
        return self + (-other if isinstance(other, LaurentSeries) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            return self.map(lambda c: c * other)
        v = self.valuation + other.valuation
        prec = min(self.precision + other.valuation, other.precision + self.valuation)
        if self.is_zero() or other.is_zero():
            return LaurentSeries.zero(prec)
        n = prec - v + 1
        if n <= 0:
            return LaurentSeries.zero(prec)
        return LaurentSeries(v, _convolve(self.coeffs, other.coeffs, n), prec)

    def __rmul__(self, other):
        return self.map(lambda c: other * c)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        if result is None:
            return LaurentSeries(0, [1], self.precision - self.valuation)
        return result

    def inverse(self) -> "LaurentSeries":
        lead = self.leading()
        v = self.valuation
        prec = self.precision - 2 * v
        n = prec + v + 1  # number of coefficients of 1/self from q^{-v}
        if n <= 0:
            return LaurentSeries.zero(prec)
        inv_lead = _unit_inverse(lead)
        a = self.coeffs
        out = [inv_lead]
        for k in range(1, n):
            s = 0
            for i in range(1, min(k, len(a) - 1) + 1):
                s = s + a[i] * out[k - i]
            out.append(-(s * inv_lead) if s else 0 * inv_lead)
        return LaurentSeries(-v, out, prec)

    def __truediv__(self, other):
        if isinstance(other, LaurentSeries):
            return self * other.inverse()
        return self.map(lambda c: c / other)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (self.valuation, self.coeffs, self.precision) == (other.valuation, other.coeffs, other.precision)

    __hash__ = None

    def substitute_power(self, k: int) -> "LaurentSeries":
        """The series in ``q^k`` (k >= 1)."""
        out = []
        for i, c in enumerate(self.coeffs):
            if i:
                out.extend([0] * (k - 1))
            out.append(c)
        return LaurentSeries(self.valuation * k, out, self.precision * k + (k - 1))

    def to_json(self) -> dict:
        return {
            "valuation": self.valuation,
            "precision": self.precision,
            "coeffs": [str(Fraction(c)) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data) -> "LaurentSeries":
        return cls(int(data["valuation"]), [Fraction(c) for c in data["coeffs"]], int(data["precision"]))

    def __repr__(self):
        terms = ", ".join(f"{c}q^{n}" for n, c in list(self.items())[:6])
        return f"LaurentSeries({terms}{', ...' if len(self.coeffs) > 6 else ''}; O(q^{self.precision + 1}))"


def _unit_inverse(c: Any) -> Any:
    if isinstance(c, int):
        if c in (1, -1):
            return c
        return Fraction(1, c)
    if isinstance(c, Fraction):
        return 1 / c
    # ring elements that are units only when they equal +-1
    if c == 1:
        return c
    if c == -1:
        return c
    raise DivisionByZeroSeries(f"leading coefficient {c!r} is not invertible here")


def _convolve(a: Sequence[Any], b: Sequence[Any], n: int) -> list:
    if all(type(x) is int for x in a) and all(type(x) is int for x in b):
        return int_mul_trunc(a, b, n)
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if not x:
            continue
        for j, y in enumerate(b[: n - i]):
            out[i + j] = out[i + j] + x * y
    return out


def int_mul_trunc(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """First ``n`` coefficients of the product of two integer polynomials.

    Uses Kronecker substitution: both inputs are packed into a single big
    integer, multiplied once, and unpacked with signed digits.
    """
    a = list(a[:n])
    b = list(b[:n])
    if not a or not b:
        return [0] * n
    bound = max(abs(x) for x in a) * max(abs(x) for x in b) * min(len(a), len(b))
    if bound == 0:
        return [0] * n
    nbytes = (bound.bit_length() + 2 + 7) // 8
    x = _pack(a, nbytes) * _pack(b, nbytes)
    k = 8 * nbytes
    half = 1 << (k - 1)
    offset = int.from_bytes(half.to_bytes(nbytes, "little") * n, "little")
    y = (x + offset) & ((1 << (k * n)) - 1)
    raw = y.to_bytes(nbytes * n, "little")
    return [int.from_bytes(raw[i * nbytes : (i + 1) * nbytes], "little") - half for i in range(n)]


def _pack(a: Sequence[int], nbytes: int) -> int:
    """sum a_i 2^(8 nbytes i) for signed a_i, via two unsigned byte strings."""
    pos = b"".join((c if c > 0 else 0).to_bytes(nbytes, "little") for c in a)
    neg = b"".join((-c if c < 0 else 0).to_bytes(nbytes, "little") for c in a)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


# ---------------------------------------------------------------------------
# Eisenstein series and j


def divisor_power_sums(k: int, m: int) -> list[int]:
    """sigma_k(n) for n = 0..m (sigma_k(0) = 0), by a sieve."""
    s = [0] * (m + 1)
    for d in range(1, m + 1):
        dk = d ** k
        for n in range(d, m + 1, d):
            s[n] += dk
    return s


def eisenstein_e4(m: int) -> LaurentSeries:
    s = divisor_power_sums(3, m)
    return LaurentSeries(0, [1] + [240 * x for x in s[1:]], m)


def eisenstein_e6(m: int) -> LaurentSeries:
    s = divisor_power_sums(5, m)
    return LaurentSeries(0, [1] + [-504 * x for x in s[1:]], m)


@lru_cache(maxsize=8)
def _j_int_coeffs(m: int) -> tuple[int, ...]:
    """Integer coefficients c(-1), c(0), ..., c(m) of j."""
    p = m + 2
    s3 = divisor_power_sums(3, p)
    s5 = divisor_power_sums(5, p)
    e4 = [1] + [240 * x for x in s3[1:]]
    e6 = [1] + [-504 * x for x in s5[1:]]
    e4sq = int_mul_trunc(e4, e4, p + 1)
    e4cube = int_mul_trunc(e4sq, e4, p + 1)
    e6sq = int_mul_trunc(e6, e6, p + 1)
    delta = []
    for x, y in zip(e4cube, e6sq):
        q_, r = divmod(x - y, 1728)
        assert r == 0
        delta.append(q_)
    assert delta[0] == 0 and delta[1] == 1
    inv = int_series_inverse(delta[1:], p)  # q / Delta
    return tuple(int_mul_trunc(e4cube, inv, m + 2))


def int_series_inverse(f: Sequence[int], n: int) -> list[int]:
    """First ``n`` coefficients of 1/f for an integer power series with f[0] = 1,
    by Newton iteration g <- g (2 - f g)."""
    if f[0] != 1:
        raise ValueError("leading coefficient must be 1")
    g = [1]
    k = 1
    while k < n:
        k = min(2 * k, n)
        fg = int_mul_trunc(f[:k], g, k)
        corr = [-c for c in fg]
        corr[0] += 2
        g = int_mul_trunc(g, corr, k)
    return g[:n]


def j_series(m: int) -> LaurentSeries:
    """q-expansion of j through q^m: q^-1 + 744 + 196884 q + ..."""
    if m < 0:
        raise ValueError("precision must be >= 0")
    return LaurentSeries(-1, [Fraction(c) for c in _j_int_coeffs(m)], m)


def j_series_int(m: int) -> LaurentSeries:
    """Same as :func:`j_series` with plain int coefficients (fast path)."""
    return LaurentSeries(-1, list(_j_int_coeffs(m)), m)


def theta(s: LaurentSeries) -> LaurentSeries:
    """q d/dq, term by term."""
    return LaurentSeries(s.valuation, [n * c for n, c in s.items()], s.precision)


# ---------------------------------------------------------------------------
# The daleth form


_DALETH_VARS = ("X", "Y", "Z", "W")


class DalethForm:
    """W/Y - 3/2 (Z/Y)^2 + (X^2 - 1968 X + 2654208) / (2 X^2 (X - 1728)^2) Y^2.

    Stored over the common denominator ``2 Y^2 X^2 (X - 1728)^2``.
    """

    def __init__(self):
        X, Y, Z, W = (MultiPoly.var(v, _DALETH_VARS) for v in _DALETH_VARS)
        e = X * X * (X - 1728) ** 2
        self.numerator = 2 * W * Y * e - 3 * Z * Z * e + (X * X - 1968 * X + 2654208) * Y ** 4
        self.denominator = 2 * Y * Y * e

    @staticmethod
    def r_coefficient(x: Any) -> Any:
        return (x * x - 1968 * x + 2654208) / (2 * x * x * (x - 1728) ** 2)

    def __call__(self, x: Any, y: Any, z: Any, w: Any) -> Any:
        """Evaluate on field elements or series, term by term."""
        if isinstance(x, LaurentSeries):
            r = (x * x - 1968 * x + 2654208) * (2 * x * x * (x - 1728) ** 2).inverse()
            yi = y.inverse()
            zy = z * yi
            return w * yi - zy * zy * Fraction(3, 2) + r * y * y
        return sum(self.terms(x, y, z, w))

    def terms(self, x: Any, y: Any, z: Any, w: Any) -> tuple[Any, Any, Any]:
        """The three summands, useful for relative residuals."""
        if _exact(x):
            x, y, z, w = (Fraction(v) for v in (x, y, z, w))
        return (w / y, -Fraction(3, 2) * (z / y) ** 2, self.r_coefficient(x) * y * y)


def _exact(x: Any) -> bool:
    return isinstance(x, (int, Fraction))


DALETH = DalethForm()


def daleth(x, y, z, w):
    return DALETH(x, y, z, w)


def solve_daleth_for_j3(j0: Any, j1: Any, j2: Any) -> Any:
    """The unique j3 making the daleth form vanish."""
    if j1 == 0 or j0 == 0 or j0 == 1728:
        raise SingularLocus("need j1 != 0 and j0 not in {0, 1728}")
    if _exact(j0) and _exact(j1) and _exact(j2):
        j0, j1, j2 = Fraction(j0), Fraction(j1), Fraction(j2)
    return 3 * j2 * j2 / (2 * j1) - DalethForm.r_coefficient(j0) * j1 ** 3


def daleth_series(j: LaurentSeries) -> LaurentSeries:
    t1 = theta(j)
    t2 = theta(t1)
    t3 = theta(t2)
    return DALETH(j, t1, t2, t3)


def verify_modular_ode(m: int, j: LaurentSeries | None = None) -> LaurentSeries:
    """The daleth form of (j, theta j, theta^2 j, theta^3 j) through q^m.

    For the true j this is identically zero.  When ``j`` is supplied (for
    negative controls) it is used as is and must carry enough precision.
    """
    if m < 5:
        raise ValueError("precision must be >= 5")
    if j is not None:
        res = daleth_series(j)
        return res.truncate(min(m, res.precision))
    p = m
    while True:
        res = daleth_series(j_series(p))
        if res.precision >= m:
            return res.truncate(m)
        p += m - res.precision + 1
