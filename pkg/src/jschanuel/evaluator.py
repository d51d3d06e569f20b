"""Numeric j, j', j'', j''' on the upper and lower half planes.

A point is moved into the fundamental domain, the q-series of j and its
theta-derivatives is summed there with mpmath, and the derivatives are
carried back through the SL2(Z) element by the chain rule.  Points in the
lower half plane use Schwarz reflection: j(z) = conj(j(conj(z))).

This is the only module that uses pi and exp.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any

import mpmath

from .exactnum import MultiPoly
from .moebius import reduce_to_fundamental_domain
from .qseries import j_series_int

DEFAULT_DPS = int(os.environ.get("JSCHANUEL_DPS", "40"))
MAX_TERMS = 400
CORNER_RADIUS = 1e-6

# Downstream arithmetic on jets (residuals, relation checks) happens outside
# this module, so the working precision is raised globally, never lowered.
mpmath.mp.dps = max(mpmath.mp.dps, DEFAULT_DPS)


class RealAxisInput(ValueError):
    pass


class SingularCurve(ValueError):
    pass


class DegenerateLambda(ValueError):
    pass


@dataclass(frozen=True)
class JetValue:
    tau: Any
    j0: Any
    j1: Any
    j2: Any
    j3: Any
    error: float
    terms: int
    dps: int
    reduction_word: str = "I"
    near_corner: bool = False

    @property
    def values(self) -> tuple:
        return (self.j0, self.j1, self.j2, self.j3)

    def as_complex(self) -> tuple[complex, complex, complex, complex]:
        return tuple(complex(v) for v in self.values)


# ---------------------------------------------------------------------------
# Chain rule through a Moebius map, generated by the symbolic differentiator

_TRANSPORT_VARS = ("J1", "J2", "J3", "J4", "w1", "w2", "w3", "w4")


@lru_cache(maxsize=None)
def transport_formulas() -> tuple[MultiPoly, MultiPoly, MultiPoly]:
    """j^(k)(tau) in terms of J_k = j^(k)(g tau) and w_k = (d/dtau)^k (g tau).

    Obtained by differentiating j(tau) = J(g tau) with D(J_k) = J_{k+1} w1,
    D(w_k) = w_{k+1}.
    """
    var = lambda s: MultiPoly.var(s, _TRANSPORT_VARS)
    images = {
        "J1": var("J2") * var("w1"), "J2": var("J3") * var("w1"), "J3": var("J4") * var("w1"),
        "w1": var("w2"), "w2": var("w3"), "w3": var("w4"),
    }
    first = var("J1") * var("w1")
    second = first.derive(images)
    third = second.derive(images)
    return first, second, third


def _chain(c: int, d: int, tau: Any) -> tuple[Any, Any, Any]:
    den = c * tau + d
    return (1 / den ** 2, -2 * c / den ** 3, 6 * c * c / den ** 4)


# ---------------------------------------------------------------------------


def _to_mpc(tau: Any) -> mpmath.mpc:
    if isinstance(tau, str):
        re, im = (s.strip() for s in tau.split(","))
        return mpmath.mpc(re, im)
    if isinstance(tau, (tuple, list)):
        return mpmath.mpc(*tau)
    return mpmath.mpc(tau)


def _series_jet(q: mpmath.mpc, terms: int | None, dps: int) -> tuple[list, int, float]:
    """theta^k j at q for k = 0..3 (without the 2 pi i factors)."""
    coeffs = j_series_int(MAX_TERMS).coeffs
    target = mpmath.mpf(10) ** (-(dps + 5))
    aq = abs(q)
    sums = [mpmath.mpc(0)] * 4
    qn = 1 / q
    used = 0
    last = mpmath.mpf(0)
    for idx, c in enumerate(coeffs):
        n = idx - 1
        if terms is not None and n > terms:
            break
        t = c * qn
        sums[0] += t
        sums[1] += n * t
        sums[2] += n * n * t
        sums[3] += n ** 3 * t
        used = n
        last = abs(t) * max(1, abs(n)) ** 3
        if terms is None and n > 2 and last < target * max(1, abs(sums[0])):
            break
        qn *= q
    # tail: later terms shrink at least geometrically once |q| < 1/200
    nxt = abs(coeffs[min(used + 2, len(coeffs) - 1)]) * aq ** (used + 1) * (used + 1) ** 3
    tail = float(nxt) * 2
    return sums, used, tail


def evaluate_jet(tau: Any, terms: int | None = None, dps: int | None = None) -> JetValue:
    """(j, j', j'', j''') at tau, derivatives with respect to tau."""
    dps = dps or DEFAULT_DPS
    with mpmath.workdps(max(mpmath.mp.dps, dps) + 10):
        z = _to_mpc(tau)
        if z.imag == 0:
            raise RealAxisInput("Im(tau) = 0")
        if z.imag < 0:
            up = evaluate_jet(mpmath.conj(z), terms, dps)
            return JetValue(
                z, *(mpmath.conj(v) for v in up.values), error=up.error, terms=up.terms,
                dps=dps, reduction_word=up.reduction_word, near_corner=up.near_corner,
            )
        red = reduce_to_fundamental_domain(complex(z))
        a, b, c, d = (int(x) for x in red.matrix.entries())
        z0 = (a * z + b) / (c * z + d)
        q = mpmath.exp(2j * mpmath.pi * z0)
        sums, used, tail = _series_jet(q, terms, dps)
        tpi = 2j * mpmath.pi
        J = [sums[0], tpi * sums[1], tpi ** 2 * sums[2], tpi ** 3 * sums[3]]
        w = _chain(c, d, z)
        vals = {"J1": J[1], "J2": J[2], "J3": J[3], "w1": w[0], "w2": w[1], "w3": w[2]}
        f1, f2, f3 = transport_formulas()
        j1, j2, j3 = (f.evaluate(vals) for f in (f1, f2, f3))
        scale = max(1.0, float(abs(w[0])) ** 3, float(abs(w[1])) ** 2, float(abs(w[2])))
        rounding = float(sum(abs(v) for v in J)) * 10.0 ** (-dps)
        error = (tail * float(abs(tpi)) ** 3 + rounding) * scale
        corner = min(abs(z0 - 1j), abs(z0 - mpmath.exp(2j * mpmath.pi / 3))) < CORNER_RADIUS
        if corner:
            error *= 1e6
        return JetValue(z, +J[0], +j1, +j2, +j3, error=error, terms=used, dps=dps,
                        reduction_word=red.word, near_corner=bool(corner))


def j_value(tau: Any, dps: int | None = None) -> Any:
    return evaluate_jet(tau, dps=dps).j0


def daleth_residual(jet: JetValue) -> tuple[Any, float]:
    """Daleth form at a jet, and the magnitude of its largest summand."""
    from .qseries import DALETH

    t = DALETH.terms(jet.j0, jet.j1, jet.j2, jet.j3)
    return sum(t), float(max(abs(x) for x in t))


# ---------------------------------------------------------------------------
# Algebraic formulas


def weierstrass_j_invariant(a: Any, b: Any) -> Fraction:
    """1728 a^3 / (a^3 - 27 b^2)."""
    a, b = Fraction(a), Fraction(b)
    disc = a ** 3 - 27 * b ** 2
    if disc == 0:
        raise SingularCurve("a^3 - 27 b^2 = 0")
    return 1728 * a ** 3 / disc


def legendre_j(lam: Any) -> Any:
    """2^8 (l^2 - l + 1)^3 / (l^2 (l - 1)^2)."""
    if isinstance(lam, (int, str)):
        lam = Fraction(lam)
    if lam == 0 or lam == 1:
        raise DegenerateLambda("lambda must avoid 0 and 1")
    return 256 * (lam * lam - lam + 1) ** 3 / (lam * lam * (lam - 1) ** 2)
