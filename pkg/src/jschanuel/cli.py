"""Command-line entry point: ``jschanuel <subcommand> ...``, JSON on stdout.

Exit codes: 0 success / PASS, 1 FAIL, 2 usage error, 3 only UNVERIFIED.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNVERIFIED = 0, 1, 2, 3
PRECISION_ENV = "JSCHANUEL_DPS"
DEFAULT_SEED = 20240601


class UsageError(Exception):
    pass


@dataclass
class CommandConfig:
    subcommand: str
    args: argparse.Namespace
    seed: int = DEFAULT_SEED
    output: str | None = None
    env_precision: str | None = field(default_factory=lambda: os.environ.get(PRECISION_ENV))


def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if hasattr(x, "imag") and hasattr(x, "real"):  # mpmath numbers
        c = complex(x)
        return {"re": c.real, "im": c.imag}
    return str(x)


def _emit(cfg: CommandConfig, payload: dict) -> None:
    payload = dict(payload)
    payload["env_precision"] = {"variable": PRECISION_ENV, "value": cfg.env_precision}
    payload["command"] = cfg.subcommand
    text = json.dumps(_jsonable(payload), sort_keys=True, indent=2)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _point(text: str, variables: Sequence[str] = ()) -> Any:
    """"re,im" or a complex literal gives a number; otherwise an expression."""
    from .exactnum import parse_expression

    if "," in text:
        re, im = text.split(",")
        return complex(float(re), float(im))
    if not variables:
        try:
            return complex(text.replace("i", "j"))
        except ValueError:
            pass
    return parse_expression(text, variables)


def _matrix(text: str):
    from .moebius import RatMatrix2

    parts = [p.strip() for p in text.replace(";", ",").split(",")]
    if len(parts) != 4:
        raise UsageError("a matrix is given as a,b,c,d")
    return RatMatrix2(*(Fraction(p) for p in parts))


def _load_presentation(path: str):
    from .derivations import Presentation

    with open(path) as fh:
        return Presentation.from_json(json.load(fh))


def _names(text: str | None) -> list[str]:
    if not text:
        return []
    return [t.strip() for t in text.split(",") if t.strip()]


# ---------------------------------------------------------------------------
# Subcommands


def cmd_modpoly(cfg: CommandConfig) -> int:
    from .modpoly import build_modular_polynomial, psi, verify_series_identity

    a = cfg.args
    phi = build_modular_polynomial(a.N, precision=a.precision)
    payload = {"N": a.N, "coeffs": phi.poly.to_records(), "degree_x": phi.poly.degree_x(),
               "degree_y": phi.poly.degree_y(), "psi": psi(a.N), "symmetric": phi.poly.is_symmetric(),
               "precision": phi.precision}
    if len(phi.poly.coeffs) <= 12:
        payload["polynomial"] = str(phi.poly.to_multipoly())
    status = EXIT_OK
    if a.verify:
        res = verify_series_identity(phi, a.N, a.verify_precision)
        ok = res.is_zero() and (phi.poly.is_symmetric() or a.N == 1) and phi.poly.degree_x() == psi(a.N)
        payload["verify"] = {"series_zero_through": res.precision, "identically_zero": res.is_zero(),
                             "result": "PASS" if ok else "FAIL"}
        status = EXIT_OK if ok else EXIT_FAIL
    _emit(cfg, payload)
    return status


def cmd_verify_ode(cfg: CommandConfig) -> int:
    from .qseries import verify_modular_ode

    m = cfg.args.precision
    res = verify_modular_ode(m)
    ok = res.is_zero()
    nonzero = [[n, str(c)] for n, c in res.items() if c][:5]
    _emit(cfg, {"precision": m, "identically_zero": ok, "first_nonzero": nonzero,
                "result": "PASS" if ok else "FAIL"})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_eval(cfg: CommandConfig) -> int:
    from .evaluator import daleth_residual, evaluate_jet

    a = cfg.args
    jet = evaluate_jet(a.tau, terms=a.terms, dps=a.dps)
    vals = jet.values[: a.derivs + 1]
    payload = {"tau": jet.tau, "values": {f"j{k}": v for k, v in enumerate(vals)}, "error": jet.error,
               "terms": jet.terms, "dps": jet.dps, "reduction_word": jet.reduction_word,
               "near_corner": jet.near_corner}
    if a.derivs >= 3:
        j0, j1 = complex(jet.j0), complex(jet.j1)
        small = 1e-20 * (1 + abs(j0))
        if min(abs(j0), abs(j0 - 1728), abs(j1)) < small:
            payload["daleth_residual"] = None  # j0 in {0, 1728} or j1 = 0: the form has a pole
            payload["singular_locus"] = True
        else:
            res, scale = daleth_residual(jet)
            payload["daleth_residual"] = abs(complex(res)) / scale
            payload["singular_locus"] = False
    _emit(cfg, payload)
    return EXIT_OK


def cmd_reduce(cfg: CommandConfig) -> int:
    from .moebius import reduce_to_fundamental_domain

    tau = _point(cfg.args.tau)
    red = reduce_to_fundamental_domain(complex(tau))
    _emit(cfg, {"tau": tau, "tau0": red.tau0, "matrix": red.matrix.to_strings(), "word": red.word})
    return EXIT_OK


def cmd_orbit(cfg: CommandConfig) -> int:
    from .moebius import Dependent, Independent, orbit_decide_exact, orbit_decide_numeric

    a = cfg.args
    vs = _names(a.vars)
    x, y = _point(a.x, vs), _point(a.y, vs)
    if isinstance(x, complex) != isinstance(y, complex):
        raise UsageError("both points must be numeric or both exact")
    if isinstance(x, complex):
        r = orbit_decide_numeric(x, y, a.height, a.tol)
    else:
        r = orbit_decide_exact(x, y, _names(a.base))
    if isinstance(r, Dependent):
        _emit(cfg, {"result": "Dependent", "witness": r.witness.to_strings(), "convention": "act(witness, x) = y"})
        return EXIT_OK
    if isinstance(r, Independent):
        _emit(cfg, {"result": "Independent"})
        return EXIT_OK
    _emit(cfg, {"result": "IndependentUpTo", "height": r.height})
    return EXIT_UNVERIFIED


def cmd_pregeom(cfg: CommandConfig) -> int:
    from .pregeom import GclConfig, GclOracle, gcl_dimension, pregeometry_property_suite

    a = cfg.args
    if a.action == "props" and a.presentation:
        from .derivations import jcl_oracle

        P = _load_presentation(a.presentation)
        sample = _names(a.points) or list(P.generators)
        rep = pregeometry_property_suite(jcl_oracle(P, cfg.seed), sample, a.max_subset)
        _emit(cfg, {"oracle": "jcl", "seed": cfg.seed, **rep.to_json()})
        return EXIT_OK if rep.all_passed else EXIT_FAIL
    vs = _names(a.vars)
    gcfg = GclConfig(tuple(_names(a.base)), a.height, a.tol)
    pts = {f"x{i}": _point(p, vs) for i, p in enumerate(_names_semicolon(a.points))}
    if a.action == "dim":
        over = {f"b{i}": _point(p, vs) for i, p in enumerate(_names_semicolon(a.over))}
        rep = gcl_dimension(pts, over, gcfg)
        _emit(cfg, {**rep.to_json(), "points": {k: str(v) for k, v in pts.items()}})
        return EXIT_OK if rep.caveat == "exact" else EXIT_UNVERIFIED
    rep = pregeometry_property_suite(GclOracle(pts, gcfg), list(pts), a.max_subset)
    _emit(cfg, {"oracle": "gcl", **rep.to_json()})
    return EXIT_OK if rep.all_passed else EXIT_FAIL


def _names_semicolon(text: str | None) -> list[str]:
    if not text:
        return []
    return [t.strip() for t in text.split(";") if t.strip()]


def cmd_xi_dim(cfg: CommandConfig) -> int:
    from .derivations import analyze

    a = cfg.args
    A = analyze(_load_presentation(a.presentation), cfg.seed)
    C = _names(a.constants) if a.constants is not None else list(A.P.constants)
    _emit(cfg, {"xi_dimension": A.xi_dimension(C), "omega_dimension": A.omega_dimension(C), "C": C,
                "seed": A.seed, "draws": A.draws})
    return EXIT_OK


def cmd_jcl_member(cfg: CommandConfig) -> int:
    from .derivations import analyze, jcl_support

    a = cfg.args
    A = analyze(_load_presentation(a.presentation), cfg.seed)
    C = _names(a.constants)
    member = A.jcl_member(a.element, C)
    _emit(cfg, {"element": a.element, "C": C, "member": member,
                "support": list(jcl_support(A, a.element, C) or []) if member else None, "seed": A.seed})
    return EXIT_OK


def cmd_delta(cfg: CommandConfig) -> int:
    from .derivations import delta

    a = cfg.args
    rep = delta(_load_presentation(a.presentation), _names(a.z), _names(a.over), cfg.seed)
    _emit(cfg, rep.to_json())
    return EXIT_OK


def cmd_schanuel(cfg: CommandConfig) -> int:
    from .derivations import schanuel_report

    a = cfg.args
    rep = schanuel_report(_load_presentation(a.presentation), _names(a.z), _names(a.constants), cfg.seed)
    _emit(cfg, rep.to_json())
    return EXIT_OK if rep.holds else EXIT_FAIL


def cmd_main_report(cfg: CommandConfig) -> int:
    from .derivations import HypothesisUncertified, main_inequality_report

    a = cfg.args
    gs = [[e.strip() for e in g.split(",")] for g in _names_semicolon(a.g)]
    try:
        rep = main_inequality_report(_load_presentation(a.presentation), _names(a.tau), _names(a.z), gs,
                                     a.hypothesis, cfg.seed)
    except HypothesisUncertified as exc:
        _emit(cfg, {"result": "HypothesisUncertified", "reason": str(exc), "seed": cfg.seed})
        return EXIT_UNVERIFIED
    _emit(cfg, rep.to_json())
    return EXIT_OK if rep.holds else EXIT_FAIL


def cmd_essential(cfg: CommandConfig) -> int:
    from .derivations import NotEssential, PreconditionFailed, essential_candidate_check

    a = cfg.args
    try:
        r = essential_candidate_check(_load_presentation(a.presentation), _names(a.z), a.bound, cfg.seed)
    except PreconditionFailed as exc:
        _emit(cfg, {"result": "PreconditionFailed", "reason": str(exc), "seed": cfg.seed})
        return EXIT_FAIL
    if isinstance(r, NotEssential):
        _emit(cfg, {"result": "NotEssential", "witness": list(r.witness), "delta_witness": r.delta_witness,
                    "delta_input": r.delta_input, "seed": cfg.seed})
        return EXIT_OK
    _emit(cfg, {"result": "CandidateUpTo", "bound": r.bound, "delta_input": r.delta_input,
                "tuples_searched": r.searched, "seed": cfg.seed})
    return EXIT_UNVERIFIED


def cmd_axioms(cfg: CommandConfig) -> int:
    from .jfield import FAIL, UNVERIFIED, JFieldFragment, check_axioms

    a = cfg.args
    with open(a.fragment) as fh:
        frag = JFieldFragment.loads(fh.read())
    rep = check_axioms(frag, height=a.height, tol=a.tol)
    _emit(cfg, {**rep.to_json(), "statuses": {str(k): v for k, v in rep.statuses.items()}})
    statuses = set(rep.statuses.values())
    if FAIL in statuses:
        return EXIT_FAIL
    if UNVERIFIED in statuses:
        return EXIT_UNVERIFIED
    return EXIT_OK


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="jschanuel", description="j-function, modular polynomials, pregeometries and predimension")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for random specializations")
    p.add_argument("--output", "-o", help="write JSON here instead of stdout")
    sub = p.add_subparsers(dest="subcommand", parser_class=_Parser)

    s = sub.add_parser("modpoly", help="modular polynomial Phi_N")
    s.add_argument("N", type=int)
    s.add_argument("--precision", type=int, default=None)
    s.add_argument("--verify", action="store_true", help="check Phi_N(j(q^N), j(q)) = 0, symmetry, degree")
    s.add_argument("--verify-precision", type=int, default=60)
    s.set_defaults(func=cmd_modpoly)

    s = sub.add_parser("verify-ode", help="daleth(j, theta j, ...) = 0 as an exact series")
    s.add_argument("--precision", type=int, default=100)
    s.set_defaults(func=cmd_verify_ode)

    s = sub.add_parser("eval", help="j and derivatives at tau")
    s.add_argument("tau", help='"re,im"')
    s.add_argument("--derivs", type=int, default=3, choices=range(0, 4))
    s.add_argument("--terms", type=int, default=None)
    s.add_argument("--dps", type=int, default=None)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("reduce", help="reduce tau to the fundamental domain")
    s.add_argument("tau")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("orbit", help="decide whether y = g x for a rational g")
    s.add_argument("x")
    s.add_argument("y")
    s.add_argument("--vars", help="comma-separated variables for exact points")
    s.add_argument("--base", help="base-field variables (exact points)")
    s.add_argument("--height", type=int, default=5)
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_orbit)

    s = sub.add_parser("pregeom", help="geodesic dimension or the pregeometry property suite")
    s.add_argument("action", choices=("dim", "props"))
    s.add_argument("--points", help="points separated by ';' (or generators for the jcl oracle)")
    s.add_argument("--over", help="base points separated by ';'")
    s.add_argument("--vars")
    s.add_argument("--base")
    s.add_argument("--height", type=int, default=3)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--max-subset", type=int, default=5)
    s.add_argument("--presentation", help="use the jcl oracle on this presentation")
    s.set_defaults(func=cmd_pregeom)

    for name, func, extra in (
        ("delta", cmd_delta, ("z", "over")),
        ("xi-dim", cmd_xi_dim, ("constants",)),
        ("jcl-member", cmd_jcl_member, ("element", "constants")),
        ("schanuel-report", cmd_schanuel, ("z", "constants")),
        ("main-report", cmd_main_report, ("tau", "z", "g", "hypothesis")),
        ("essential-check", cmd_essential, ("z", "bound")),
    ):
        s = sub.add_parser(name)
        s.add_argument("--presentation", required=True)
        for opt in extra:
            if opt == "bound":
                s.add_argument("--bound", type=int, default=10)
            elif opt == "hypothesis":
                s.add_argument("--hypothesis", choices=("a", "b"), default=None)
            elif opt == "element":
                s.add_argument("element")
            elif opt == "g":
                s.add_argument("--g", default="", help="matrices a,b,c,d separated by ';'")
            else:
                s.add_argument(f"--{opt}", default=None if opt == "constants" else "")
        s.set_defaults(func=func)

    s = sub.add_parser("axioms", help="check a j-field fragment")
    s.add_argument("action", choices=("check",))
    s.add_argument("fragment")
    s.add_argument("--height", type=int, default=6)
    s.add_argument("--tol", type=float, default=None)
    s.set_defaults(func=cmd_axioms)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "subcommand", None):
            raise UsageError("a subcommand is required")
        cfg = CommandConfig(args.subcommand, args, args.seed, args.output)
        return args.func(cfg)
    except UsageError as exc:
        sys.stderr.write(f"jschanuel: {exc}\n")
        return EXIT_USAGE
    except (ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"jschanuel: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
