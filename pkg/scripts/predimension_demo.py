"""Small tour of the presentation machinery: dimensions, delta, the
inequality report and a hunt for essential counterexample shapes.

    python3 scripts/predimension_demo.py --seed 1
"""
import argparse
from dataclasses import dataclass

from jschanuel.derivations import (
    Orbit, Presentation, analyze, delta, dimension_chain, essential_candidate_check,
    generic_jpoint_presentation, schanuel_report,
)


@dataclass
class Config:
    seed: int = 20240601


def run(cfg: Config) -> None:
    one = analyze(generic_jpoint_presentation(1), cfg.seed)
    print("one generic point:", {"omega": one.omega_dimension(), "xi": one.xi_dimension(),
                                  "delta": delta(one, ["z"]).delta})
    print("  chain over {z}:", dimension_chain(one, ["z"]))
    rep = schanuel_report(one, ["z"])
    print(f"  inequality: {rep.lhs} >= {rep.rhs} (equality {rep.equality})")

    two = generic_jpoint_presentation(2)
    for orders in [(1,), (1, 2), (1, 2, 3)]:
        P = Presentation(two.generators, (), (), two.jpoints, (Orbit(("2", "0", "0", "1"), "z1", "z2", orders),))
        r = schanuel_report(P, ["z1", "z2"], seed=cfg.seed)
        print(f"orbit z2 = 2 z1 with derived orders {orders}: td {r.lhs} vs {r.rhs}")

    fake = Presentation(two.generators, ("j0_1 - 5", "j1_1 - 3", "j2_1 - 7"), (), two.jpoints)
    d = delta(fake, ["z1", "z2"], seed=cfg.seed)
    print(f"constant jets at z1: delta(z1, z2) = {d.delta}; essential check ->",
          essential_candidate_check(fake, ["z1", "z2"], seed=cfg.seed))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=Config.seed)
    run(Config(ap.parse_args().seed))
