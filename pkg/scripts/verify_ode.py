"""Check the third-order ODE for j as an exact q-series identity at several precisions.

    python3 scripts/verify_ode.py --precisions 25 50 100 200
"""
import argparse
import time
from dataclasses import dataclass, field

from jschanuel.qseries import verify_modular_ode


@dataclass
class Config:
    precisions: list[int] = field(default_factory=lambda: [25, 50, 100])


def run(cfg: Config) -> bool:
    ok = True
    for m in cfg.precisions:
        t0 = time.time()
        res = verify_modular_ode(m)
        ok &= res.is_zero()
        print(f"M={m:4d}  zero={res.is_zero()}  ({time.time() - t0:.2f}s)")
    return ok


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--precisions", type=int, nargs="+", default=Config().precisions)
    raise SystemExit(0 if run(Config(ap.parse_args().precisions)) else 1)
