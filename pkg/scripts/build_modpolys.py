"""Build Phi_N for a range of levels, check them, and write JSON files.

    python3 scripts/build_modpolys.py --levels 1 2 3 4 5 --out modpolys/
"""
import argparse
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from jschanuel.modpoly import build_modular_polynomial, psi, verify_series_identity


@dataclass
class Config:
    levels: list[int] = field(default_factory=lambda: [1, 2, 3, 4, 5, 6, 7])
    out: Path | None = None


def run(cfg: Config) -> bool:
    ok = True
    if cfg.out:
        cfg.out.mkdir(parents=True, exist_ok=True)
    for n in cfg.levels:
        t0 = time.time()
        phi = build_modular_polynomial(n)
        built = time.time() - t0
        zero = verify_series_identity(phi, n, phi.precision).is_zero()
        sym = phi.poly.is_symmetric() or n == 1
        good = zero and sym and phi.degree == psi(n)
        ok &= good
        biggest = max(abs(c) for c in phi.poly.coeffs.values())
        print(f"N={n:2d} psi={psi(n):3d} terms={len(phi.poly.coeffs):4d} digits={len(str(biggest)):4d} "
              f"precision={phi.precision:5d} built {built:6.2f}s  check {'ok' if good else 'FAILED'}")
        if cfg.out:
            (cfg.out / f"phi_{n}.json").write_text(json.dumps(phi.to_json(), sort_keys=True))
    return ok


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", type=int, nargs="+", default=Config().levels)
    ap.add_argument("--out", type=Path, default=None)
    a = ap.parse_args()
    raise SystemExit(0 if run(Config(a.levels, a.out)) else 1)
