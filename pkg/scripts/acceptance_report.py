"""Run every acceptance check and print one PASS/FAIL line per criterion.

    python3 scripts/acceptance_report.py [--only 1 4 9]
"""
import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

import test_acceptance as acc  # noqa: E402


def main(only=None) -> int:
    failed = 0
    for k in only or sorted(acc.CRITERIA):
        try:
            ok, line = acc.run_criterion(k)
        except Exception:
            ok, line = False, acc.RESULTS[k]
        failed += not ok
        print(line, flush=True)
    print(f"{9 - failed if not only else len(only) - failed} passed, {failed} failed")
    return 1 if failed else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--only", type=int, nargs="+")
    raise SystemExit(main(ap.parse_args().only))
