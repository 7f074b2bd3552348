"""Run every registered matrix check at desk scale and write one JSON report each.

Usage: python scripts/run_all_audits.py [--out results/audits] [--trials 1000] [--seed 42]
"""

import argparse
import time
from pathlib import Path

from warpaudit import cli
from warpaudit import ineq_audit as ia


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/audits"))
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    worst = 0
    for name in ia.CHECKS:
        argv = ["matrix-audit", "--check", name, "--dims", "2..8", "--trials", str(args.trials),
                "--seed", str(args.seed), "--out", str(args.out / f"{name}.json")]
        if name == "t0":
            argv += ["--interpretation", "all"]
        t0 = time.perf_counter()
        code = cli.main(argv)
        print(f"{name:20s} exit={code} {time.perf_counter() - t0:6.2f}s")
        # t0 is audited, not asserted: its violations are expected
        if name != "t0":
            worst = max(worst, code)

    for name, dims in (("harmonic", "2..1000000"), ("chain", "2..10000")):
        code = cli.main(["sweep", "--check", name, "--dims", dims, "--out", str(args.out / f"sweep_{name}.json")])
        print(f"sweep {name:14s} exit={code}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    raise SystemExit(main())
