"""Print the per-interpretation violation table for the t_k(X A^-1/2) bound.

Usage: python scripts/t0_verdict_table.py [--trials 1000] [--seed 42] [--artifacts DIR]
"""

import argparse

from warpaudit import ineq_audit as ia


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--artifacts", default=None, help="directory for counterexample .mat files")
    args = ap.parse_args()

    table = ia.t0_verdict_table((2, 8), args.trials, args.seed, artifact_dir=args.artifacts)
    print(f"{'interpretation':16s}{'trials':>8s}{'lower':>8s}{'upper':>8s}")
    for interp, row in table.items():
        print(f"{interp:16s}{row['trials']:8d}{row['lower']:8d}{row['upper']:8d}")

    print("\nhand-picked instances (lower margin, upper margin):")
    for x, a, interp in (("I2", 2.25, "floor_t1"), ("I2", 1.0, "dim")):
        s = ia.t0_sides(ia.la.identity(2), a * ia.la.identity(2), interp)
        print(f"  X={x}, A={a}*I2, {interp}: m={s.m} ({s.lower_margin:+.6f}, {s.upper_margin:+.6f})")


if __name__ == "__main__":
    main()
