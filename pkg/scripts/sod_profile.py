#!/usr/bin/env python3
"""Dump the shock-tube density profile next to the exact solution.

    python scripts/sod_profile.py --n 512 --t 0.15 > sod.tsv
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from tvdmhd.validation import sod_double_tube


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=512)
    ap.add_argument("--t", type=float, default=0.15)
    ap.add_argument("--gamma", type=float, default=1.4)
    args = ap.parse_args()

    x, computed, exact, l1 = sod_double_tube(n=args.n, t_end=args.t, gamma=args.gamma)
    print(f"# Sod tube N={args.n} t={args.t} gamma={args.gamma}  L1={l1:.5f}")
    print("# x\trho\trho_exact")
    for xi, c, e in zip(x, computed, exact):
        print(f"{xi:.6f}\t{c:.8f}\t{e:.8f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
