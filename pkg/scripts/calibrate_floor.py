"""Measure total action / (dx + dt) on Godunov entropy solutions.

The discretization floor constant in qpot.action is set above the worst ratio.
    python3 scripts/calibrate_floor.py [--fields 24] [--horizon 0.5]
"""
import argparse

import numpy as np

from qpot import action as A
from qpot import model as M
from qpot.solver import solve_ibvp


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--fields", type=int, default=24)
    ap.add_argument("--horizon", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()
    for em in (M.asep(), M.cubic(0.2)):
        for n in (64, 128, 256, 512):
            rng = np.random.default_rng(args.seed)
            ratios = []
            for _ in range(args.fields):
                rl, rr = rng.uniform(0.05, 0.95, 2)
                spec = M.make_spec(em, rl, rr)
                k = rng.integers(1, 5)
                vals = rng.uniform(0.02, 0.98, k)
                cuts = np.sort(rng.uniform(0, 1, k - 1))
                u0 = vals[np.searchsorted(cuts, (np.arange(n) + 0.5) / n)]
                fld = solve_ibvp(em, u0, rl, rr, args.horizon)
                a = A.total_action(em, fld, spec)
                ratios.append(a.total / (fld.dx + fld.dt))
            ratios = np.array(ratios)
            print(f"{em.name:12s} n={n:4d}  max {ratios.max():.3f}  median {np.median(ratios):.3f}")
    print(f"current FLOOR_C = {A.FLOOR_C}")


if __name__ == "__main__":
    main()
