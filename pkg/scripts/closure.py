"""Static functional vs action of the constructed path over phases and uniform targets."""
import argparse
import time

import numpy as np

from qpot import model as M
from qpot import staticfn as SF
from qpot.acceptance import PHASE_SPECS, TARGETS
from qpot.paths import build_path


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=400, help="cells")
    ap.add_argument("--phases", nargs="*", default=list(PHASE_SPECS))
    args = ap.parse_args()
    em = M.asep()
    print(f"{'phase':5} {'rho':>5} {'S':>9} {'total':>9} {'bulk':>9} {'left':>9} {'right':>9} {'rel':>7} {'T':>7} {'sec':>5}")
    for ph in args.phases:
        spec = M.make_spec(em, *PHASE_SPECS[ph])
        for r in TARGETS:
            t0 = time.perf_counter()
            rho = np.full(args.n, r)
            S = SF.quasi_potential_static(em, rho, spec)
            res = build_path(em, rho, spec)
            a = res.action
            rel = (a.total - S) / max(S, 0.01)
            T = "inf" if res.T is None else f"{res.T:.3f}"
            print(f"{ph:5} {r:5.2f} {S:9.5f} {a.total:9.5f} {a.bulk:9.5f} {a.left:9.5f} {a.right:9.5f} "
                  f"{rel:+7.3f} {T:>7} {time.perf_counter() - t0:5.1f}", flush=True)


if __name__ == "__main__":
    main()
