"""L1 distance between exact wave diagrams and the reversed constructed paths."""
import argparse
import time

import numpy as np

from qpot import model as M
from qpot.acceptance import oracle_scenarios
from qpot.fields import cell_centers, rh_violations
from qpot.oracles import appendix_oracle
from qpot.paths import build_path


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=800, help="cells")
    ap.add_argument("--times", type=float, nargs="*", default=[0.2, 1.0, 2.0])
    ap.add_argument("--cases", nargs="*", default=None)
    args = ap.parse_args()
    x = cell_centers(args.n)
    for cid, em, pair, rho, y in oracle_scenarios():
        if args.cases and cid not in args.cases:
            continue
        t0 = time.perf_counter()
        spec = M.make_spec(em, *pair)
        rho = M.rho_critical(em, spec) if rho is None else rho
        d = appendix_oracle(em, cid, rho, spec, y=y)
        res = build_path(em, np.full(args.n, rho), spec, y=y, horizon=max(args.times) + 1.0, evaluate=False)
        errs = [np.mean(np.abs(res.tilde.frame_at(t) - d(t, x))) for t in args.times]
        tau = "-" if d.tau is None else f"{d.tau:.3f}"
        print(f"{cid:6} {em.name:12} {spec.phase:4} rho={rho:.4f} L1 " + " ".join(f"{e:.5f}" for e in errs)
              + f"  rh {rh_violations(d):.1e}  tau {tau}  {time.perf_counter() - t0:.1f}s", flush=True)


if __name__ == "__main__":
    main()
