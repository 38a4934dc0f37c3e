"""Solve with both methods and compare the centred fields.

    python3 scripts/compare_solvers.py --L 48 --n 384
    python3 scripts/compare_solvers.py --model "double_power r=2 h=2.5 sign=1" --L 16 --n 256
"""

import argparse
import time
import warnings

import numpy as np

from fchoquard import (FracParams, SolveOptions, center, find_seed, fixed_point_resolvent, make_grid,
                       minimize_pohozaev, parse_model)
from fchoquard.verify import half_height_radius, pohozaev_residual


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--model", default="pure_power r=2")
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--s", type=float, default=0.5)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--mu", type=float, default=1.0)
    ap.add_argument("--L", type=float, default=16.0)
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--max-iters", type=int, default=2000)
    a = ap.parse_args()
    warnings.simplefilter("ignore")
    p = FracParams(a.dim, a.s, a.alpha, a.mu)
    m = parse_model(a.model)
    seed = find_seed(m, p, make_grid(a.dim, a.L, a.n))
    opts = SolveOptions(max_iters=a.max_iters)
    out = {}
    for name, solver in (("pohozaev", minimize_pohozaev), ("fixedpoint", fixed_point_resolvent)):
        t0 = time.perf_counter()
        res = solver(seed, m, p, opts)
        out[name] = res
        print(f"{name:10s} converged={res.converged} its={res.iterations} {time.perf_counter() - t0:6.1f} s  "
              f"J={res.report.energy:.12f}  P-residual={pohozaev_residual(res):.2e}")
    ua, ub = (center(out[k].u).values for k in ("pohozaev", "fixedpoint"))
    ja, jb = (out[k].report.energy for k in ("pohozaev", "fixedpoint"))
    print(f"half-height radius {half_height_radius(out['pohozaev'].u):.3f}, sup {out['pohozaev'].u.sup:.4f}")
    print(f"L2 rel {np.linalg.norm(ua - ub) / np.linalg.norm(ua):.2e}  J rel {abs(ja - jb) / abs(ja):.2e}")


if __name__ == "__main__":
    main()
