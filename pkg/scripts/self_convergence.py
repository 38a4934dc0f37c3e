"""Ground-state level p(mu) under grid refinement at a fixed box.

    python3 scripts/self_convergence.py --L 16 --n 64 128 256
"""

import argparse
import time
import warnings

from fchoquard import FracParams, SolveOptions, default_model, find_seed, make_grid, minimize_pohozaev


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--L", type=float, default=16.0)
    ap.add_argument("--n", type=int, nargs="+", default=[64, 128, 256])
    a = ap.parse_args()
    warnings.simplefilter("ignore")
    p, m = FracParams(2, 0.5, 1.0, 1.0), default_model()
    prev = None
    for n in a.n:
        t0 = time.perf_counter()
        res = minimize_pohozaev(find_seed(m, p, make_grid(2, a.L, n)), m, p, SolveOptions(max_iters=2000))
        inc = "" if prev is None else f"  increment {abs(res.p_mu_estimate - prev):.3e}"
        print(f"n={n:4d}  p={res.p_mu_estimate:.10f}  status={res.status} its={res.iterations} "
              f"{time.perf_counter() - t0:.1f} s{inc}")
        prev = res.p_mu_estimate


if __name__ == "__main__":
    main()
