"""Dilation scaling of the three energy terms on random zero-moment fields.

    python3 scripts/scaling_check.py --n 128 --fields 10
"""

import argparse

import numpy as np

from fchoquard import FracParams, default_model, make_grid
from fchoquard.testing import scaling_errors, scaling_fields


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--L", type=float, default=16.0)
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--fields", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    ts = (0.5, 0.8, 1.25, 2.0)
    g = make_grid(2, a.L, a.n)
    err = scaling_errors(scaling_fields(g, a.fields, seed=a.seed), ts, default_model(), FracParams(2, 0.5, 1.0, 1.0))
    print("t, kinetic, mass, dterm  (max relative deviation over fields)")
    for j, t in enumerate(ts):
        k, m, d = err[:, j].max(axis=0)
        print(f"{t:4g}, {k:.2e}, {m:.2e}, {d:.2e}")
    print(f"overall max {np.max(err):.2e}")


if __name__ == "__main__":
    main()
