"""Tail exponent of the default ground state as the box grows.

    python3 scripts/decay_study.py --boxes 16:256 32:512
"""

import argparse
import warnings

from fchoquard import FracParams, SolveOptions, decay_fit, default_model, find_seed, make_grid, minimize_pohozaev


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--boxes", nargs="+", default=["16:256", "32:512"], help="L:n pairs")
    ap.add_argument("--csv", default=None, help="also write the radial profile of the last box here")
    a = ap.parse_args()
    warnings.simplefilter("ignore")
    p, m = FracParams(2, 0.5, 1.0, 1.0), default_model()
    print("L, n, slope, expected, window, r2, envelope_ratio")
    for item in a.boxes:
        L, n = item.split(":")
        res = minimize_pohozaev(find_seed(m, p, make_grid(2, float(L), int(n))), m, p, SolveOptions(max_iters=2000))
        f = decay_fit(res)
        print(f"{float(L):g}, {n}, {f.slope:.4f}, {f.expected:g}, [{f.window[0]:.2f}, {f.window[1]:.2f}], "
              f"{f.r_squared:.5f}, {f.envelope_ratio:.3f}")
    if a.csv:
        from fchoquard.verify import radial_profile
        with open(a.csv, "w") as fh:
            fh.write(radial_profile(res.u).to_csv())


if __name__ == "__main__":
    main()
