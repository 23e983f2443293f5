"""Tabulate full-series versus fundamental-only amplitudes against 2*omega*gamma.

    python3 scripts/error_table.py --x-max 10 --points 101 --out error_table.csv
"""

import argparse
import math

import numpy as np

from threeomega.pipeline import write_error_table
from threeomega.spectral import error_curves


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--x-max", type=float, default=10.0)
    ap.add_argument("--points", type=int, default=101)
    ap.add_argument("--n-max", type=int, default=99)
    ap.add_argument("--out", default="error_table.csv")
    args = ap.parse_args()

    path = write_error_table(args.out, args.x_max, args.points, args.n_max)
    c = error_curves(np.linspace(0.0, args.x_max, args.points), args.n_max)
    print(f"wrote {path}")
    print(f"difference at 0: {c.difference[0]:.7f} (pi^4/96 - 1 = {math.pi**4 / 96 - 1:.7f})")
    print(f"relative error monotone increasing: {bool(np.all(np.diff(c.relative) > 0))}")
    for x in (0.0, 1.0, 4.0, args.x_max):
        i = int(np.argmin(np.abs(c.reduced_freq - x)))
        print(f"  2wg={c.reduced_freq[i]:6.2f}  A-B={c.difference[i]:.6f}  (A-B)/A={c.relative[i]:.6f}")


if __name__ == "__main__":
    main()
