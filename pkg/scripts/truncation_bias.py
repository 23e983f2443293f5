"""Fit noiseless full-series sweeps with both amplitude models and report the bias.

    python3 scripts/truncation_bias.py --points 41 --n-max 99
"""

import argparse
import math

import numpy as np

from threeomega import Specimen, fit_amplitude, synthesize


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=41)
    ap.add_argument("--reduced-max", type=float, default=4.0)
    ap.add_argument("--n-max", type=int, default=99)
    args = ap.parse_args()

    s = Specimen(L=1e-3, S=1e-8, rho=21450.0, cp=133.0, kappa=100.0, R=1.0, Rprime=0.1, T0=300.0)
    x = np.linspace(args.reduced_max / args.points, args.reduced_max, args.points)
    data = synthesize(s, 5e-3, x / (4 * math.pi * s.gamma), n_max=args.n_max)
    print("model       kappa_%    gamma_%    cp_%")
    for model in ("first_term", "offset"):
        fit = fit_amplitude(data, model=model, window=None)
        print(f"{model:<10} {100 * (fit.kappa / s.kappa - 1):+9.3f} {100 * (fit.gamma / s.gamma - 1):+9.3f} "
              f"{100 * (fit.cp / s.cp - 1):+9.3f}")


if __name__ == "__main__":
    main()
