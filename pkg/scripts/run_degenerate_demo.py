#!/usr/bin/env python3
"""Fixed-mean counterexample: minimum-variance unbiasedness is local.

With two components and the mean of (p_1, p_2) pinned at mu, the
16-point sample space gives only a rank-5 coefficient map, so unbiased
estimators of E(Delta) form an 11-dimensional affine family.  The
minimum-variance member depends on the operating point p: this script
solves the weighted least-norm problem at two p values and shows the
two solutions disagree componentwise while both stay exactly unbiased.

Usage:
    python3 scripts/run_degenerate_demo.py [--mu 0.25] [--p-values 0.15,0.35]
"""

import argparse

import numpy as np

from corrbern.linsys import build_degenerate_system, degenerate_min_variance
from corrbern.stats import delta_stat


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--mu", type=float, default=0.25)
    parser.add_argument("--p-values", default="0.15,0.35")
    args = parser.parse_args()
    p_values = [float(v) for v in args.p_values.split(",")]

    system = build_degenerate_system(args.mu)
    delta_values = [float(delta_stat(z)) for z in system.points]
    g = system.expectation_coeffs(delta_values)
    print(f"mu = {args.mu}, target coefficients g = {np.round(g, 10)}")
    print(f"rank(M) = {np.linalg.matrix_rank(system.m)} of min{system.m.shape}")

    solutions = []
    for p in p_values:
        s = degenerate_min_variance(system, g, p)
        solutions.append(s)
        w = system.point_probs(p)
        mean = float(w @ s)
        var = float(w @ (s * s)) - mean * mean
        residual = float(np.max(np.abs(system.m @ s - g)))
        print(f"\np = {p}: unbiasedness residual {residual:.2e}, variance {var:.6f}")

    header = "point (x1x2,y1y2)  Delta " + "  ".join(
        f"S at p={p}" for p in p_values
    )
    print("\n" + header)
    for j, pt in enumerate(system.points):
        bits = (
            "".join(map(str, pt.x)) + "," + "".join(map(str, pt.y))
        )
        vals = "  ".join(f"{s[j]:>9.5f}" for s in solutions)
        print(f"{bits:>17} {delta_values[j]:>6.0f} {vals}")

    gap = float(np.max(np.abs(solutions[0] - solutions[-1])))
    print(f"\nmax componentwise difference between solutions: {gap:.5f}")


if __name__ == "__main__":
    main()
