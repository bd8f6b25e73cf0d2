#!/usr/bin/env python3
"""Recover parameter rows that reproduce printed experiment outcomes.

The second and third outcome tables of the replicated experiments were
generated from parameter draws that were never printed.  All six
printed columns are symmetric functions of the six unknown per-row
parameters, so a row can be recovered (up to permutation, which leaves
every column invariant) by least-squares inversion of the exact
enumeration map against the 4-decimal printed values.

A row is accepted only if every column matches within 5e-5, i.e. is
consistent with the printed rounding.  Accepted rows are emitted as a
JSON params list suitable for `corrbern experiment --params-file`.
"""

import json
import sys

import numpy as np
from scipy.optimize import least_squares

from corrbern.experiment import exact_experiment_row
from corrbern.model import ModelParams

BLOCK2_TARGETS = [  # rho == 0, p unknown
    [0.3278, 0.3320, 0.3234, 0.1222, 0.1182, 0.1149],
    [0.4965, 0.4986, 0.4918, 0.1052, 0.1033, 0.1014],
    [0.4240, 0.4269, 0.4169, 0.1098, 0.1072, 0.1048],
    [0.1260, 0.1335, 0.1333, 0.1433, 0.1354, 0.1307],
    [0.5204, 0.5225, 0.5177, 0.1094, 0.1076, 0.1056],
]
BLOCK3_TARGETS = [  # p == 1/2, rho unknown
    [0.6866, 0.6872, 0.7392, 0.0989, 0.0983, 0.0976],
    [0.3062, 0.3108, 0.3496, 0.1375, 0.1330, 0.1293],
    [0.3776, 0.3812, 0.4257, 0.1367, 0.1333, 0.1301],
    [0.3745, 0.3781, 0.4221, 0.1384, 0.1349, 0.1316],
    [0.6384, 0.6393, 0.6919, 0.1095, 0.1086, 0.1075],
]
N = 6


def columns(params):
    r = exact_experiment_row(params)
    return np.array(
        [r.e_str, r.e_strprime, r.rho_t, r.var_str, r.var_strbar, r.var_strprime]
    )


def make_params(free, mode):
    free = np.clip(free, 1e-6, 1 - 1e-6)
    if mode == "rho-zero":
        return ModelParams.make(free, np.zeros(N))
    return ModelParams.make(np.full(N, 0.5), free)


def recover_row(target, mode, seed, starts=200):
    target = np.array(target)
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(starts):
        x0 = rng.uniform(0.05, 0.95, size=N)
        sol = least_squares(
            lambda v: columns(make_params(v, mode)) - target,
            x0,
            bounds=(1e-6, 1 - 1e-6),
            xtol=1e-14,
            ftol=1e-14,
            gtol=1e-14,
        )
        err = np.max(np.abs(sol.fun))
        if best is None or err < best[0]:
            best = (err, sol.x)
        if err <= 5e-5:
            break
    return best


def main():
    rows = {"rho-zero": [], "p-half": []}
    for mode, targets in (("rho-zero", BLOCK2_TARGETS), ("p-half", BLOCK3_TARGETS)):
        for i, target in enumerate(targets):
            err, free = recover_row(target, mode, seed=1000 * i + hash(mode) % 97)
            params = make_params(np.sort(free), mode)
            ok = err <= 5e-5
            print(
                f"{mode} row {i + 1}: max column error {err:.2e} "
                f"{'OK' if ok else 'NOT RECOVERED'}",
                file=sys.stderr,
            )
            rows[mode].append(
                {"p": list(params.p), "rho": list(params.rho), "max_err": err}
            )
    print(json.dumps(rows, indent=2))


if __name__ == "__main__":
    main()
