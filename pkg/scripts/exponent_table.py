#!/usr/bin/env python3
"""Recover the subset-size and cost exponents of every named cost model.

Each row sweeps one parameter over a geometric grid, optimizes the subset
sizes at every point, and fits log cost (and log argmin) against log size.
"""

import sys

import numpy as np

from qwlab import costlab


def sweep(name, sweep_key, values, pinned, size_key=None):
    xs, sizes, costs = [], [], []
    for value in values:
        params = dict(pinned)
        params[sweep_key] = float(value)
        result = costlab.optimize_model(costlab.build_model(name, **params))
        xs.append(float(value))
        costs.append(result.cost)
        if size_key:
            sizes.append(result.sizes[size_key])
    cost_slope = costlab.fit_exponent(xs, costs)[0]
    size_slope = costlab.fit_exponent(xs, sizes)[0] if size_key else float("nan")
    return cost_slope, size_slope


def main() -> int:
    wide = np.geomspace(1e4, 1e7, 7)
    far = np.geomspace(1e8, 1e14, 7)
    table = [
        ("ed", *sweep("ed", "n", wide, {}, "r"), "2/3", "2/3"),
        ("mv", *sweep("mv", "n", wide, {}, "r"), "5/3", "2/3"),
        ("triangle-ambainis", *sweep("triangle-ambainis", "n", far, {}, "r"), "1.3", "3/5"),
        ("triangle-szegedy", *sweep("triangle-szegedy", "n", wide, {}, "r"), "1.5", "0 (boundary)"),
        ("alg2 (in k)", *sweep("alg2", "k", wide, {"n": 1e5}, "r"), "2/3", "2/3"),
        ("alg3 (in k)", *sweep("alg3", "k", wide, {"n": 1e5}, "r"), "4/5", "4/5"),
    ]
    print(f"{'model':<22}{'cost slope':>12}{'size slope':>12}{'cost ref':>10}{'size ref':>14}")
    for name, cost_slope, size_slope, cost_ref, size_ref in table:
        print(f"{name:<22}{cost_slope:>12.4f}{size_slope:>12.4f}{cost_ref:>10}{size_ref:>14}")

    xs, ts, costs = [], [], []
    for value in np.geomspace(1e4, 1e6, 6):
        result = costlab.optimize_model(costlab.build_model("alg5", m=value, k=value, n=value))
        xs.append(value)
        ts.append(result.sizes["t"])
        costs.append(result.cost)
    print(
        f"{'alg5 (m=k=n)':<22}{costlab.fit_exponent(xs, costs)[0]:>12.4f}"
        f"{costlab.fit_exponent(xs, ts)[0]:>12.4f}{'25/7':>10}{'6/7':>14}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
