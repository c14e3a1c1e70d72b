"""Asymptotic walk cost models, subset-size optimization, and exponent recovery.

A walk algorithm is priced by its setup, update and check costs together with
the spectral gap delta and marked fraction epsilon of its chain:

    szegedy:   s + (u + c) / sqrt(delta * epsilon)
    ambainis:  s + (n/r)^{a/2} (c + sqrt(r) * u)      for collision arity a

Models here use the coarse power-law forms of delta and epsilon (1/r, (r/n)^a
and friends); exact binomial ratios belong to the simulators.  The optimizer
recovers the minimizing subset sizes numerically and exponent fits over
geometric size sweeps recover the growth rates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import InputError

Env = dict[str, float]


@dataclass(frozen=True)
class CostModel:
    """Named cost structure; all component callables take one merged
    {parameter or size name: value} environment."""

    name: str
    framework: str
    size_names: tuple[str, ...]
    params: dict[str, float]
    setup: Callable[[Env], float]
    update: Callable[[Env], float]
    check: Callable[[Env], float]
    delta: Callable[[Env], float] | None = None
    epsilon: Callable[[Env], float] | None = None
    ratio: Callable[[Env], float] | None = None
    arity: int | None = None
    walk_size: str = "r"
    custom: Callable[[Env], float] | None = None

    def env(self, sizes: Env) -> Env:
        merged = dict(self.params)
        merged.update(sizes)
        return merged


def szegedy_cost(model: CostModel, sizes: Env) -> float:
    """s + (u + c) / sqrt(delta * epsilon)."""
    env = model.env(sizes)
    if model.delta is None or model.epsilon is None:
        raise InputError(f"model {model.name} has no gap/fraction structure")
    de = model.delta(env) * model.epsilon(env)
    if de <= 0.0:
        raise InputError("delta * epsilon must be positive")
    return model.setup(env) + (model.update(env) + model.check(env)) / math.sqrt(de)


def ambainis_cost(model: CostModel, sizes: Env) -> float:
    """s + ratio^{arity/2} (c + sqrt(r) u) with r the walk's subset size."""
    env = model.env(sizes)
    if model.ratio is None or model.arity is None:
        raise InputError(f"model {model.name} has no ground/subset ratio")
    factor = model.ratio(env) ** (model.arity / 2.0)
    return model.setup(env) + factor * (model.check(env) + math.sqrt(env[model.walk_size]) * model.update(env))


def cost(model: CostModel, sizes: Env) -> float:
    if model.custom is not None:
        return model.custom(model.env(sizes))
    if model.framework == "szegedy":
        return szegedy_cost(model, sizes)
    if model.framework == "ambainis":
        return ambainis_cost(model, sizes)
    raise InputError(f"unknown framework {model.framework!r}")


# ---------------------------------------------------------------------------
# Optimizer

@dataclass(frozen=True)
class OptimizationResult:
    sizes: dict[str, int]
    cost: float
    boundary: bool


def geometric_grid(lo: int, hi: int, ratio: float = 1.05) -> list[int]:
    if lo < 1 or hi < lo:
        raise InputError(f"bad grid range [{lo}, {hi}]")
    points = []
    x = float(lo)
    while x <= hi:
        points.append(int(round(x)))
        x = max(x * ratio, x + 1.0)
    points.append(hi)
    return sorted(set(min(max(p, lo), hi) for p in points))


def _evaluate(fn: Callable[[Env], float], sizes: Env) -> float:
    try:
        value = fn(sizes)
    except (OverflowError, ZeroDivisionError, ValueError):
        return math.inf
    return value if math.isfinite(value) else math.inf


def _fine_grid(lo: int, hi: int, points: int = 9) -> list[int]:
    if hi <= lo:
        return [lo]
    raw = np.geomspace(lo, hi, points)
    return sorted(set(int(round(x)) for x in raw) | {lo, hi})


def optimize(
    fn: Callable[[Env], float],
    domain: dict[str, tuple[int, int]],
    ratio: float = 1.05,
) -> OptimizationResult:
    """Minimize an integer-size cost function over a box domain.

    Up to two sizes get a full geometric-grid scan (ratio 1.05); more sizes use
    coordinate descent over the same per-axis grids.  The winning grid cell is
    then refined by recursively re-gridding the bracket around it until the
    bracket is a few integers wide, followed by unit-step descent.  Ties break
    toward smaller sizes; the boundary flag records an optimum touching a
    domain edge.
    """
    if not domain:
        raise InputError("domain must name at least one size")
    names = sorted(domain)
    for name in names:
        lo, hi = domain[name]
        if lo < 1 or hi < lo:
            raise InputError(f"empty domain for {name}: [{lo}, {hi}]")

    def better(candidate, cand_sizes, best, best_sizes):
        if candidate < best:
            return True
        if candidate == best and best_sizes is not None:
            return tuple(cand_sizes[n] for n in names) < tuple(best_sizes[n] for n in names)
        return False

    def search(grids, seed_sizes=None, seed_value=math.inf):
        best_sizes, best = seed_sizes, seed_value
        if len(names) <= 3:
            for combo in itertools.product(*(grids[n] for n in names)):
                sizes = dict(zip(names, combo))
                value = _evaluate(fn, sizes)
                if better(value, sizes, best, best_sizes):
                    best, best_sizes = value, sizes
        else:
            # coordinate descent; adequate only for coordinatewise-unimodal costs
            current = seed_sizes or {n: grids[n][len(grids[n]) // 2] for n in names}
            best_sizes, best = dict(current), _evaluate(fn, current)
            for _ in range(50):
                moved = False
                for name in names:
                    for point in grids[name]:
                        trial = dict(best_sizes)
                        trial[name] = point
                        value = _evaluate(fn, trial)
                        if better(value, trial, best, best_sizes):
                            best, best_sizes, moved = value, trial, True
                if not moved:
                    break
        return best_sizes, best

    # full-product scans get coarser axes in higher dimensions; the bracket
    # refinement below recovers the lost resolution
    per_axis_cap = {1: 100_000, 2: 400, 3: 64}.get(len(names), 0)

    def initial_grid(name):
        lo, hi = domain[name]
        g = geometric_grid(lo, hi, ratio)
        if per_axis_cap and len(g) > per_axis_cap:
            g = _fine_grid(lo, hi, per_axis_cap)
        return g

    grids = {n: initial_grid(n) for n in names}
    best_sizes, best = search(grids)
    assert best_sizes is not None

    # shrink each axis to the bracket around the winner and rescan finer
    for _ in range(60):
        box = {}
        wide = False
        for name in names:
            g = grids[name]
            i = min(range(len(g)), key=lambda idx: abs(g[idx] - best_sizes[name]))
            lo = max(domain[name][0], g[max(0, i - 1)])
            hi = min(domain[name][1], g[min(len(g) - 1, i + 1)])
            box[name] = (lo, hi)
            wide = wide or (hi - lo > 4)
        if not wide:
            break
        grids = {n: _fine_grid(box[n][0], box[n][1]) for n in names}
        best_sizes, best = search(grids, best_sizes, best)

    while True:
        improved = False
        for deltas in itertools.product((-1, 0, 1), repeat=len(names)):
            if not any(deltas):
                continue
            trial = {}
            ok = True
            for name, d in zip(names, deltas):
                v = best_sizes[name] + d
                lo, hi = domain[name]
                if not (lo <= v <= hi):
                    ok = False
                    break
                trial[name] = v
            if not ok:
                continue
            value = _evaluate(fn, trial)
            if better(value, trial, best, best_sizes):
                best, best_sizes, improved = value, trial, True
        if not improved:
            break

    boundary = any(
        best_sizes[name] in (domain[name][0], domain[name][1]) for name in names
    )
    return OptimizationResult(sizes=best_sizes, cost=best, boundary=boundary)


def optimize_model(model: CostModel, domain: dict[str, tuple[int, int]] | None = None) -> OptimizationResult:
    return optimize(lambda sizes: cost(model, sizes), domain or default_domain(model))


class ExponentFit(NamedTuple):
    """Log-log least-squares fit of a sweep: y ~ exp(intercept) * x^exponent."""

    exponent: float
    intercept: float
    residual: float


def fit_exponent(xs, ys) -> ExponentFit:
    """Least-squares slope of log(y) against log(x), with the maximum absolute
    log residual.  Needs at least six samples."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    if lx.shape != ly.shape or lx.size < 6:
        raise InputError("exponent fits need at least six matched samples")
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = float(np.max(np.abs(ly - (slope * lx + intercept))))
    return ExponentFit(float(slope), float(intercept), residual)


# ---------------------------------------------------------------------------
# Named models

def ed_model(n: float) -> CostModel:
    return CostModel(
        name="ed", framework="szegedy", size_names=("r",), params={"n": n},
        setup=lambda e: e["r"],
        update=lambda e: 1.0,
        check=lambda e: 0.0,
        delta=lambda e: 1.0 / e["r"],
        epsilon=lambda e: e["r"] ** 2 / e["n"] ** 2,
    )


def mv_model(n: float) -> CostModel:
    return CostModel(
        name="mv", framework="szegedy", size_names=("r",), params={"n": n},
        setup=lambda e: e["r"] * e["n"],
        update=lambda e: e["n"],
        check=lambda e: 0.0,
        delta=lambda e: 1.0 / e["r"],
        epsilon=lambda e: e["r"] ** 2 / e["n"] ** 2,
    )


def triangle_ambainis_model(n: float) -> CostModel:
    return CostModel(
        name="triangle-ambainis", framework="ambainis", size_names=("r",), params={"n": n},
        setup=lambda e: e["r"] ** 2,
        update=lambda e: e["r"],
        check=lambda e: math.sqrt(e["n"]) * e["r"] ** (2.0 / 3.0),
        ratio=lambda e: e["n"] / e["r"],
        arity=2,
    )


def triangle_szegedy_model(n: float) -> CostModel:
    return CostModel(
        name="triangle-szegedy", framework="szegedy", size_names=("r",), params={"n": n},
        setup=lambda e: e["r"] ** 2,
        update=lambda e: e["r"],
        check=lambda e: math.sqrt(e["n"]) * e["r"] ** (2.0 / 3.0),
        delta=lambda e: 1.0 / e["r"],
        epsilon=lambda e: e["r"] ** 2 / e["n"] ** 2,
    )


def triangle_inner_model(r: float) -> CostModel:
    """Golden-edge subroutine: walk on s-subsets of an r-vertex ground set."""
    return CostModel(
        name="triangle-inner", framework="ambainis", size_names=("s",), params={"r": r},
        setup=lambda e: e["s"],
        update=lambda e: 1.0,
        check=lambda e: 0.0,
        ratio=lambda e: e["r"] / e["s"],
        arity=2,
        walk_size="s",
    )


def alg2_model(k: float, n: float) -> CostModel:
    return CostModel(
        name="alg2", framework="szegedy", size_names=("r",), params={"k": k, "n": n},
        setup=lambda e: e["r"] * e["n"] ** 2,
        update=lambda e: e["n"] ** 2,
        check=lambda e: 0.0,
        delta=lambda e: 1.0 / e["r"],
        epsilon=lambda e: e["r"] ** 2 / e["k"] ** 2,
    )


def alg3_model(k: float, n: float) -> CostModel:
    return CostModel(
        name="alg3", framework="szegedy", size_names=("r",), params={"k": k, "n": n},
        setup=lambda e: e["r"] * e["n"],
        update=lambda e: e["n"],
        check=lambda e: 0.0,
        delta=lambda e: 1.0 / e["r"],
        epsilon=lambda e: e["r"] ** 4 / (e["n"] * e["k"]) ** 4,
    )


def alg4_model(k: float, n: float) -> CostModel:
    return CostModel(
        name="alg4", framework="szegedy", size_names=("r", "s"), params={"k": k, "n": n},
        setup=lambda e: e["r"] * e["s"] * e["n"],
        update=lambda e: (e["r"] + e["s"]) * e["n"],
        check=lambda e: 0.0,
        delta=lambda e: 1.0 / max(e["r"], e["s"]),
        epsilon=lambda e: (e["r"] / e["k"]) ** 2 * (e["s"] / e["n"]) ** 2,
    )


def threeparam_cost(m: float, k: float, n: float, t: float, r: float, s: float) -> float:
    """trsn + (rsn + tsn + rtn) / sqrt(delta * epsilon) with delta = min of the
    three per-factor gaps and epsilon = r^2 s^2 t^2 / (k^2 n^2 m^2)."""
    delta = min(1.0 / t, 1.0 / r, 1.0 / s)
    epsilon = (r * s * t) ** 2 / (k * n * m) ** 2
    update = r * s * n + t * s * n + r * t * n
    return t * r * s * n + update / math.sqrt(delta * epsilon)


def grover_over_sets_cost(m: float, k: float, n: float) -> float:
    """Search over set pairs, then over matrix pairs, each checked by the
    single-pair verifier: m k n^{5/3}."""
    return m * k * n ** (5.0 / 3.0)


def ed_over_sets_cost(m: float, k: float, n: float) -> float:
    """Collision walk over set pairs with the pairwise strategy inside:
    m^{2/3} k n^{5/3}."""
    return m ** (2.0 / 3.0) * k * n ** (5.0 / 3.0)


def alg5_model(m: float, k: float, n: float) -> CostModel:
    return CostModel(
        name="alg5", framework="custom", size_names=("t", "r", "s"),
        params={"m": m, "k": k, "n": n},
        setup=lambda e: e["t"] * e["r"] * e["s"] * e["n"],
        update=lambda e: (e["r"] * e["s"] + e["t"] * e["s"] + e["r"] * e["t"]) * e["n"],
        check=lambda e: 0.0,
        custom=lambda e: threeparam_cost(e["m"], e["k"], e["n"], e["t"], e["r"], e["s"]),
    )


def power_walk_cost(k: float, n: float, u_steps: int, v_steps: int, r: float, s: float) -> float:
    """Cost of running the matrix walk for u steps and the line walk for v steps
    per update: rsn + (usn + vrn) (kn/rs) max gap factor.

    The gap factor 1/sqrt(1 - (1 - 1/r)^u) decays to 1 as u grows, but the
    update term grows linearly, so multi-stepping never beats u = v = 1.
    """
    if u_steps < 1 or v_steps < 1:
        raise InputError("step multipliers must be >= 1")
    gap_r = 1.0 - (1.0 - 1.0 / r) ** u_steps
    gap_s = 1.0 - (1.0 - 1.0 / s) ** v_steps
    factor = max(1.0 / math.sqrt(gap_r), 1.0 / math.sqrt(gap_s))
    return r * s * n + (u_steps * s * n + v_steps * r * n) * (k * n / (r * s)) * factor


def power_walk_model(k: float, n: float, u_steps: int, v_steps: int) -> CostModel:
    return CostModel(
        name="power-walk", framework="custom", size_names=("r", "s"),
        params={"k": k, "n": n, "u_steps": float(u_steps), "v_steps": float(v_steps)},
        setup=lambda e: e["r"] * e["s"] * e["n"],
        update=lambda e: (e["u_steps"] * e["s"] + e["v_steps"] * e["r"]) * e["n"],
        check=lambda e: 0.0,
        custom=lambda e: power_walk_cost(
            e["k"], e["n"], int(e["u_steps"]), int(e["v_steps"]), e["r"], e["s"]
        ),
    )


MODEL_BUILDERS: dict[str, Callable[..., CostModel]] = {
    "ed": ed_model,
    "mv": mv_model,
    "triangle-ambainis": triangle_ambainis_model,
    "triangle-szegedy": triangle_szegedy_model,
    "triangle-inner": triangle_inner_model,
    "alg2": alg2_model,
    "alg3": alg3_model,
    "alg4": alg4_model,
    "alg5": alg5_model,
    "power-walk": power_walk_model,
}


def build_model(name: str, **params) -> CostModel:
    try:
        builder = MODEL_BUILDERS[name]
    except KeyError:
        raise InputError(f"unknown cost model {name!r}; known: {sorted(MODEL_BUILDERS)}")
    return builder(**params)


def default_domain(model: CostModel) -> dict[str, tuple[int, int]]:
    """Each subset size ranges over [1, its ground set size]."""
    grounds = {
        "ed": {"r": "n"}, "mv": {"r": "n"},
        "triangle-ambainis": {"r": "n"}, "triangle-szegedy": {"r": "n"},
        "triangle-inner": {"s": "r"},
        "alg2": {"r": "k"}, "alg3": {"r": None}, "alg4": {"r": "k", "s": "n"},
        "alg5": {"t": "m", "r": "k", "s": "n"},
        "power-walk": {"r": "k", "s": "n"},
    }[model.name]
    domain = {}
    for size, ground in grounds.items():
        if ground is None:
            hi = int(model.params["n"] * model.params["k"])
        else:
            hi = int(model.params[ground])
        domain[size] = (1, max(hi, 1))
    return domain


# ---------------------------------------------------------------------------
# Framework comparison

@dataclass(frozen=True)
class FrameworkComparison:
    szegedy: OptimizationResult
    ambainis: OptimizationResult
    check_term_ratios: tuple[tuple[int, float], ...]
    check_term_never_worse: bool


def compare_frameworks(
    setup: Callable[[Env], float],
    update: Callable[[Env], float],
    check: Callable[[Env], float],
    n: float,
    arity: int,
    domain: tuple[int, int],
) -> FrameworkComparison:
    """Same setup/update/check priced under both frameworks with delta = 1/r
    and epsilon = (r/n)^arity.

    The update terms coincide; the check terms differ by exactly r^{-1/2} in
    the ambainis framework's favor, which the ratio table certifies point by
    point over the domain.
    """
    params = {"n": n}

    def sz(sizes: Env) -> float:
        e = dict(params, **sizes)
        r = e["r"]
        factor = math.sqrt(r) * (n / r) ** (arity / 2.0)
        return setup(e) + factor * (update(e) + check(e))

    def am(sizes: Env) -> float:
        e = dict(params, **sizes)
        r = e["r"]
        base = (n / r) ** (arity / 2.0)
        return setup(e) + base * check(e) + base * math.sqrt(r) * update(e)

    box = {"r": domain}
    sz_best = optimize(sz, box)
    am_best = optimize(am, box)
    ratios = []
    ok = True
    for r in geometric_grid(domain[0], domain[1], 1.3):
        e = dict(params, r=float(r))
        c = check(e)
        if c == 0.0:
            ratios.append((r, 1.0))
            continue
        sz_term = (n / r) ** (arity / 2.0) * math.sqrt(r) * c
        am_term = (n / r) ** (arity / 2.0) * c
        ratio = am_term / sz_term
        ratios.append((r, ratio))
        ok = ok and ratio <= 1.0 + 1e-12
    return FrameworkComparison(
        szegedy=sz_best, ambainis=am_best,
        check_term_ratios=tuple(ratios), check_term_never_worse=ok,
    )


# ---------------------------------------------------------------------------
# Regime selection and error reduction

def regime_selector(k: float, n: float) -> dict:
    """Pick the cheapest of the three commutativity strategies at (k, n)."""
    if k < 1 or n < 1:
        raise InputError("k and n must be >= 1")
    costs = {
        "grover-pair": k * n ** (5.0 / 3.0),
        "set-walk": k ** (2.0 / 3.0) * n**2,
        "rowcol-simul": k ** (4.0 / 5.0) * n ** (9.0 / 5.0),
    }
    best = min(costs, key=lambda name: (costs[name], name))
    return {"best": best, "costs": costs}


def repetitions_for_half_error(epsilon: float) -> int:
    """Repetitions of a one-sided test with success probability epsilon needed
    to push the miss probability to 1/2: ceil(-1 / log2(1 - epsilon)), at least 1."""
    if not (0.0 < epsilon <= 1.0):
        raise InputError("success probability must lie in (0, 1]")
    if epsilon == 1.0:
        return 1
    return max(1, math.ceil(-1.0 / math.log2(1.0 - epsilon)))
