"""Absorbing-chain predictions for the walk algorithms.

Each algorithm's trajectory is a product of independent Johnson walks (one per
subset parameter), and its detection event is "every factor satisfies its
membership condition at a common step".  The exact detection probability
within a step budget is therefore an absorption probability of the product
chain, computed here by masked tensor evolution: surviving mass moves one
step in every factor, then the mass sitting in the marked product region is
absorbed.  Marked fractions use exact rational arithmetic.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from ..errors import InputError
from ..markov import build_johnson_walk, johnson_spectral_gap


def superset_fraction(ground: int, size: int, pinned: int) -> Fraction:
    """Probability that a uniform size-subset of [ground] contains ``pinned``
    specified elements: C(ground - pinned, size - pinned) / C(ground, size)."""
    if pinned > size or size > ground:
        return Fraction(0)
    return Fraction(math.comb(ground - pinned, size - pinned), math.comb(ground, size))


def johnson_factor(ground: int, size: int) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    """Transition matrix and state list of one Johnson factor.

    A subset equal to its ground set cannot move; it becomes the trivial
    one-state chain, matching the frozen walk component in the algorithms.
    """
    if size == ground:
        return np.ones((1, 1)), [tuple(range(ground))]
    p = build_johnson_walk(ground, size)
    states = list(itertools.combinations(range(ground), size))
    return p.probs, states


def membership_mask(states: list[tuple[int, ...]], required) -> np.ndarray:
    want = set(required)
    return np.array([want.issubset(s) for s in states], dtype=bool)


def product_absorption_probability(
    factors: list[np.ndarray],
    masks: list[np.ndarray],
    steps: int,
    check_initial: bool = False,
) -> float:
    """P(all factor conditions hold simultaneously at some checked step).

    Starts from the uniform product distribution.  With ``check_initial`` the
    initial state is inspected before any move; otherwise only the states
    after steps 1..steps are checked, matching algorithms whose first check
    follows the first swap.
    """
    if len(factors) != len(masks) or not factors:
        raise InputError("need one mask per factor")
    if steps < 0:
        raise InputError("steps must be nonnegative")
    shape = tuple(p.shape[0] for p in factors)
    x = np.ones(shape) / float(np.prod([float(s) for s in shape]))
    marked = np.ix_(*[np.nonzero(m)[0] for m in masks])
    absorbed = 0.0
    if check_initial:
        absorbed += x[marked].sum()
        x[marked] = 0.0
    for _ in range(steps):
        for p in factors:
            x = np.tensordot(x, p, axes=([0], [0]))
        absorbed += x[marked].sum()
        x[marked] = 0.0
    return float(absorbed)


def product_spectral_gap(sizes: list[tuple[int, int]]) -> Fraction:
    """Magnitude spectral gap of a product of Johnson walks: the minimum over factors."""
    gaps = []
    for ground, size in sizes:
        if size == ground:
            gaps.append(Fraction(1))
        else:
            gaps.append(johnson_spectral_gap(ground, size))
    return min(gaps)


def step_budget(delta: Fraction, epsilon: Fraction) -> int:
    """Default walk length ceil(100 / sqrt(delta * epsilon))."""
    if delta <= 0 or epsilon <= 0:
        raise InputError("step budget needs positive gap and marked fraction")
    return math.ceil(100.0 / math.sqrt(float(delta * epsilon)))


# ---------------------------------------------------------------------------
# Per-algorithm predictions

def ed_detection_probability(n: int, r: int, pair: tuple[int, int], steps: int) -> float:
    p, states = johnson_factor(n, r)
    mask = membership_mask(states, pair)
    return product_absorption_probability([p], [mask], steps, check_initial=True)


def ed_epsilon(n: int, r: int) -> Fraction:
    return superset_fraction(n, r, 2)


def verify_occupancy_probability(n: int, r: int, cell: tuple[int, int], steps: int) -> float:
    """P(row subset holds i0 and column subset holds j0 at a checked step)."""
    p, states = johnson_factor(n, r)
    mask_rows = membership_mask(states, [cell[0]])
    mask_cols = membership_mask(states, [cell[1]])
    return product_absorption_probability([p, p], [mask_rows, mask_cols], steps)


def verify_epsilon(n: int, r: int) -> Fraction:
    return superset_fraction(n, r, 1) ** 2


def set_detection_probability(k: int, r: int, pair: tuple[int, int], steps: int) -> float:
    p, states = johnson_factor(k, r)
    mask = membership_mask(states, pair)
    return product_absorption_probability([p], [mask], steps)


def set_epsilon(k: int, r: int) -> Fraction:
    return superset_fraction(k, r, 2)


def rowcol_detection_probability(
    n: int, k: int, r: int, pair: tuple[int, int], cell: tuple[int, int], steps: int
) -> float:
    """Both rows i0 of the violating pair must be held, and both columns j0."""
    l, m = pair
    i0, j0 = cell
    p, states = johnson_factor(n * k, r)
    mask_rows = membership_mask(states, [l * n + i0, m * n + i0])
    mask_cols = membership_mask(states, [l * n + j0, m * n + j0])
    return product_absorption_probability([p, p], [mask_rows, mask_cols], steps)


def rowcol_epsilon(n: int, k: int, r: int) -> Fraction:
    return superset_fraction(n * k, r, 2) ** 2


def simul_detection_probability(
    k: int, n: int, r: int, s: int, pair: tuple[int, int], cell: tuple[int, int], steps: int
) -> float:
    p_mat, mat_states = johnson_factor(k, r)
    p_line, line_states = johnson_factor(n, s)
    masks = [
        membership_mask(mat_states, pair),
        membership_mask(line_states, [cell[0]]),
        membership_mask(line_states, [cell[1]]),
    ]
    return product_absorption_probability([p_mat, p_line, p_line], masks, steps)


def simul_epsilon(k: int, n: int, r: int, s: int) -> Fraction:
    return superset_fraction(k, r, 2) * superset_fraction(n, s, 1) ** 2


def threeparam_detection_probability(
    m: int, k: int, n: int, t: int, r: int, s: int,
    groups: tuple[int, int], members: tuple[int, int], cell: tuple[int, int], steps: int,
) -> float:
    p_set, set_states = johnson_factor(m, t)
    p_mat, mat_states = johnson_factor(k, r)
    p_line, line_states = johnson_factor(n, s)
    masks = [
        membership_mask(set_states, groups),
        membership_mask(mat_states, set(members)),
        membership_mask(line_states, [cell[0]]),
        membership_mask(line_states, [cell[1]]),
    ]
    return product_absorption_probability([p_set, p_mat, p_line, p_line], masks, steps)


def threeparam_epsilon(m: int, k: int, n: int, t: int, r: int, s: int, distinct_members: bool) -> Fraction:
    mat = superset_fraction(k, r, 2 if distinct_members else 1)
    return superset_fraction(m, t, 2) * mat * superset_fraction(n, s, 1) ** 2
