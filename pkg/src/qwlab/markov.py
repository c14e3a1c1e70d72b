"""Symmetric Markov chains, Johnson-graph walks, absorbing modification and hitting times.

A chain lives on a finite state space X with a symmetric stochastic matrix P.
Marking a subset M of X and freezing its rows yields the absorbing chain

    P~ = [ P_M  P' ]
         [ 0    I  ]

under the (unmarked, marked) ordering, where P_M is P with marked rows and
columns deleted.  The expected hitting time of M from a start distribution s is

    E(T) = s_M^T (I - P_M)^{-1} 1

which for the uniform start also has the spectral form sum_i nu_i^2 / (1 - lambda_i)
over the eigenpairs of P_M.  Both routes are implemented independently, plus a
seeded Monte-Carlo estimator, so each can serve as an oracle for the others.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ChainNotErgodicError, InputError, InvariantViolationError
from .numkernel import SeededRng, sym_eig

ROW_SUM_ATOL = 1e-10


def _support_graph(probs: np.ndarray) -> list[list[int]]:
    n = probs.shape[0]
    return [np.nonzero(probs[i] > 0.0)[0].tolist() for i in range(n)]


def _is_irreducible(adj: list[list[int]]) -> bool:
    n = len(adj)
    seen = [False] * n
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                stack.append(v)
    return count == n


def _is_aperiodic(adj: list[list[int]]) -> bool:
    # Symmetric support: aperiodic iff the support graph is not bipartite.
    # A self-loop is an odd cycle, so it fails the 2-coloring immediately.
    n = len(adj)
    color = [-1] * n
    for start in range(n):
        if color[start] != -1:
            continue
        color[start] = 0
        stack = [start]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if color[v] == -1:
                    color[v] = 1 - color[u]
                    stack.append(v)
                elif color[v] == color[u]:
                    return True
    return False


@dataclass(eq=False)
class TransitionMatrix:
    """Symmetric stochastic matrix over a finite state space.

    Validation happens on construction: nonnegative entries, unit row sums and
    symmetry within 1e-10.  Irreducibility (reachability on the support graph)
    and aperiodicity (non-bipartite support) are verified and stored as flags;
    operations that need ergodicity fail fast with ``ChainNotErgodicError``.
    """

    probs: np.ndarray
    irreducible: bool
    aperiodic: bool

    def __init__(self, probs):
        p = np.array(probs, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] < 1:
            raise InputError(f"transition matrix must be square, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise InputError("transition matrix has non-finite entries")
        if np.any(p < 0.0):
            raise InputError("transition probabilities must be nonnegative")
        row_dev = np.max(np.abs(p.sum(axis=1) - 1.0))
        if row_dev > ROW_SUM_ATOL:
            raise InputError(f"rows must sum to 1: max deviation {row_dev:.3e}")
        sym_dev = np.max(np.abs(p - p.T))
        if sym_dev > ROW_SUM_ATOL:
            raise InputError(f"transition matrix must be symmetric: max deviation {sym_dev:.3e}")
        self.probs = p
        adj = _support_graph(p)
        self.irreducible = _is_irreducible(adj)
        self.aperiodic = _is_aperiodic(adj)

    @property
    def n_states(self) -> int:
        return self.probs.shape[0]

    @property
    def ergodic(self) -> bool:
        return self.irreducible and self.aperiodic

    def require_ergodic(self, what: str) -> None:
        if not self.irreducible:
            raise ChainNotErgodicError(f"{what} requires an irreducible chain")
        if not self.aperiodic:
            raise ChainNotErgodicError(f"{what} requires an aperiodic chain")


@dataclass(frozen=True)
class MarkedSet:
    """Sorted distinct marked state indices within a state space of size ``n_states``."""

    members: tuple[int, ...]
    n_states: int

    def __init__(self, members, n_states: int):
        ms = tuple(sorted(set(int(i) for i in members)))
        if n_states < 1:
            raise InputError("state space must be nonempty")
        if ms and (ms[0] < 0 or ms[-1] >= n_states):
            raise InputError(f"marked indices must lie in [0, {n_states}), got {ms}")
        object.__setattr__(self, "members", ms)
        object.__setattr__(self, "n_states", int(n_states))

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def epsilon(self) -> float:
        return len(self.members) / self.n_states

    @property
    def is_empty(self) -> bool:
        return not self.members


@dataclass(eq=False)
class AbsorbingChain:
    """A chain with frozen marked rows, plus its unmarked principal block."""

    base: TransitionMatrix
    marked: MarkedSet
    p_tilde: np.ndarray
    p_m: np.ndarray
    unmarked: tuple[int, ...]

    @property
    def n_states(self) -> int:
        return self.base.n_states

    @property
    def epsilon(self) -> float:
        return self.marked.epsilon


def make_absorbing(p: TransitionMatrix, marked: MarkedSet) -> AbsorbingChain:
    """Freeze the rows of the marked states and cut out the unmarked block."""
    if marked.n_states != p.n_states:
        raise InputError(
            f"marked set indexes {marked.n_states} states, chain has {p.n_states}"
        )
    n = p.n_states
    p_tilde = p.probs.copy()
    for i in marked.members:
        p_tilde[i, :] = 0.0
        p_tilde[i, i] = 1.0
    unmarked = tuple(i for i in range(n) if i not in set(marked.members))
    idx = np.array(unmarked, dtype=int)
    p_m = p.probs[np.ix_(idx, idx)] if unmarked else np.zeros((0, 0))
    return AbsorbingChain(base=p, marked=marked, p_tilde=p_tilde, p_m=p_m, unmarked=unmarked)


# ---------------------------------------------------------------------------
# Johnson walks

@dataclass(frozen=True)
class JohnsonWalkSpec:
    """Walk on r-subsets of [n]; one step swaps an inside element for an outside one.

    States are indexed lexicographically, so ``subset_at`` / ``index_of`` give a
    stable rank/unrank convention for naming marked sets from element lists.
    """

    ground_size: int
    subset_size: int

    def __post_init__(self):
        n, r = self.ground_size, self.subset_size
        if n < 3:
            raise InputError(f"ground size must be >= 3 for an aperiodic walk, got {n}")
        if not (1 <= r <= n - 1):
            raise InputError(f"subset size must satisfy 1 <= r <= n-1, got r={r}, n={n}")

    @property
    def n_states(self) -> int:
        return math.comb(self.ground_size, self.subset_size)

    def subsets(self) -> list[tuple[int, ...]]:
        return list(itertools.combinations(range(self.ground_size), self.subset_size))

    def subset_at(self, index: int) -> tuple[int, ...]:
        return self.subsets()[index]

    def index_of(self, subset) -> int:
        """Lexicographic rank of an r-subset given as a sorted element tuple."""
        s = tuple(sorted(set(subset)))
        if len(s) != self.subset_size:
            raise InputError(f"expected {self.subset_size} distinct elements, got {subset}")
        n, r = self.ground_size, self.subset_size
        rank = 0
        prev = -1
        for pos, value in enumerate(s):
            if value < 0 or value >= n:
                raise InputError(f"element {value} outside [0, {n})")
            for skipped in range(prev + 1, value):
                rank += math.comb(n - skipped - 1, r - pos - 1)
            prev = value
        return rank


def build_johnson_walk(n: int, r: int) -> TransitionMatrix:
    """Transition matrix of the Johnson walk: p_ij = 1/(r(n-r)) iff |i ^ j| = 2."""
    spec = JohnsonWalkSpec(n, r)
    subsets = [frozenset(s) for s in spec.subsets()]
    size = len(subsets)
    prob = 1.0 / (r * (n - r))
    p = np.zeros((size, size))
    for i in range(size):
        for j in range(i + 1, size):
            if len(subsets[i] & subsets[j]) == r - 1:
                p[i, j] = prob
                p[j, i] = prob
    return TransitionMatrix(p)


def subsets_containing(n: int, r: int, elements) -> MarkedSet:
    """Marked set of all r-subsets of [n] that contain every given element."""
    spec = JohnsonWalkSpec(n, r)
    want = set(int(e) for e in elements)
    if any(e < 0 or e >= n for e in want):
        raise InputError(f"elements must lie in [0, {n})")
    members = [i for i, s in enumerate(spec.subsets()) if want.issubset(s)]
    return MarkedSet(members, spec.n_states)


def knuth_eigenvalues(n: int, r: int) -> list[tuple[int, int]]:
    """Eigenvalues of the Johnson adjacency matrix J_{n,r,r-1} with multiplicities.

    lambda_j = (r-j)(n-r) - j(r-j+1) for j = 0..min(r, n-r), with eigenspace
    dimension C(n,j) - C(n,j-1).  Dividing by r(n-r) gives the eigenvalues of
    the walk's transition matrix.
    """
    JohnsonWalkSpec(n, r)
    out = []
    for j in range(min(r, n - r) + 1):
        value = (r - j) * (n - r) - j * (r - j + 1)
        mult = math.comb(n, j) - (math.comb(n, j - 1) if j >= 1 else 0)
        out.append((value, mult))
    return out


def johnson_spectral_gap(n: int, r: int) -> Fraction:
    """Exact magnitude spectral gap 1 - max_{j>=1} |lambda_j| / (r(n-r)) of the walk."""
    eigs = knuth_eigenvalues(n, r)
    top = max(abs(value) for value, _ in eigs[1:])
    return 1 - Fraction(top, r * (n - r))


# ---------------------------------------------------------------------------
# Hitting times

def _check_distribution(s, n: int) -> np.ndarray:
    v = np.asarray(s, dtype=float)
    if v.shape != (n,):
        raise InputError(f"start distribution has shape {v.shape}, expected ({n},)")
    if np.any(v < 0.0) or abs(v.sum() - 1.0) > 1e-9:
        raise InputError("start distribution must be nonnegative and sum to 1")
    return v


def uniform_start(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def classical_hitting_time(chain: AbsorbingChain, s) -> float:
    """E(T) = s_M^T (I - P_M)^{-1} 1, solving the linear system rather than inverting.

    Returns ``math.inf`` when the marked set is empty (the walk never stops).
    """
    v = _check_distribution(s, chain.n_states)
    if chain.marked.is_empty:
        return math.inf
    chain.base.require_ergodic("hitting time")
    if not chain.unmarked:
        return 0.0
    idx = np.array(chain.unmarked, dtype=int)
    s_m = v[idx]
    k = chain.p_m.shape[0]
    x = np.linalg.solve(np.eye(k) - chain.p_m, np.ones(k))
    result = float(s_m @ x)
    if result < -1e-12:
        raise InvariantViolationError(f"negative hitting time {result}")
    return max(result, 0.0)


def hitting_time_spectral(chain: AbsorbingChain) -> float:
    """Uniform-start hitting time via the eigenpairs of P_M.

    Expands 1_M = (1,...,1)/sqrt(N) restricted to the unmarked states in the
    eigenbasis of P_M and returns sum_i nu_i^2 / (1 - lambda_i).
    """
    if chain.marked.is_empty:
        return math.inf
    chain.base.require_ergodic("hitting time")
    if not chain.unmarked:
        return 0.0
    values, vectors = sym_eig(chain.p_m)
    ones_m = np.ones(len(chain.unmarked)) / math.sqrt(chain.n_states)
    nu = vectors.T @ ones_m
    return float(np.sum(nu**2 / (1.0 - values)))


def monte_carlo_hitting(
    p: TransitionMatrix,
    marked: MarkedSet,
    s,
    trials: int,
    rng: SeededRng,
    max_steps: int = 1_000_000,
    chunk_size: int = 8192,
) -> tuple[float, float]:
    """Empirical mean and standard error of the first entry time into M.

    Trials are simulated in fixed-size chunks, chunk ``c`` drawing from
    ``rng.substream(c)``, so the estimate depends only on ``(seed, trials)``
    and never on how chunks are scheduled.
    """
    if marked.is_empty:
        raise InputError("Monte Carlo hitting requires a nonempty marked set")
    if trials < 1:
        raise InputError("need at least one trial")
    p.require_ergodic("Monte Carlo hitting")
    v = _check_distribution(s, p.n_states)
    marked_mask = np.zeros(p.n_states, dtype=bool)
    marked_mask[list(marked.members)] = True
    cum = np.cumsum(p.probs, axis=1)
    cum[:, -1] = 1.0

    times = np.empty(trials)
    for chunk_index, start in enumerate(range(0, trials, chunk_size)):
        count = min(chunk_size, trials - start)
        gen = rng.substream(chunk_index).generator()
        states = gen.choice(p.n_states, size=count, p=v)
        steps = np.zeros(count)
        active = ~marked_mask[states]
        while np.any(active):
            n_active = int(active.sum())
            u = gen.random(n_active)
            rows = cum[states[active]]
            states[active] = (rows < u[:, None]).sum(axis=1)
            steps[active] += 1
            if steps.max() > max_steps:
                raise InvariantViolationError(f"walk exceeded {max_steps} steps; chain may not be ergodic")
            active[active] = ~marked_mask[states[active]]
        times[start : start + count] = steps

    mean = float(times.mean())
    stderr = float(times.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean, stderr


def absorption_probability(chain: AbsorbingChain, s, steps: int, check_initial: bool = True) -> float:
    """Probability the walk has entered M within ``steps`` steps of P~ from start s.

    With ``check_initial`` the mass starting on M counts immediately (as with
    a walk that inspects its initial state); otherwise only visits at steps
    1..steps count and the surviving mass keeps moving by P in between.
    """
    if steps < 0:
        raise InputError("steps must be nonnegative")
    v = _check_distribution(s, chain.n_states)
    marked_idx = list(chain.marked.members)
    if not marked_idx:
        return 0.0
    x = v.copy()
    absorbed = 0.0
    if check_initial:
        absorbed += x[marked_idx].sum()
        x[marked_idx] = 0.0
    for _ in range(steps):
        x = x @ chain.base.probs
        absorbed += x[marked_idx].sum()
        x[marked_idx] = 0.0
    return float(absorbed)


# ---------------------------------------------------------------------------
# Spectral summary

@dataclass(eq=False)
class SpectralSummary:
    """Eigenvalues of P, the magnitude spectral gap, and the norm of P_M.

    ``spectral_gap`` is 1 minus the second largest eigenvalue magnitude; with
    the marked fraction ``epsilon`` it controls the absorbing block through
    ||P_M|| <= 1 - gap * epsilon / 2, which is asserted on construction.
    """

    eigenvalues: np.ndarray
    spectral_gap: float
    pm_norm: float
    epsilon: float


def spectral_summary(p: TransitionMatrix, marked: MarkedSet) -> SpectralSummary:
    if marked.n_states != p.n_states:
        raise InputError("marked set does not match the chain's state space")
    values, _ = sym_eig(p.probs)
    if abs(values[0] - 1.0) > 1e-8:
        raise InvariantViolationError(f"leading eigenvalue {values[0]} != 1")
    if np.max(np.abs(values)) > 1.0 + 1e-8:
        raise InvariantViolationError("eigenvalue magnitude exceeds 1")
    mags = np.sort(np.abs(values))[::-1]
    gap = 1.0 - float(mags[1]) if p.n_states >= 2 else 1.0

    if marked.is_empty:
        pm_norm = 1.0
    else:
        chain = make_absorbing(p, marked)
        if chain.p_m.shape[0] == 0:
            pm_norm = 0.0
        else:
            pm_values, _ = sym_eig(chain.p_m)
            pm_norm = float(np.max(np.abs(pm_values)))
        bound = 1.0 - gap * marked.epsilon / 2.0
        if pm_norm > bound + 1e-8:
            raise InvariantViolationError(
                f"||P_M|| = {pm_norm:.12f} exceeds 1 - gap*eps/2 = {bound:.12f}"
            )
    return SpectralSummary(
        eigenvalues=values,
        spectral_gap=gap,
        pm_norm=pm_norm,
        epsilon=marked.epsilon,
    )


# ---------------------------------------------------------------------------
# Random instances and file format

def random_chain(n: int, rng: SeededRng, diag_boost: float = 0.5) -> TransitionMatrix:
    """Random dense symmetric ergodic chain via symmetric Sinkhorn balancing."""
    if n < 1:
        raise InputError("need at least one state")
    gen = rng.generator()
    w = gen.random((n, n)) + 0.05
    w = (w + w.T) / 2.0
    w[np.diag_indices(n)] += diag_boost
    for _ in range(10_000):
        sums = w.sum(axis=1)
        if np.max(np.abs(sums - 1.0)) < 1e-14:
            break
        w /= np.sqrt(np.outer(sums, sums))
    # exact symmetrization; balancing residual is far below the 1e-10 gate
    w = (w + w.T) / 2.0
    return TransitionMatrix(w)


def random_marked(n: int, rng: SeededRng, max_fraction: float = 1.0) -> MarkedSet:
    """Random nonempty proper marked subset of [0, n)."""
    if n < 2:
        raise InputError("need at least two states for a proper marked set")
    gen = rng.generator()
    hi = max(1, min(n - 1, int(max_fraction * n)))
    size = int(gen.integers(1, hi + 1))
    members = gen.choice(n, size=size, replace=False)
    return MarkedSet(members.tolist(), n)


def save_chain(path, p: TransitionMatrix, marked: MarkedSet) -> None:
    payload = {
        "n_states": p.n_states,
        "rows": [[float(x) for x in row] for row in p.probs],
        "marked": list(marked.members),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def load_chain(path) -> tuple[TransitionMatrix, MarkedSet]:
    with open(path) as fh:
        payload = json.load(fh)
    try:
        n = int(payload["n_states"])
        rows = payload["rows"]
        marked = payload.get("marked", [])
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed chain file: {exc}") from exc
    matrix = np.asarray(rows, dtype=float)
    if matrix.shape != (n, n):
        raise InputError(f"chain file declares {n} states but rows have shape {matrix.shape}")
    p = TransitionMatrix(matrix)
    return p, MarkedSet(marked, n)
