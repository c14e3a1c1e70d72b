"""Classical executions of the subset-walk search algorithms with exact query counts.

Every algorithm follows the same skeleton: set up a random subset (or several,
one per parameter), pay the documented setup queries, then walk for at most
``cfg.steps`` swap steps, paying the documented update queries per step and
running a query-free check against the held data after every step.  All checks
are sound: a reported violation carries a witness that can be re-derived from
the raw input.

Query schedules (n = matrix dimension, r/s/t = subset sizes):

    element distinctness   setup r              update 1
    product verification   setup 2rn + r^2      update 2n + 4r
    pair commutativity     setup 4rn            update 4n
    set walk               setup rn^2           update n^2
    row/column walk        setup 2rn            update 2n
    simultaneous walk      setup r(2sn - s^2)   update (2sn - s^2) + r(2(n-s) - 1)
    three-parameter walk   setup tr(2sn - s^2)  update r(2sn-s^2) + t(2sn-s^2) + tr(2(n-s)-1)

The verification walk re-queries the old scalar-register cells when erasing
them, which is where its 4r term comes from; held raw rows and columns are
cached and erased locally.  A subset equal to its whole ground set freezes
that walk component: its swap is skipped and its update term drops out.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from ..errors import InputError
from ..numkernel import SeededRng
from .instances import MatrixSetInstance, modmul
from .oracles import FunctionOracle, MatrixEntryOracle


@dataclass(frozen=True)
class WalkConfig:
    """Subset sizes, step budget, and randomness for one walk execution."""

    r: int
    steps: int
    seed: int
    s: int | None = None
    t: int | None = None
    trials: int = 1
    stream: int = 0

    def __post_init__(self):
        if self.r < 1:
            raise InputError("subset size r must be >= 1")
        if self.s is not None and self.s < 1:
            raise InputError("subset size s must be >= 1")
        if self.t is not None and self.t < 1:
            raise InputError("subset size t must be >= 1")
        if self.steps < 0:
            raise InputError("step budget must be >= 0")
        if self.trials < 1:
            raise InputError("trials must be >= 1")

    def rng(self) -> SeededRng:
        return SeededRng(self.seed, self.stream)

    def with_stream(self, stream: int) -> "WalkConfig":
        return WalkConfig(
            r=self.r, steps=self.steps, seed=self.seed,
            s=self.s, t=self.t, trials=self.trials, stream=stream,
        )


@dataclass(frozen=True)
class RunReport:
    """Outcome of a single walk execution."""

    algorithm: str
    found: bool
    witness: tuple | None
    steps_taken: int
    queries_used: int
    seed: int
    stream: int

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        if d["witness"] is not None:
            d["witness"] = list(d["witness"])
        return d


def _draw_subset(gen: np.random.Generator, ground: int, size: int) -> tuple[list[int], list[int]]:
    if size > ground:
        raise InputError(f"subset size {size} exceeds ground set size {ground}")
    inside = sorted(int(x) for x in gen.choice(ground, size=size, replace=False))
    outside = [x for x in range(ground) if x not in set(inside)]
    return inside, outside


def _swap(gen: np.random.Generator, inside: list[int], outside: list[int]) -> tuple[int, int, int]:
    """One Johnson move: uniform held slot out, uniform outside element in."""
    slot = int(gen.integers(0, len(inside)))
    opos = int(gen.integers(0, len(outside)))
    out_elem, in_elem = inside[slot], outside[opos]
    inside[slot] = in_elem
    outside[opos] = out_elem
    return slot, out_elem, in_elem


# ---------------------------------------------------------------------------
# Element distinctness

def ed_queries(r: int, steps: int) -> int:
    return r + steps


def ed_walk(oracle: FunctionOracle, cfg: WalkConfig) -> RunReport:
    """Swap walk on r-subsets of the function's domain, stopping at a collision.

    The initial subset is checked before the walk starts; afterwards each step
    queries exactly the swapped-in point.
    """
    n = oracle.domain_size
    if cfg.r > n:
        raise InputError(f"r={cfg.r} exceeds domain size {n}")
    gen = cfg.rng().generator()
    inside, outside = _draw_subset(gen, n, cfg.r)

    values: dict[int, int] = {}
    by_value: dict[int, list[int]] = {}
    collision: tuple | None = None
    for i in inside:
        v = oracle.query(i)
        values[i] = v
        bucket = by_value.setdefault(v, [])
        if bucket and collision is None:
            collision = (bucket[0], i, v)
        bucket.append(i)

    def report(found, witness, steps):
        return RunReport(
            algorithm="ed", found=found, witness=witness, steps_taken=steps,
            queries_used=oracle.query_count, seed=cfg.seed, stream=cfg.stream,
        )

    if collision is not None:
        return report(True, collision, 0)

    for step in range(1, cfg.steps + 1):
        if not outside:
            break  # whole domain held; the walk is frozen
        _, i_out, i_in = _swap(gen, inside, outside)
        old = values.pop(i_out)
        by_value[old].remove(i_out)
        if not by_value[old]:
            del by_value[old]
        v = oracle.query(i_in)
        values[i_in] = v
        bucket = by_value.setdefault(v, [])
        if bucket:
            return report(True, (bucket[0], i_in, v), step)
        bucket.append(i_in)
    return report(False, None, cfg.steps)


# ---------------------------------------------------------------------------
# Product verification and pair commutativity (random-vector registers)

def _weighted_sum(weights: np.ndarray, vectors: list[np.ndarray], p: int) -> np.ndarray:
    acc = np.zeros(vectors[0].shape[0], dtype=np.int64)
    for w, vec in zip(weights, vectors):
        acc = (acc + (int(w) * vec) % p) % p
    return acc


def _dot(a: np.ndarray, b: np.ndarray, p: int) -> int:
    return int(((a * b) % p).sum() % p)


def verify_queries(n: int, r: int, steps: int) -> int:
    return 2 * r * n + r * r + steps * (2 * n + 4 * r)


def freivalds_verify_walk(oracle: MatrixEntryOracle, cfg: WalkConfig) -> RunReport:
    """Random-vector product verification walk over row and column subsets.

    Holds u A|_S, B|^T v and the scalar u C|_S^T v for random u, v; a step
    swaps one row of A and one column of B and rewrites the registers.  The
    scalar register's old cells are re-queried when erased, the raw rows and
    columns are cached, giving the 2n + 4r update schedule.
    """
    if oracle.k != 3:
        raise InputError("verification expects exactly the matrices [A, B, C]")
    n, p, r = oracle.n, oracle.modulus, cfg.r
    if r > n:
        raise InputError(f"r={r} exceeds dimension {n}")
    gen = cfg.rng().generator()
    s_rows, s_out = _draw_subset(gen, n, r)
    t_cols, t_out = _draw_subset(gen, n, r)
    u = gen.integers(0, p, size=r).astype(np.int64)
    v = gen.integers(0, p, size=r).astype(np.int64)

    rows_a = [oracle.query_row(i, 0) for i in s_rows]
    cols_b = [oracle.query_col(j, 1) for j in t_cols]
    ua = _weighted_sum(u, rows_a, p)
    bv = _weighted_sum(v, cols_b, p)
    ucv = 0
    for a, i in enumerate(s_rows):
        row_c = oracle.query_cells([(i, j) for j in t_cols], 2)
        ucv = (ucv + int(u[a]) * _dot(row_c, v, p)) % p

    def report(found, witness, steps):
        return RunReport(
            algorithm="verify", found=found, witness=witness, steps_taken=steps,
            queries_used=oracle.query_count, seed=cfg.seed, stream=cfg.stream,
        )

    for step in range(1, cfg.steps + 1):
        if s_out:  # r < n, otherwise the walk is frozen and only checks
            slot_a, i_out, i_in = _swap(gen, s_rows, s_out)
            slot_b, j_out, j_in = _swap(gen, t_cols, t_out)
            t_old = list(t_cols)
            t_old[slot_b] = j_out

            new_row = oracle.query_row(i_in, 0)
            ua = (ua - (int(u[slot_a]) * rows_a[slot_a]) % p + (int(u[slot_a]) * new_row) % p) % p
            rows_a[slot_a] = new_row
            new_col = oracle.query_col(j_in, 1)
            bv = (bv - (int(v[slot_b]) * cols_b[slot_b]) % p + (int(v[slot_b]) * new_col) % p) % p
            cols_b[slot_b] = new_col

            # scalar register: erase the old row/column contributions
            # (re-query), then write the new ones
            old_row_c = oracle.query_cells([(i_out, j) for j in t_old], 2)
            ucv = (ucv - int(u[slot_a]) * _dot(old_row_c, v, p)) % p
            new_row_c = oracle.query_cells([(i_in, j) for j in t_old], 2)
            ucv = (ucv + int(u[slot_a]) * _dot(new_row_c, v, p)) % p
            old_col_c = oracle.query_cells([(i, j_out) for i in s_rows], 2)
            ucv = (ucv - int(v[slot_b]) * _dot(old_col_c, u, p)) % p
            new_col_c = oracle.query_cells([(i, j_in) for i in s_rows], 2)
            ucv = (ucv + int(v[slot_b]) * _dot(new_col_c, u, p)) % p

        lhs = _dot(ua, bv, p)
        if lhs != ucv:
            witness = (tuple(s_rows), tuple(t_cols), tuple(int(x) for x in u),
                       tuple(int(x) for x in v), lhs, ucv)
            return report(True, witness, step)
    return report(False, None, cfg.steps)


def pair_queries(n: int, r: int, steps: int) -> int:
    return 4 * r * n + steps * 4 * n


def pair_commute_walk(oracle: MatrixEntryOracle, cfg: WalkConfig) -> RunReport:
    """Commutativity test for one pair: compare u A|_S B|^T v with u B|_S A|^T v.

    Both sides need rows and columns of both matrices, so the walk holds four
    register families; setup costs 4rn and each step queries the four swapped
    lines (4n).
    """
    if oracle.k != 2:
        raise InputError("pair commutativity expects exactly the matrices [A, B]")
    n, p, r = oracle.n, oracle.modulus, cfg.r
    if r > n:
        raise InputError(f"r={r} exceeds dimension {n}")
    gen = cfg.rng().generator()
    s_rows, s_out = _draw_subset(gen, n, r)
    t_cols, t_out = _draw_subset(gen, n, r)
    u = gen.integers(0, p, size=r).astype(np.int64)
    v = gen.integers(0, p, size=r).astype(np.int64)

    rows_a = [oracle.query_row(i, 0) for i in s_rows]
    rows_b = [oracle.query_row(i, 1) for i in s_rows]
    cols_a = [oracle.query_col(j, 0) for j in t_cols]
    cols_b = [oracle.query_col(j, 1) for j in t_cols]
    ua = _weighted_sum(u, rows_a, p)
    ub = _weighted_sum(u, rows_b, p)
    av = _weighted_sum(v, cols_a, p)
    bv = _weighted_sum(v, cols_b, p)

    def report(found, witness, steps):
        return RunReport(
            algorithm="pair", found=found, witness=witness, steps_taken=steps,
            queries_used=oracle.query_count, seed=cfg.seed, stream=cfg.stream,
        )

    def check():
        lhs = _dot(ua, bv, p)
        rhs = _dot(ub, av, p)
        return lhs, rhs

    def replace_row(mat: int, rows: list, acc: np.ndarray, slot: int, i_in: int) -> np.ndarray:
        new_row = oracle.query_row(i_in, mat)
        acc = (acc - (int(u[slot]) * rows[slot]) % p + (int(u[slot]) * new_row) % p) % p
        rows[slot] = new_row
        return acc

    def replace_col(mat: int, cols: list, acc: np.ndarray, slot: int, j_in: int) -> np.ndarray:
        new_col = oracle.query_col(j_in, mat)
        acc = (acc - (int(v[slot]) * cols[slot]) % p + (int(v[slot]) * new_col) % p) % p
        cols[slot] = new_col
        return acc

    for step in range(1, cfg.steps + 1):
        if s_out:  # r < n, otherwise the walk is frozen and only checks
            slot_a, _, i_in = _swap(gen, s_rows, s_out)
            slot_b, _, j_in = _swap(gen, t_cols, t_out)
            ua = replace_row(0, rows_a, ua, slot_a, i_in)
            ub = replace_row(1, rows_b, ub, slot_a, i_in)
            av = replace_col(0, cols_a, av, slot_b, j_in)
            bv = replace_col(1, cols_b, bv, slot_b, j_in)
        lhs, rhs = check()
        if lhs != rhs:
            witness = (tuple(s_rows), tuple(t_cols), tuple(int(x) for x in u),
                       tuple(int(x) for x in v), lhs, rhs)
            return report(True, witness, step)
    return report(False, None, cfg.steps)


# ---------------------------------------------------------------------------
# Whole-matrix set walk

def set_queries(n: int, r: int, steps: int) -> int:
    return r * n * n + steps * n * n


def commute_set_walk(instance: MatrixSetInstance, cfg: WalkConfig) -> RunReport:
    """Walk over r-subsets of the k matrices, querying each held matrix in full.

    The check multiplies held submatrices and costs no queries.  A violating
    pair inside the initial subset is reported at the first in-loop check.
    """
    oracle = MatrixEntryOracle(instance.matrices, instance.p)
    k, n, p, r = oracle.k, oracle.n, oracle.modulus, cfg.r
    if r > k:
        raise InputError(f"r={r} exceeds matrix count {k}")
    gen = cfg.rng().generator()
    inside, outside = _draw_subset(gen, k, r)

    def query_matrix(l: int) -> np.ndarray:
        return np.vstack([oracle.query_row(i, l) for i in range(n)])

    held = {l: query_matrix(l) for l in inside}
    # the commutation status of a held pair is a pure function of its (already
    # queried) data, so it is computed once per run and reused across steps
    pair_commutes: dict[frozenset, bool] = {}

    def commutes(a: int, b: int) -> bool:
        key = frozenset((a, b))
        if key not in pair_commutes:
            pair_commutes[key] = not np.any(
                modmul(held[a], held[b], p) != modmul(held[b], held[a], p)
            )
        return pair_commutes[key]

    def violating_pair():
        members = sorted(held)
        for ai in range(len(members)):
            for bi in range(ai + 1, len(members)):
                if not commutes(members[ai], members[bi]):
                    return members[ai], members[bi]
        return None

    def report(found, witness, steps):
        return RunReport(
            algorithm="set", found=found, witness=witness, steps_taken=steps,
            queries_used=oracle.query_count, seed=cfg.seed, stream=cfg.stream,
        )

    for step in range(1, cfg.steps + 1):
        if r < k:
            _, l_out, l_in = _swap(gen, inside, outside)
            del held[l_out]
            held[l_in] = query_matrix(l_in)
        bad = violating_pair()
        if bad is not None:
            return report(True, bad, step)
    return report(False, None, cfg.steps)


# ---------------------------------------------------------------------------
# Separate row/column token walk

def rowcol_queries(n: int, r: int, steps: int) -> int:
    return 2 * r * n + steps * 2 * n


def commute_rowcol_walk(instance: MatrixSetInstance, cfg: WalkConfig) -> RunReport:
    """Two walks over row tokens (i, l) and column tokens (j, m) of all k matrices.

    A candidate pair is checkable only when all four lines M_{i,l}, M^{j,m},
    M_{i,m}, M^{j,l} are among the held tokens; the check then compares the
    two scalar products without further queries.
    """
    oracle = MatrixEntryOracle(instance.matrices, instance.p)
    k, n, p, r = oracle.k, oracle.n, oracle.modulus, cfg.r
    tokens = n * k
    if r > tokens:
        raise InputError(f"r={r} exceeds token count {tokens}")
    gen = cfg.rng().generator()
    row_tokens, row_out = _draw_subset(gen, tokens, r)
    col_tokens, col_out = _draw_subset(gen, tokens, r)

    def split(token: int) -> tuple[int, int]:
        return token % n, token // n

    row_data = {}
    for tok in row_tokens:
        i, l = split(tok)
        row_data[(i, l)] = oracle.query_row(i, l)
    col_data = {}
    for tok in col_tokens:
        j, m = split(tok)
        col_data[(j, m)] = oracle.query_col(j, m)

    def violating_quadruple():
        for (i, l), row_il in row_data.items():
            for (j, m), col_jm in col_data.items():
                if l == m:
                    continue
                if (i, m) not in row_data or (j, l) not in col_data:
                    continue
                lhs = _dot(row_il, col_jm, p)
                rhs = _dot(row_data[(i, m)], col_data[(j, l)], p)
                if lhs != rhs:
                    return (l, m, i, j, lhs, rhs)
        return None

    def report(found, witness, steps):
        return RunReport(
            algorithm="rowcol", found=found, witness=witness, steps_taken=steps,
            queries_used=oracle.query_count, seed=cfg.seed, stream=cfg.stream,
        )

    for step in range(1, cfg.steps + 1):
        if r < tokens:
            _, tok_out, tok_in = _swap(gen, row_tokens, row_out)
            del row_data[split(tok_out)]
            i, l = split(tok_in)
            row_data[(i, l)] = oracle.query_row(i, l)
            _, tok_out, tok_in = _swap(gen, col_tokens, col_out)
            del col_data[split(tok_out)]
            j, m = split(tok_in)
            col_data[(j, m)] = oracle.query_col(j, m)
        bad = violating_quadruple()
        if bad is not None:
            return report(True, bad, step)
    return report(False, None, cfg.steps)


# ---------------------------------------------------------------------------
# Simultaneous walk over matrices and row/column indices

def _held_cell_count(n: int, s: int) -> int:
    return 2 * s * n - s * s


def simul_queries(n: int, k: int, r: int, s: int, steps: int) -> int:
    per_step = (_held_cell_count(n, s) if r < k else 0)
    per_step += r * (2 * (n - s) - 1) if s < n else 0
    return r * _held_cell_count(n, s) + steps * per_step


class _SubmatrixStore:
    """Held rows and columns of one matrix; queries only cells not yet held."""

    def __init__(self, oracle: MatrixEntryOracle, label: int, rows: list[int], cols: list[int]):
        self.oracle = oracle
        self.label = label
        self.rows: dict[int, np.ndarray] = {}
        self.cols: dict[int, np.ndarray] = {}
        n = oracle.n
        for i in rows:
            self.rows[i] = oracle.query_row(i, label)
        row_set = set(rows)
        for j in cols:
            col = np.zeros(n, dtype=np.int64)
            missing = [x for x in range(n) if x not in row_set]
            if missing:
                col[missing] = oracle.query_cells([(x, j) for x in missing], label)
            for x in row_set:
                col[x] = self.rows[x][j]
            self.cols[j] = col

    def swap_lines(self, i_out: int, i_in: int, j_out: int, j_in: int) -> None:
        """Replace one held row and column, querying only the uncovered cells."""
        n = self.oracle.n
        old_cols = set(self.cols)
        new_row = np.zeros(n, dtype=np.int64)
        missing = [y for y in range(n) if y not in old_cols]
        if missing:
            new_row[missing] = self.oracle.query_cells([(i_in, y) for y in missing], self.label)
        for y in old_cols:
            new_row[y] = self.cols[y][i_in]

        old_rows = set(self.rows)
        new_col = np.zeros(n, dtype=np.int64)
        missing_col = [x for x in range(n) if x not in old_rows and x != i_in]
        if missing_col:
            new_col[missing_col] = self.oracle.query_cells(
                [(x, j_in) for x in missing_col], self.label
            )
        for x in old_rows:
            new_col[x] = self.rows[x][j_in]
        new_col[i_in] = new_row[j_in]

        del self.rows[i_out]
        del self.cols[j_out]
        self.rows[i_in] = new_row
        self.cols[j_in] = new_col


def commute_simul_walk(instance: MatrixSetInstance, cfg: WalkConfig) -> RunReport:
    """Simultaneous walk: an r-subset of matrices and s-subsets of rows and columns.

    Each step swaps one matrix (querying its held lines), then one row and one
    column index shared by every held matrix.  Checking multiplies held rows
    against held columns for every pair in the subset, query-free.
    """
    if cfg.s is None:
        raise InputError("simultaneous walk needs a row/column subset size s")
    oracle = MatrixEntryOracle(instance.matrices, instance.p)
    k, n, p, r, s = oracle.k, oracle.n, oracle.modulus, cfg.r, cfg.s
    if r > k or s > n:
        raise InputError(f"sizes r={r}, s={s} exceed ground sets k={k}, n={n}")
    gen = cfg.rng().generator()
    mats, mats_out = _draw_subset(gen, k, r)
    rows, rows_out = _draw_subset(gen, n, s)
    cols, cols_out = _draw_subset(gen, n, s)
    held = {l: _SubmatrixStore(oracle, l, rows, cols) for l in mats}
    # a cell check reads only held lines, which are fixed instance data, so
    # its outcome is cached per (pair, cell) for the run
    cell_cache: dict[tuple, tuple[int, int]] = {}

    def cell_check(a: int, b: int, i: int, j: int) -> tuple[int, int]:
        key = (a, b, i, j)
        if key not in cell_cache:
            lhs = _dot(held[a].rows[i], held[b].cols[j], p)
            rhs = _dot(held[b].rows[i], held[a].cols[j], p)
            cell_cache[key] = (lhs, rhs)
        return cell_cache[key]

    def violating():
        members = sorted(held)
        for ai in range(len(members)):
            for bi in range(ai + 1, len(members)):
                a, b = members[ai], members[bi]
                for i in rows:
                    for j in cols:
                        lhs, rhs = cell_check(a, b, i, j)
                        if lhs != rhs:
                            return (a, b, i, j, lhs, rhs)
        return None

    def report(found, witness, steps):
        return RunReport(
            algorithm="simul", found=found, witness=witness, steps_taken=steps,
            queries_used=oracle.query_count, seed=cfg.seed, stream=cfg.stream,
        )

    for step in range(1, cfg.steps + 1):
        if r < k:
            _, l_out, l_in = _swap(gen, mats, mats_out)
            del held[l_out]
            held[l_in] = _SubmatrixStore(oracle, l_in, rows, cols)
        if s < n:
            _, i_out, i_in = _swap(gen, rows, rows_out)
            _, j_out, j_in = _swap(gen, cols, cols_out)
            for store in held.values():
                store.swap_lines(i_out, i_in, j_out, j_in)
        bad = violating()
        if bad is not None:
            return report(True, bad, step)
    return report(False, None, cfg.steps)


# ---------------------------------------------------------------------------
# Three-parameter walk over grouped matrix sets

def threeparam_queries(n: int, k: int, m: int, t: int, r: int, s: int, steps: int) -> int:
    cells = _held_cell_count(n, s)
    per_step = (r * cells if t < m else 0)
    per_step += t * cells if r < k else 0
    per_step += t * r * (2 * (n - s) - 1) if s < n else 0
    return t * r * cells + steps * per_step


def commute_3param_walk(instance: MatrixSetInstance, cfg: WalkConfig) -> RunReport:
    """Walk over set, matrix, and row/column subsets of a grouped instance.

    Groups are promised internally commutative; the promise is validated on
    the raw instance before the walk starts and a violation raises instead of
    counting as a detection.  The check covers cross-group pairs only.
    """
    if cfg.s is None or cfg.t is None:
        raise InputError("three-parameter walk needs sizes t, r and s")
    if instance.groups is None:
        raise InputError("three-parameter walk needs a grouped instance")
    instance.validate_group_promise()
    oracle = MatrixEntryOracle(instance.matrices, instance.p)
    m = len(instance.groups)
    k = len(instance.groups[0])
    if any(len(g) != k for g in instance.groups):
        raise InputError("all groups must have equal size")
    n, p = oracle.n, oracle.modulus
    t, r, s = cfg.t, cfg.r, cfg.s
    if t > m or r > k or s > n:
        raise InputError(f"sizes t={t}, r={r}, s={s} exceed ground sets m={m}, k={k}, n={n}")
    gen = cfg.rng().generator()
    sets, sets_out = _draw_subset(gen, m, t)
    mats, mats_out = _draw_subset(gen, k, r)
    rows, rows_out = _draw_subset(gen, n, s)
    cols, cols_out = _draw_subset(gen, n, s)

    def store_for(g: int, j: int) -> _SubmatrixStore:
        return _SubmatrixStore(oracle, instance.groups[g][j], rows, cols)

    held = {(g, j): store_for(g, j) for g in sets for j in mats}
    cell_cache: dict[tuple, tuple[int, int]] = {}

    def cell_check(sa: _SubmatrixStore, sb: _SubmatrixStore, i: int, j: int) -> tuple[int, int]:
        key = (sa.label, sb.label, i, j)
        if key not in cell_cache:
            lhs = _dot(sa.rows[i], sb.cols[j], p)
            rhs = _dot(sb.rows[i], sa.cols[j], p)
            cell_cache[key] = (lhs, rhs)
        return cell_cache[key]

    def violating():
        keys = sorted(held)
        for ai in range(len(keys)):
            for bi in range(ai + 1, len(keys)):
                (g1, j1), (g2, j2) = keys[ai], keys[bi]
                if g1 == g2:
                    continue
                sa, sb = held[(g1, j1)], held[(g2, j2)]
                for i in rows:
                    for j in cols:
                        lhs, rhs = cell_check(sa, sb, i, j)
                        if lhs != rhs:
                            return (sa.label, sb.label, i, j, lhs, rhs)
        return None

    def report(found, witness, steps):
        return RunReport(
            algorithm="threeparam", found=found, witness=witness, steps_taken=steps,
            queries_used=oracle.query_count, seed=cfg.seed, stream=cfg.stream,
        )

    for step in range(1, cfg.steps + 1):
        if t < m:
            _, g_out, g_in = _swap(gen, sets, sets_out)
            for j in mats:
                del held[(g_out, j)]
                held[(g_in, j)] = store_for(g_in, j)
        if r < k:
            _, j_out, j_in = _swap(gen, mats, mats_out)
            for g in sets:
                del held[(g, j_out)]
                held[(g, j_in)] = store_for(g, j_in)
        if s < n:
            _, i_out, i_in = _swap(gen, rows, rows_out)
            _, c_out, c_in = _swap(gen, cols, cols_out)
            for store in held.values():
                store.swap_lines(i_out, i_in, c_out, c_in)
        bad = violating()
        if bad is not None:
            return report(True, bad, step)
    return report(False, None, cfg.steps)
