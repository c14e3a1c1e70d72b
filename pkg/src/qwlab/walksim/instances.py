"""Instance containers and generators for the walk algorithms.

All matrix arithmetic is over Z_p for a configurable prime p, so equality
tests are exact and a reported violation can always be re-derived from the
raw data.  Commuting instances are built from structures that commute by
construction (simultaneous diagonal matrices, polynomials in one matrix,
scalar matrices); planted violations change a single off-pattern entry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..errors import InputError, PromiseViolationError
from ..numkernel import SeededRng

DEFAULT_MODULUS = 2**31 - 1


def modmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Matrix product over Z_p, reducing after every rank-one term so that
    intermediates stay below p^2 and never overflow int64."""
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for x in range(a.shape[1]):
        out = (out + (a[:, x : x + 1] * b[x : x + 1, :]) % p) % p
    return out


def _check_prime(p: int) -> int:
    if p < 2:
        raise InputError(f"modulus must be a prime >= 2, got {p}")
    d = 2
    while d * d <= p:
        if p % d == 0:
            raise InputError(f"modulus {p} is not prime (divisible by {d})")
        d += 1
    return int(p)


@dataclass(eq=False)
class MatrixSetInstance:
    """k square matrices of size n over Z_p, optionally partitioned into groups.

    ``planted`` describes the generator's intent ("none", or a dict naming the
    violating pair and cell); it is metadata for tests and predictions, never
    consulted by the algorithms themselves.
    """

    p: int
    matrices: list[np.ndarray]
    groups: list[list[int]] | None = None
    planted: dict | None = None

    def __post_init__(self):
        self.p = _check_prime(self.p)
        mats = [np.asarray(m, dtype=np.int64) % self.p for m in self.matrices]
        if not mats:
            raise InputError("instance needs at least one matrix")
        n = mats[0].shape[0]
        for m in mats:
            if m.shape != (n, n):
                raise InputError("all matrices must be square with one shape")
        self.matrices = mats
        if self.groups is not None:
            flat = sorted(i for g in self.groups for i in g)
            if flat != list(range(len(mats))):
                raise InputError("groups must partition the matrix indices")

    @property
    def k(self) -> int:
        return len(self.matrices)

    @property
    def n(self) -> int:
        return self.matrices[0].shape[0]

    def commutator(self, a: int, b: int) -> np.ndarray:
        ma, mb = self.matrices[a], self.matrices[b]
        return (modmul(ma, mb, self.p) - modmul(mb, ma, self.p)) % self.p

    def validate_group_promise(self) -> None:
        """Every within-group pair must commute exactly; raises otherwise."""
        if self.groups is None:
            raise InputError("instance has no group structure")
        for g in self.groups:
            for ai in range(len(g)):
                for bi in range(ai + 1, len(g)):
                    if np.any(self.commutator(g[ai], g[bi])):
                        raise PromiseViolationError(
                            f"matrices {g[ai]} and {g[bi]} in one group do not commute"
                        )


# ---------------------------------------------------------------------------
# Function instances

def injective_function(n: int, rng: SeededRng, value_range: int | None = None) -> tuple[int, ...]:
    gen = rng.generator()
    m = value_range if value_range is not None else 4 * n
    if m < n:
        raise InputError("value range too small for an injective function")
    return tuple(int(v) for v in gen.choice(m, size=n, replace=False))

def planted_collision_function(n: int, rng: SeededRng) -> tuple[tuple[int, ...], tuple[int, int]]:
    """Injective except for one uniformly placed colliding pair."""
    if n < 2:
        raise InputError("need n >= 2 to plant a collision")
    gen = rng.generator()
    values = list(gen.choice(4 * n, size=n, replace=False))
    i, j = sorted(int(x) for x in gen.choice(n, size=2, replace=False))
    values[j] = values[i]
    return tuple(int(v) for v in values), (i, j)


# ---------------------------------------------------------------------------
# Matrix instances

def _random_diagonal(n: int, p: int, gen: np.random.Generator) -> np.ndarray:
    return np.diag(gen.integers(0, p, size=n)).astype(np.int64)


def commuting_matrix_set(
    k: int, n: int, rng: SeededRng, p: int = DEFAULT_MODULUS, style: str = "diagonal"
) -> MatrixSetInstance:
    """k matrices that commute exactly: simultaneous diagonals, or polynomials
    in one random matrix."""
    gen = rng.generator()
    if style == "diagonal":
        mats = [_random_diagonal(n, p, gen) for _ in range(k)]
    elif style == "poly":
        base = gen.integers(0, p, size=(n, n)).astype(np.int64)
        mats = []
        for _ in range(k):
            coeffs = gen.integers(0, p, size=3)
            acc = (int(coeffs[0]) * np.eye(n, dtype=np.int64)) % p
            power = np.eye(n, dtype=np.int64)
            for c in coeffs[1:]:
                power = modmul(power, base, p)
                acc = (acc + int(c) * power) % p
            mats.append(acc)
    else:
        raise InputError(f"unknown commuting style {style!r}")
    return MatrixSetInstance(p=p, matrices=mats, planted={"kind": "none"})


def planted_pair_matrix_set(
    k: int, n: int, rng: SeededRng, p: int = DEFAULT_MODULUS
) -> MatrixSetInstance:
    """Diagonal family with one off-diagonal defect: exactly one pair fails to
    commute, and its commutator is nonzero in exactly one cell.

    Matrix ``a`` is a diagonal with two distinct entries at positions i0, j0;
    matrix ``b`` adds a single off-diagonal entry at (i0, j0); every other
    matrix is a scalar multiple of the identity, hence commutes with both.
    """
    if k < 2 or n < 2:
        raise InputError("need k >= 2 and n >= 2 to plant a violation")
    gen = rng.generator()
    a_idx, b_idx = sorted(int(x) for x in gen.choice(k, size=2, replace=False))
    i0, j0 = sorted(int(x) for x in gen.choice(n, size=2, replace=False))
    diag = gen.integers(0, p, size=n).astype(np.int64)
    if diag[i0] == diag[j0]:
        diag[j0] = (diag[j0] + 1) % p
    defect = int(gen.integers(1, p))
    mats = []
    for idx in range(k):
        if idx == a_idx:
            mats.append(np.diag(diag).astype(np.int64))
        elif idx == b_idx:
            m = (int(gen.integers(0, p)) * np.eye(n, dtype=np.int64)) % p
            m[i0, j0] = defect
            mats.append(m)
        else:
            mats.append((int(gen.integers(0, p)) * np.eye(n, dtype=np.int64)) % p)
    return MatrixSetInstance(
        p=p,
        matrices=mats,
        planted={"kind": "pair", "pair": (a_idx, b_idx), "cell": (i0, j0)},
    )


def verification_triple(
    n: int, rng: SeededRng, p: int = DEFAULT_MODULUS, defect: bool = False
) -> MatrixSetInstance:
    """Matrices [A, B, C] with C = AB mod p, optionally off by one entry."""
    gen = rng.generator()
    a = gen.integers(0, p, size=(n, n)).astype(np.int64)
    b = gen.integers(0, p, size=(n, n)).astype(np.int64)
    c = modmul(a, b, p)
    planted = {"kind": "none"}
    if defect:
        i0, j0 = int(gen.integers(0, n)), int(gen.integers(0, n))
        c[i0, j0] = (c[i0, j0] + int(gen.integers(1, p))) % p
        planted = {"kind": "entry", "cell": (i0, j0)}
    return MatrixSetInstance(p=p, matrices=[a, b, c], planted=planted)


def grouped_matrix_set(
    m: int,
    k: int,
    n: int,
    rng: SeededRng,
    p: int = DEFAULT_MODULUS,
    violation: bool = False,
) -> MatrixSetInstance:
    """m groups of k matrices, commuting within each group.

    Without a violation every matrix is scalar, so all mk matrices commute.
    With one, group g1 gets a diagonal matrix and group g2 gets a matrix with
    one off-diagonal defect; the only non-commuting pair crosses those groups.
    """
    if m < 2:
        raise InputError("need at least two groups")
    gen = rng.generator()
    mats = [(int(gen.integers(0, p)) * np.eye(n, dtype=np.int64)) % p for _ in range(m * k)]
    groups = [list(range(g * k, (g + 1) * k)) for g in range(m)]
    planted = {"kind": "none"}
    if violation:
        if k < 1 or n < 2:
            raise InputError("need n >= 2 to plant a violation")
        g1, g2 = sorted(int(x) for x in gen.choice(m, size=2, replace=False))
        j1 = int(gen.integers(0, k))
        j2 = int(gen.integers(0, k)) if k > 1 else 0
        i0, j0 = sorted(int(x) for x in gen.choice(n, size=2, replace=False))
        diag = gen.integers(0, p, size=n).astype(np.int64)
        if diag[i0] == diag[j0]:
            diag[j0] = (diag[j0] + 1) % p
        mats[g1 * k + j1] = np.diag(diag).astype(np.int64)
        with_defect = (int(gen.integers(0, p)) * np.eye(n, dtype=np.int64)) % p
        with_defect[i0, j0] = int(gen.integers(1, p))
        mats[g2 * k + j2] = with_defect
        planted = {
            "kind": "cross-group",
            "groups": (g1, g2),
            "members": (j1, j2),
            "cell": (i0, j0),
        }
    return MatrixSetInstance(p=p, matrices=mats, groups=groups, planted=planted)


# ---------------------------------------------------------------------------
# File format

def save_matrix_set(path, instance: MatrixSetInstance) -> None:
    payload = {
        "p": instance.p,
        "k": instance.k,
        "n": instance.n,
        "matrices": [[[int(x) for x in row] for row in m] for m in instance.matrices],
    }
    if instance.groups is not None:
        payload["groups"] = instance.groups
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def load_matrix_set(path) -> MatrixSetInstance:
    with open(path) as fh:
        payload = json.load(fh)
    try:
        p = int(payload["p"])
        k = int(payload["k"])
        n = int(payload["n"])
        matrices = payload["matrices"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed matrix-set file: {exc}") from exc
    if len(matrices) != k:
        raise InputError(f"file declares k={k} but holds {len(matrices)} matrices")
    mats = [np.asarray(m, dtype=np.int64) for m in matrices]
    for m in mats:
        if m.shape != (n, n):
            raise InputError(f"matrix shape {m.shape} does not match n={n}")
    return MatrixSetInstance(p=p, matrices=mats, groups=payload.get("groups"))


def save_function_instance(path, values) -> None:
    with open(path, "w") as fh:
        json.dump({"kind": "function", "values": [int(v) for v in values]}, fh, sort_keys=True)
        fh.write("\n")


def load_function_instance(path) -> tuple[int, ...]:
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("kind") != "function" or "values" not in payload:
        raise InputError("malformed function-instance file")
    return tuple(int(v) for v in payload["values"])
