"""Adversary-method query lower bounds: sqrt(m m' / l) and brute-force checks.

A relation R pairs 0-inputs (set A) with 1-inputs (set B).  With every x in A
related to at least m partners, every y in B to at least m', and l bounding,
over related pairs and positions where they differ, how many partners disagree
at that one position, any bounded-error algorithm needs Omega(sqrt(m m' / l))
queries.  The built-in constructions register their claimed parameter floors;
for enumerable sizes the exact minima are computed by exhaustive enumeration
and checked against the claims in the direction each claim makes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .errors import InputError

Member = tuple[int, ...]

MAX_ENUMERATED_PAIRS = 2_000_000


@dataclass(frozen=True)
class AdversaryParams:
    """Relation parameters (m, m', l) feeding the bound.

    Exact parameters of the constructions here additionally satisfy
    l <= max(m, m'); claimed floor/ceiling triples need not, since the degree
    floors are minima while l is a maximum.
    """

    m: int
    m_prime: int
    l: int

    def __post_init__(self):
        if self.m < 1 or self.m_prime < 1:
            raise InputError("m and m' must be >= 1 for a nonempty relation")
        if self.l < 1:
            raise InputError("l must be >= 1")


def adversary_bound(params: AdversaryParams) -> float:
    """sqrt(m * m' / l)."""
    return math.sqrt(params.m * params.m_prime / params.l)


@dataclass(eq=False)
class RelationSpec:
    """A relation between 0-inputs and 1-inputs, given either by a predicate
    over A x B or by a per-member neighbor generator (preferred when A x B is
    large but degrees are small)."""

    a_members: tuple[Member, ...]
    b_members: tuple[Member, ...] | None = None
    related: Callable[[Member, Member], bool] | None = None
    neighbors_of_a: Callable[[Member], Iterable[Member]] | None = None

    def pairs(self) -> list[tuple[Member, Member]]:
        if not self.a_members:
            raise InputError("relation has an empty A side")
        if self.neighbors_of_a is not None:
            out = []
            for x in self.a_members:
                for y in self.neighbors_of_a(x):
                    out.append((x, tuple(y)))
                    if len(out) > MAX_ENUMERATED_PAIRS:
                        raise InputError("enumeration budget exceeded")
            return out
        if self.related is None or self.b_members is None:
            raise InputError("relation needs either a neighbor generator or a predicate with B")
        if len(self.a_members) * len(self.b_members) > MAX_ENUMERATED_PAIRS:
            raise InputError("enumeration budget exceeded")
        return [
            (x, y)
            for x in self.a_members
            for y in self.b_members
            if self.related(x, y)
        ]


def analyze_relation_bruteforce(spec: RelationSpec) -> AdversaryParams:
    """Exact (m, m', l) by full enumeration of the relation.

    m and m' are the true minimum degrees on each side; l is the maximum over
    related pairs and differing positions of how many partners disagree there.
    Raises if the relation is empty or leaves any declared member unrelated.
    """
    pairs = list(dict.fromkeys(spec.pairs()))
    if not pairs:
        raise InputError("relation is empty; adversary parameters are undefined")
    deg_a: dict[Member, int] = {}
    deg_b: dict[Member, int] = {}
    pos_a: dict[Member, dict[int, int]] = {}
    pos_b: dict[Member, dict[int, int]] = {}
    for x, y in pairs:
        if len(x) != len(y):
            raise InputError("related members must have equal length")
        deg_a[x] = deg_a.get(x, 0) + 1
        deg_b[y] = deg_b.get(y, 0) + 1
        ca = pos_a.setdefault(x, {})
        cb = pos_b.setdefault(y, {})
        for i, (xa, ya) in enumerate(zip(x, y)):
            if xa != ya:
                ca[i] = ca.get(i, 0) + 1
                cb[i] = cb.get(i, 0) + 1

    for label, members, deg in (("A", spec.a_members, deg_a), ("B", spec.b_members, deg_b)):
        if members is not None:
            missing = [m for m in members if m not in deg]
            if missing:
                raise InputError(f"{len(missing)} members on the {label} side are unrelated")
    m = min(deg_a.values())
    m_prime = min(deg_b.values())
    l = max(
        max((max(c.values()) for c in pos_a.values()), default=0),
        max((max(c.values()) for c in pos_b.values()), default=0),
    )
    return AdversaryParams(m=m, m_prime=m_prime, l=l)


# ---------------------------------------------------------------------------
# Built-in constructions

@dataclass(eq=False)
class Construction:
    """A registered relation with its claimed parameters and, when the size
    allows enumeration, the exact ones."""

    name: str
    claimed: AdversaryParams
    bound: float
    relation: RelationSpec | None = None
    exact: AdversaryParams | None = None
    notes: dict = field(default_factory=dict)

    @property
    def verified_by_enumeration(self) -> bool:
        return self.exact is not None

    def check_claims(self) -> None:
        """Claimed floors must not exceed the exact minima; the claimed l is a
        ceiling and must not undercut the exact maximum."""
        if self.exact is None:
            raise InputError(f"construction {self.name} was not enumerated")
        if self.claimed.m > self.exact.m or self.claimed.m_prime > self.exact.m_prime:
            raise InputError(f"{self.name}: claimed degree floor exceeds the exact minimum")
        if self.claimed.l < self.exact.l:
            raise InputError(f"{self.name}: claimed l ceiling is below the exact maximum")


def _search_relation(n: int) -> RelationSpec:
    zero = tuple([0] * n)
    singles = tuple(tuple(1 if j == i else 0 for j in range(n)) for i in range(n))
    return RelationSpec(
        a_members=singles,
        b_members=(zero,),
        related=lambda x, y: sum(a != b for a, b in zip(x, y)) == 1,
    )


def search_construction(n: int, enumerate_exact: bool | None = None) -> Construction:
    if n < 1:
        raise InputError("search needs n >= 1")
    claimed = AdversaryParams(m=1, m_prime=n, l=1)
    if enumerate_exact is None:
        enumerate_exact = n <= 16
    rel = _search_relation(n) if enumerate_exact else None
    exact = analyze_relation_bruteforce(rel) if rel else None
    return Construction(
        name="search", claimed=claimed, bound=adversary_bound(claimed),
        relation=rel, exact=exact,
    )


def _balanced_matrices(n: int) -> list[tuple[int, ...]]:
    rows = [
        tuple(1 if i in ones else 0 for i in range(n))
        for ones in itertools.combinations(range(n), n // 2)
    ]
    return [tuple(x for row in combo for x in row) for combo in itertools.product(rows, repeat=n)]


def matrix_verification_construction(n: int, enumerate_exact: bool | None = None) -> Construction:
    """Balanced 0/1 matrices (all row sums n/2) against matrices with one heavy
    row; flipping a single 0 moves between the families."""
    if n < 2 or n % 2:
        raise InputError("matrix verification needs even n >= 2")
    claimed = AdversaryParams(m=n * (n // 2), m_prime=n // 2 + 1, l=1)
    if enumerate_exact is None:
        enumerate_exact = n <= 4

    rel = None
    exact = None
    if enumerate_exact:
        balanced = _balanced_matrices(n)

        def flips(x: Member):
            for pos, value in enumerate(x):
                if value == 0:
                    yield x[:pos] + (1,) + x[pos + 1 :]

        rel = RelationSpec(a_members=tuple(balanced), neighbors_of_a=flips)
        exact = analyze_relation_bruteforce(rel)
    return Construction(
        name="matrix-verification", claimed=claimed, bound=adversary_bound(claimed),
        relation=rel, exact=exact,
    )


def _edge_positions(n: int) -> dict[tuple[int, int], int]:
    return {pair: idx for idx, pair in enumerate(itertools.combinations(range(n), 2))}


def _cycles_on(vertices: tuple[int, ...]) -> list[frozenset[tuple[int, int]]]:
    """All labeled cycles on a vertex set, as edge sets (length >= 3)."""
    if len(vertices) < 3:
        return []
    first, rest = vertices[0], vertices[1:]
    seen = set()
    for perm in itertools.permutations(rest):
        order = (first,) + perm
        edges = frozenset(
            tuple(sorted((order[i], order[(i + 1) % len(order)])))
            for i in range(len(order))
        )
        seen.add(edges)
    return list(seen)


def connectivity_construction(n: int, enumerate_exact: bool | None = None) -> Construction:
    """Two disjoint cycles (each of length >= n/3) against single n-cycles,
    related when the single cycle has exactly two new edges."""
    if n < 6 or n % 3:
        raise InputError("connectivity construction needs n >= 6 divisible by 3")
    min_len = n // 3
    claimed = AdversaryParams(m=2 * n * n // 9, m_prime=n * n // 9, l=2 * n)
    if enumerate_exact is None:
        enumerate_exact = n <= 9

    rel = None
    exact = None
    if enumerate_exact:
        positions = _edge_positions(n)

        def to_member(edges: frozenset) -> Member:
            bits = [0] * len(positions)
            for e in edges:
                bits[positions[e]] = 1
            return tuple(bits)

        two_cycle_graphs = []  # (member, cycle1 edges, cycle2 edges)
        for l1 in range(min_len, n // 2 + 1):
            l2 = n - l1
            if l2 < l1 or l2 < min_len:
                continue
            for subset in itertools.combinations(range(n), l1):
                if l1 == l2 and 0 not in subset:
                    continue  # unordered split: pin vertex 0 to the first part
                rest = tuple(v for v in range(n) if v not in subset)
                for c1 in _cycles_on(subset):
                    for c2 in _cycles_on(rest):
                        two_cycle_graphs.append((to_member(c1 | c2), c1, c2))

        by_member = {member: (c1, c2) for member, c1, c2 in two_cycle_graphs}

        def neighbors(x: Member):
            c1, c2 = by_member[x]
            for e1 in c1:
                for e2 in c2:
                    a, b = e1
                    c, d = e2
                    base = (c1 | c2) - {e1, e2}
                    for add in (
                        (tuple(sorted((a, c))), tuple(sorted((b, d)))),
                        (tuple(sorted((a, d))), tuple(sorted((b, c)))),
                    ):
                        yield to_member(base | set(add))

        rel = RelationSpec(
            a_members=tuple(m for m, _, _ in two_cycle_graphs),
            neighbors_of_a=neighbors,
        )
        exact = analyze_relation_bruteforce(rel)
    return Construction(
        name="connectivity", claimed=claimed, bound=adversary_bound(claimed),
        relation=rel, exact=exact,
        notes={"min_cycle_length": min_len},
    )


def _matrices_commute(flat: Member, k: int, n: int) -> bool:
    mats = []
    for l in range(k):
        block = flat[l * n * n : (l + 1) * n * n]
        mats.append([list(block[i * n : (i + 1) * n]) for i in range(n)])

    def mul(a, b):
        return [
            [sum(a[i][x] * b[x][j] for x in range(n)) for j in range(n)]
            for i in range(n)
        ]

    for a, b in itertools.combinations(mats, 2):
        if mul(a, b) != mul(b, a):
            return False
    return True


def commutativity_construction(k: int, n: int, enumerate_exact: bool | None = None) -> Construction:
    """All-ones matrices against one entry flipped to zero: unordered search
    over k n^2 positions, giving the sqrt(k) n lower bound."""
    if k < 2 or n < 1:
        raise InputError("commutativity needs k >= 2 matrices")
    claimed = AdversaryParams(m=k * n * n, m_prime=1, l=1)
    if enumerate_exact is None:
        enumerate_exact = k * n * n <= 64

    rel = None
    exact = None
    if enumerate_exact:
        ones = tuple([1] * (k * n * n))

        def flips(x: Member):
            for pos in range(len(x)):
                y = x[:pos] + (0,) + x[pos + 1 :]
                if not _matrices_commute(y, k, n):
                    yield y

        rel = RelationSpec(a_members=(ones,), neighbors_of_a=flips)
        exact = analyze_relation_bruteforce(rel)
    return Construction(
        name="commutativity", claimed=claimed, bound=adversary_bound(claimed),
        relation=rel, exact=exact,
    )


def _msets_base(m: int, k: int, n: int) -> Member:
    entries: list[int] = []
    for i in range(1, m + 1):
        for j in range(1, k + 1):
            if i <= m // 2:
                block = [(i * j if a == b else 0) for a in range(n) for b in range(n)]
            else:
                block = [i * j] * (n * n)
            entries.extend(block)
    return tuple(entries)


def _msets_commuting_sets(flat: Member, m: int, k: int, n: int) -> bool:
    size = k * n * n
    for i in range(m):
        block = flat[i * size : (i + 1) * size]
        if not _matrices_commute(block, k, n):
            return False
    return True


def msets_construction(m: int, k: int, n: int, enumerate_exact: bool | None = None) -> Construction:
    """m matrix families, half scalar-diagonal and half constant, against one
    off-diagonal zero flipped to the diagonal value.

    The relation leaves every family internally commutative but makes the
    flipped matrix clash with the constant families, so only cross-family
    checks can see it.  The A-side degree is the exact count of flippable
    zeros, (m/2) k n (n - 1); the adversary's own multiplicity parameter is
    named m_adv to keep it apart from the family count m.
    """
    if m < 2 or m % 2 or k < 1 or n < 2:
        raise InputError("need an even number of families >= 2 and n >= 2")
    m_adv = (m // 2) * k * n * (n - 1)
    claimed = AdversaryParams(m=m_adv, m_prime=1, l=1)
    if enumerate_exact is None:
        enumerate_exact = m * k * n * n <= 64

    rel = None
    exact = None
    if enumerate_exact:
        base = _msets_base(m, k, n)
        size = k * n * n

        def flips(x: Member):
            for i in range(m // 2):
                for j in range(k):
                    for a in range(n):
                        for b in range(n):
                            if a == b:
                                continue
                            pos = i * size + j * n * n + a * n + b
                            value = (i + 1) * (j + 1)
                            y = x[:pos] + (value,) + x[pos + 1 :]
                            if not _msets_commuting_sets(y, m, k, n):
                                raise InputError("flip broke a within-family promise")
                            yield y

        rel = RelationSpec(a_members=(base,), neighbors_of_a=flips)
        exact = analyze_relation_bruteforce(rel)
    return Construction(
        name="msets", claimed=claimed, bound=adversary_bound(claimed),
        relation=rel, exact=exact,
        notes={"m_adv": m_adv},
    )


CONSTRUCTION_BUILDERS: dict[str, Callable[..., Construction]] = {
    "search": search_construction,
    "matrix-verification": matrix_verification_construction,
    "connectivity": connectivity_construction,
    "commutativity": commutativity_construction,
    "msets": msets_construction,
}


def builtin_construction(name: str, **sizes) -> Construction:
    try:
        builder = CONSTRUCTION_BUILDERS[name]
    except KeyError:
        raise InputError(
            f"unknown construction {name!r}; known: {sorted(CONSTRUCTION_BUILDERS)}"
        )
    return builder(**sizes)
