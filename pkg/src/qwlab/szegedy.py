"""Szegedy quantization of a Markov chain and its spectral theory.

The walk acts on the doubled space C^X (x) C^X, ordered |x>|y> with the same
state indexing as the base chain.  Lifting maps

    A = sum_x |phi_x><x|,   phi_x = sum_y sqrt(p~_xy) |x,y>
    B = sum_y |psi_y><y|,   psi_y = sum_x sqrt(p~_yx) |x,y>

define reflections R1 = 2AA^T - I about span{phi_x} and R2 = 2BB^T - I about
span{psi_y}; one walk step is W = R2 R1.  The discriminant D = A^T B has
entries sqrt(p~_xy p~_yx) and is block diagonal diag(P_M, I) under the
(unmarked, marked) ordering.  Its singular values delta_j determine the walk
spectrum: each pair of singular vectors with delta_j < 1 spans a plane that W
rotates by 2*arccos(delta_j), everything else is fixed.

Hitting-time analysis runs through the unnormalized start state
phi01 = (1/sqrt(N)) sum_{x not in M} phi_x with ||phi01||^2 = 1 - epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, InputError, InvariantViolationError
from .markov import AbsorbingChain
from .numkernel import SeededRng, svd_symmetric, sym_eig

DENSE_STATE_BUDGET = 200
DENSE_WALK_MATRIX_BUDGET = 4096
SINGULAR_CLUSTER_TOL = 1e-8


@dataclass(eq=False)
class QuantizedWalk:
    """Unitary walk W = R2 R1 on the doubled space, held via its lifting maps.

    ``lift_a`` and ``lift_b`` are explicit N^2 x N isometries, which makes the
    projector identities Pi_1 = A A^T and Pi_2 = B B^T directly checkable.  The
    walk itself is applied reflection-by-reflection; ``matrix()`` materializes
    it densely only inside a size budget.
    """

    chain: AbsorbingChain
    lift_a: np.ndarray
    lift_b: np.ndarray

    @property
    def n_states(self) -> int:
        return self.chain.n_states

    @property
    def dimension(self) -> int:
        return self.n_states**2

    def apply(self, x: np.ndarray) -> np.ndarray:
        """One walk step: reflect about span{phi_x}, then about span{psi_y}."""
        y = 2.0 * (self.lift_a @ (self.lift_a.T @ x)) - x
        return 2.0 * (self.lift_b @ (self.lift_b.T @ y)) - y

    def apply_inverse(self, x: np.ndarray) -> np.ndarray:
        y = 2.0 * (self.lift_b @ (self.lift_b.T @ x)) - x
        return 2.0 * (self.lift_a @ (self.lift_a.T @ y)) - y

    def apply_power(self, t: int, x: np.ndarray) -> np.ndarray:
        if t < 0:
            raise InputError("power must be nonnegative")
        y = np.array(x, dtype=float)
        for _ in range(t):
            y = self.apply(y)
        return y

    def matrix(self, budget: int = DENSE_WALK_MATRIX_BUDGET) -> np.ndarray:
        if self.dimension > budget:
            raise BudgetError(
                f"dense walk matrix needs dimension {self.dimension} > budget {budget}"
            )
        eye = np.eye(self.dimension)
        r1 = 2.0 * (self.lift_a @ self.lift_a.T) - eye
        r2 = 2.0 * (self.lift_b @ self.lift_b.T) - eye
        return r2 @ r1


def build_quantized_walk(chain: AbsorbingChain, max_states: int = DENSE_STATE_BUDGET) -> QuantizedWalk:
    """Construct the lifting maps from the absorbing chain and validate them."""
    n = chain.n_states
    if n > max_states:
        raise BudgetError(f"chain has {n} states, dense doubled space allows {max_states}")
    roots = np.sqrt(chain.p_tilde)
    a = np.zeros((n * n, n))
    b = np.zeros((n * n, n))
    for x in range(n):
        a[x * n : (x + 1) * n, x] = roots[x]
    for y in range(n):
        b[y::n, y] = roots[y]
    for name, lift in (("A", a), ("B", b)):
        dev = np.max(np.abs(lift.T @ lift - np.eye(n)))
        if dev > 1e-8:
            raise InvariantViolationError(f"{name} is not an isometry: |A^T A - I| = {dev:.3e}")
    walk = QuantizedWalk(chain=chain, lift_a=a, lift_b=b)
    # Spot check unitarity on deterministic probe vectors.
    probe = np.cos(np.arange(n * n, dtype=float))
    probe /= np.linalg.norm(probe)
    image = walk.apply(probe)
    if abs(np.linalg.norm(image) - 1.0) > 1e-8 or np.max(np.abs(walk.apply_inverse(image) - probe)) > 1e-8:
        raise InvariantViolationError("walk failed the unitarity spot check")
    return walk


# ---------------------------------------------------------------------------
# Discriminant spectrum

@dataclass(eq=False)
class DiscriminantSpectrum:
    """Singular triples of the discriminant and the rotation angles they induce.

    ``pm_eigenvalues`` holds the spectrum of the unmarked block P_M in
    descending order; those eigenvalues are the start state's share of the
    discriminant and pair up with the coefficients from ``start_state``.
    """

    d_matrix: np.ndarray
    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    angles: np.ndarray
    pm_eigenvalues: np.ndarray


def discriminant(chain: AbsorbingChain) -> DiscriminantSpectrum:
    """D(x,y) = sqrt(p~_xy p~_yx); block structure diag(P_M, I) is verified."""
    d = np.sqrt(chain.p_tilde * chain.p_tilde.T)
    n = chain.n_states
    order = list(chain.unmarked) + list(chain.marked.members)
    perm = d[np.ix_(order, order)]
    k = len(chain.unmarked)
    expected = np.zeros((n, n))
    expected[:k, :k] = chain.p_m
    expected[k:, k:] = np.eye(n - k)
    dev = np.max(np.abs(perm - expected)) if n else 0.0
    if dev > 1e-12:
        raise InvariantViolationError(f"discriminant deviates from diag(P_M, I) by {dev:.3e}")
    sigma, w, v = svd_symmetric(d)
    if np.any(sigma > 1.0 + 1e-10):
        raise InvariantViolationError("discriminant singular value exceeds 1")
    angles = np.arccos(np.clip(sigma, 0.0, 1.0))
    if chain.p_m.shape[0]:
        pm_values, _ = sym_eig(chain.p_m)
    else:
        pm_values = np.zeros(0)
    return DiscriminantSpectrum(
        d_matrix=d,
        singular_values=sigma,
        left_vectors=w,
        right_vectors=v,
        angles=angles,
        pm_eigenvalues=pm_values,
    )


def predicted_walk_eigenvalues(disc: DiscriminantSpectrum, dimension: int) -> np.ndarray:
    """Eigenvalue multiset of W implied by the discriminant.

    Each singular value delta < 1 contributes the rotation pair e^{+-2i arccos delta};
    delta = 1 means the two singular directions coincide in the doubled space and
    contribute a single fixed vector.  The complement of all these planes is fixed.
    """
    eigs: list[complex] = []
    used = 0
    for delta, theta in zip(disc.singular_values, disc.angles):
        if delta >= 1.0 - 1e-12:
            eigs.append(1.0 + 0.0j)
            used += 1
        else:
            eigs.extend([np.exp(2j * theta), np.exp(-2j * theta)])
            used += 2
    eigs.extend([1.0 + 0.0j] * (dimension - used))
    return np.asarray(eigs, dtype=complex)


def _canonical_phases(values: np.ndarray) -> np.ndarray:
    phases = np.angle(values)
    phases[phases < -math.pi + 1e-9] = math.pi
    return np.sort(phases)


@dataclass(eq=False)
class WalkSpectrum:
    phases: np.ndarray
    predicted_phases: np.ndarray
    max_phase_error: float


def walk_spectrum(walk: QuantizedWalk, disc: DiscriminantSpectrum, atol: float = 1e-6) -> WalkSpectrum:
    """Eigenphases of W extracted by dense diagonalization, checked against the
    discriminant's prediction.

    Degenerate singular values make individual vector pairings non-unique, so
    the check also compares invariant-subspace dimensions per distinct singular
    value cluster before matching the full phase multisets.
    """
    w = walk.matrix()
    values = np.linalg.eigvals(w)
    if np.max(np.abs(np.abs(values) - 1.0)) > 1e-8:
        raise InvariantViolationError("walk eigenvalues left the unit circle")
    extracted = _canonical_phases(values)
    predicted = _canonical_phases(predicted_walk_eigenvalues(disc, walk.dimension))

    # Per-cluster rank check: the planes of a repeated singular value must
    # together span twice the cluster size (once when delta = 1).
    start = 0
    sigma = disc.singular_values
    while start < len(sigma):
        stop = start
        while stop < len(sigma) and abs(sigma[stop] - sigma[start]) <= SINGULAR_CLUSTER_TOL:
            stop += 1
        block_a = walk.lift_a @ disc.left_vectors[:, start:stop]
        block_b = walk.lift_b @ disc.right_vectors[:, start:stop]
        stacked = np.hstack([block_a, block_b])
        rank = np.linalg.matrix_rank(stacked, tol=1e-8)
        count = stop - start
        expected = count if sigma[start] >= 1.0 - 1e-12 else 2 * count
        if rank != expected:
            raise InvariantViolationError(
                f"singular cluster at {sigma[start]:.6f} spans rank {rank}, expected {expected}"
            )
        start = stop

    err = float(np.max(np.abs(extracted - predicted))) if len(extracted) else 0.0
    if err > atol:
        raise InvariantViolationError(f"walk eigenphases deviate from prediction by {err:.3e}")
    return WalkSpectrum(phases=extracted, predicted_phases=predicted, max_phase_error=err)


# ---------------------------------------------------------------------------
# Start state and deviation times

@dataclass(eq=False)
class StartState:
    """Unnormalized start state phi01 and its expansion over the P_M eigenbasis.

    ``coefficients`` are the coefficients nu_k of phi01 / sqrt(1 - epsilon) in
    the basis {A v_k} with v_k the eigenvectors of P_M in descending eigenvalue
    order; they satisfy sum nu_k^2 = 1.  ``all_marked`` flags the epsilon = 1
    degenerate case where phi01 = 0 and no expansion exists.
    """

    vector: np.ndarray
    coefficients: np.ndarray
    epsilon: float
    all_marked: bool


def start_state(chain: AbsorbingChain, walk: QuantizedWalk | None = None) -> StartState:
    n = chain.n_states
    eps = chain.epsilon
    if walk is None:
        walk = build_quantized_walk(chain)
    if not chain.unmarked:
        return StartState(
            vector=np.zeros(n * n),
            coefficients=np.zeros(0),
            epsilon=1.0,
            all_marked=True,
        )
    u = np.zeros(n)
    u[list(chain.unmarked)] = 1.0 / math.sqrt(n)
    phi = walk.lift_a @ u
    norm_sq = float(phi @ phi)
    if abs(norm_sq - (1.0 - eps)) > 1e-10:
        raise InvariantViolationError(f"||phi01||^2 = {norm_sq}, expected {1.0 - eps}")
    _, vectors = sym_eig(chain.p_m)
    nu = vectors.T @ u[list(chain.unmarked)]
    nu = nu / math.sqrt(1.0 - eps)
    if abs(float(nu @ nu) - 1.0) > 1e-8:
        raise InvariantViolationError("start-state coefficients are not normalized")
    return StartState(vector=phi, coefficients=nu, epsilon=eps, all_marked=False)


def deviation_time_bound(disc: DiscriminantSpectrum, coefficients) -> float:
    """T = ceil(100 * sum_k nu_k^2 / theta_k) over the unmarked-block triples.

    Only the P_M part of the discriminant enters: the marked block has angle 0
    and the start state has no weight there.  Returns ``math.inf`` when there
    are no unmarked states to deviate from (epsilon = 0 never happens here; an
    all-marked chain has an empty sum and the bound degenerates to 1).
    """
    nu = np.asarray(coefficients, dtype=float)
    lam = disc.pm_eigenvalues
    if nu.shape != lam.shape:
        raise InputError(
            f"{nu.shape[0] if nu.ndim else 0} coefficients for {lam.shape[0]} unmarked triples"
        )
    if lam.size == 0:
        return 1.0
    mags = np.abs(lam)
    if np.any(mags >= 1.0):
        return math.inf
    theta = np.arccos(mags)
    return float(math.ceil(100.0 * float(np.sum(nu**2 / theta))))


def quantum_hitting_bound(pm_norm: float) -> float:
    """ceil(100 / sqrt(1 - ||P_M||)); infinite when the norm reaches 1."""
    if pm_norm >= 1.0:
        return math.inf
    if pm_norm < 0.0:
        raise InputError("||P_M|| must be nonnegative")
    return float(math.ceil(100.0 / math.sqrt(1.0 - pm_norm)))


def overlap_series(walk: QuantizedWalk, chain: AbsorbingChain, t_max: int) -> np.ndarray:
    """<phi01| W^t |phi01> for t = 0..t_max, by sequential application."""
    start = start_state(chain, walk)
    out = np.empty(t_max + 1)
    y = start.vector.copy()
    for t in range(t_max + 1):
        out[t] = float(start.vector @ y)
        if t < t_max:
            y = walk.apply(y)
    return out


def average_deviation(walk: QuantizedWalk, chain: AbsorbingChain, t_bound: int) -> float:
    """(1/(T+1)) sum_t ||W^t phi01 - phi01||^2 for the unnormalized start state."""
    if t_bound < 0:
        raise InputError("step bound must be nonnegative")
    start = start_state(chain, walk)
    total = 0.0
    y = start.vector.copy()
    for t in range(t_bound + 1):
        diff = y - start.vector
        total += float(diff @ diff)
        if t < t_bound:
            y = walk.apply(y)
    return total / (t_bound + 1)


@dataclass(eq=False)
class DeviationReport:
    t_bound: float
    avg_deviation: float
    epsilon: float
    coefficients: np.ndarray


def deviation_report(chain: AbsorbingChain, walk: QuantizedWalk | None = None, t_bound: int | None = None) -> DeviationReport:
    if walk is None:
        walk = build_quantized_walk(chain)
    start = start_state(chain, walk)
    disc = discriminant(chain)
    bound = deviation_time_bound(disc, start.coefficients)
    t = int(t_bound if t_bound is not None else (bound if math.isfinite(bound) else 0))
    avg = average_deviation(walk, chain, t)
    return DeviationReport(
        t_bound=bound if t_bound is None else float(t),
        avg_deviation=avg,
        epsilon=start.epsilon,
        coefficients=start.coefficients,
    )


# ---------------------------------------------------------------------------
# Detection (the full quantized search loop)

@dataclass(frozen=True)
class DetectionResult:
    """Aggregate outcome of repeated detection runs.

    Empirical rates come from the sampled trials; the analytic fields are the
    exact per-run probabilities the sampler draws against.
    """

    prob_found_immediately: float
    prob_detect_deviation: float
    total: float
    trials: int
    seed: int
    analytic_step2: float
    analytic_deviation_mean: float
    analytic_total: float


def detection_profile(chain: AbsorbingChain, t_bound: int, walk: QuantizedWalk | None = None) -> tuple[float, np.ndarray, float]:
    """Exact detection probabilities of the walk-until-deviation procedure.

    Step 2 finds a marked first coordinate with probability epsilon.  The
    surviving branch is the normalized phi01; after t walk steps the control
    register reads 1 with probability ||phi01_hat - W^t phi01_hat||^2 / 4.
    Returns (epsilon, per-t probabilities for t = 0..T, total success).
    """
    if t_bound < 0:
        raise InputError("step bound must be nonnegative")
    eps = chain.epsilon
    if not chain.unmarked:
        return 1.0, np.zeros(t_bound + 1), 1.0
    if walk is None:
        walk = build_quantized_walk(chain)
    start = start_state(chain, walk)
    phi_hat = start.vector / math.sqrt(1.0 - eps)
    probs = np.empty(t_bound + 1)
    y = phi_hat.copy()
    for t in range(t_bound + 1):
        diff = phi_hat - y
        probs[t] = float(diff @ diff) / 4.0
        if t < t_bound:
            y = walk.apply(y)
    total = eps + (1.0 - eps) * float(probs.mean())
    return eps, probs, total


def run_detection(
    chain: AbsorbingChain,
    t_bound: int,
    trials: int,
    rng: SeededRng,
    walk: QuantizedWalk | None = None,
    chunk_size: int = 8192,
) -> DetectionResult:
    """Sample the detection procedure: the step-2 branch and the uniform t draw
    are simulated per trial, the final control-register measurement uses the
    analytic probability for the sampled t (same distribution, lower variance).
    """
    if trials < 1:
        raise InputError("need at least one trial")
    eps, probs, total = detection_profile(chain, t_bound, walk)
    found2 = 0
    found_dev = 0
    for chunk_index, chunk_start in enumerate(range(0, trials, chunk_size)):
        count = min(chunk_size, trials - chunk_start)
        gen = rng.substream(chunk_index).generator()
        branch = gen.random(count) < eps
        ts = gen.integers(0, t_bound + 1, size=count)
        hit = gen.random(count) < probs[ts]
        found2 += int(branch.sum())
        found_dev += int((~branch & hit).sum())
    return DetectionResult(
        prob_found_immediately=found2 / trials,
        prob_detect_deviation=found_dev / trials,
        total=(found2 + found_dev) / trials,
        trials=trials,
        seed=rng.seed,
        analytic_step2=eps,
        analytic_deviation_mean=float(probs.mean()),
        analytic_total=total,
    )


# ---------------------------------------------------------------------------
# Two reflections make a rotation

def reflection_composition_angle(a, b, atol: float = 1e-10) -> float:
    """Rotation angle of (2bb^T - I)(2aa^T - I) on span{a, b}.

    The product of the two rank-one reflections rotates the plane by 2*theta
    with cos(theta) = |<a|b>|.  Parallel inputs leave no plane to rotate.
    """
    va = np.asarray(a, dtype=float)
    vb = np.asarray(b, dtype=float)
    if va.shape != vb.shape or va.ndim != 1:
        raise InputError("need two vectors of identical shape")
    na, nb = np.linalg.norm(va), np.linalg.norm(vb)
    if na < atol or nb < atol:
        raise InputError("vectors must be nonzero")
    cos_theta = abs(float(va @ vb) / (na * nb))
    if cos_theta >= 1.0 - 1e-12:
        raise InputError("vectors are parallel; the composition is the identity on their line")
    return 2.0 * math.acos(min(cos_theta, 1.0))
