"""Dense symmetric linear algebra and seeded randomness shared by all modules.

Everything here is a pure function of its inputs.  Matrices are plain numpy
arrays; helpers validate shape, finiteness and symmetry at the entry points
so downstream modules can assume clean data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

SYMMETRY_ATOL = 1e-10
UNITARY_ATOL = 1e-8


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a dense 2-d float/complex array with finite entries."""
    a = np.asarray(m)
    if a.dtype.kind not in "fc":
        a = a.astype(float)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InputError(f"{name} must be a 2-d array with positive dimensions, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError(f"{name} contains non-finite entries")
    return a


def check_symmetric(m, atol: float = SYMMETRY_ATOL, name: str = "matrix") -> np.ndarray:
    """Validate that ``m`` is square and (conjugate-)symmetric within ``atol``."""
    a = as_matrix(m, name)
    if a.shape[0] != a.shape[1]:
        raise InputError(f"{name} must be square, got shape {a.shape}")
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > atol:
        raise InputError(f"{name} is not symmetric: max deviation {dev:.3e} > {atol:.1e}")
    return a


def sym_eig(m, atol: float = SYMMETRY_ATOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Returns ``(values, vectors)`` with eigenvalues sorted in descending order
    (stable with respect to the original LAPACK order on ties) and the
    corresponding orthonormal eigenvectors as columns.  Raises
    ``numpy.linalg.LinAlgError`` if the iteration does not converge.
    """
    a = check_symmetric(m, atol)
    values, vectors = np.linalg.eigh(a)
    order = np.argsort(-values, kind="stable")
    return values[order], vectors[:, order]


def svd_symmetric(m, atol: float = SYMMETRY_ATOL) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Singular value decomposition of a symmetric matrix.

    For symmetric ``M`` with eigenpairs ``(lambda_j, w_j)`` the singular
    triples are ``(|lambda_j|, w_j, sign(lambda_j) * w_j)``.  Returns
    ``(sigma, W, V)`` with ``sigma`` descending and ``M = W @ diag(sigma) @ V.T``.
    """
    values, vectors = sym_eig(m, atol)
    order = np.argsort(-np.abs(values), kind="stable")
    values = values[order]
    w = vectors[:, order]
    signs = np.where(values < 0.0, -1.0, 1.0)
    return np.abs(values), w, w * signs


def check_unitary(u, atol: float = UNITARY_ATOL, name: str = "operator") -> np.ndarray:
    a = as_matrix(u, name)
    if a.shape[0] != a.shape[1]:
        raise InputError(f"{name} must be square, got shape {a.shape}")
    dev = np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0])))
    if dev > atol:
        raise InputError(f"{name} is not unitary: max |U^dag U - I| = {dev:.3e}")
    return a


def apply_power(u, t: int, x) -> np.ndarray:
    """Compute ``U^t x`` by ``t`` sequential applications of the unitary ``U``.

    Sequential application keeps the result independent of any spectral
    analysis of ``U`` itself, at the price of O(t) matrix-vector products.
    """
    a = check_unitary(u)
    if t < 0 or int(t) != t:
        raise InputError(f"power must be a nonnegative integer, got {t!r}")
    y = np.array(x, dtype=complex if np.iscomplexobj(a) or np.iscomplexobj(x) else float)
    if y.shape != (a.shape[0],):
        raise InputError(f"vector has shape {y.shape}, expected ({a.shape[0]},)")
    for _ in range(int(t)):
        y = a @ y
    return y


_U64 = 2**64


@dataclass(frozen=True)
class SeededRng:
    """Deterministic random source: a Philox counter-based generator.

    The full draw sequence is a pure function of ``(seed, stream_index)``;
    the two words form the Philox key, so distinct stream indices give
    statistically independent streams.  Monte-Carlo drivers give every
    trial chunk its own ``substream`` so results never depend on scheduling.
    """

    seed: int
    stream_index: int = 0

    def __post_init__(self):
        for label, value in (("seed", self.seed), ("stream_index", self.stream_index)):
            if not (0 <= int(value) < _U64):
                raise InputError(f"{label} must be a 64-bit unsigned integer, got {value!r}")

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, index: int) -> "SeededRng":
        return SeededRng(self.seed, index)
