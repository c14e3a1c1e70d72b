"""Query-counting oracles.

Algorithms see input data only through these objects; every single-entry read
bumps the counter by exactly one, so a run's reported query count is the
literal number of oracle invocations.
"""

from __future__ import annotations

import numpy as np

from ..errors import InputError


class FunctionOracle:
    """Oracle for a list-valued function f : [n] -> [m]."""

    def __init__(self, values):
        vals = tuple(int(v) for v in values)
        if not vals:
            raise InputError("function oracle needs at least one value")
        self._values = vals
        self.query_count = 0

    @property
    def domain_size(self) -> int:
        return len(self._values)

    def query(self, i: int) -> int:
        if not (0 <= i < len(self._values)):
            raise InputError(f"index {i} outside [0, {len(self._values)})")
        self.query_count += 1
        return self._values[i]

    def raw_values(self) -> tuple[int, ...]:
        """Uncounted access for witness verification only."""
        return self._values


class MatrixEntryOracle:
    """Oracle answering (i, j, l) -> entry (i, j) of the l-th matrix, mod p."""

    def __init__(self, matrices, modulus: int):
        mats = [np.asarray(m, dtype=np.int64) for m in matrices]
        if not mats:
            raise InputError("matrix oracle needs at least one matrix")
        shape = mats[0].shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise InputError("matrices must be square")
        for m in mats:
            if m.shape != shape:
                raise InputError("all matrices must share one shape")
            if np.any(m < 0) or np.any(m >= modulus):
                raise InputError("entries must lie in [0, p)")
        self._matrices = mats
        self.modulus = int(modulus)
        self.query_count = 0

    @property
    def n(self) -> int:
        return self._matrices[0].shape[0]

    @property
    def k(self) -> int:
        return len(self._matrices)

    def query(self, i: int, j: int, l: int) -> int:
        self.query_count += 1
        return int(self._matrices[l][i, j])

    def query_row(self, i: int, l: int) -> np.ndarray:
        """Read a full row, one counted query per entry."""
        self.query_count += self.n
        return self._matrices[l][i, :].copy()

    def query_col(self, j: int, l: int) -> np.ndarray:
        self.query_count += self.n
        return self._matrices[l][:, j].copy()

    def query_cells(self, cells, l: int) -> np.ndarray:
        """Read an explicit list of (i, j) cells of matrix l."""
        self.query_count += len(cells)
        m = self._matrices[l]
        return np.array([m[i, j] for i, j in cells], dtype=np.int64)

    def raw_matrix(self, l: int) -> np.ndarray:
        """Uncounted access for witness verification only."""
        return self._matrices[l].copy()
