"""
GF(2) linear algebra.

Matrices are numpy uint8 arrays reduced mod 2. Incremental span bookkeeping
over packed Python integers is provided by ``BitSpan`` for the hot paths
(membership, greedy transversals) where building a matrix per query would
dominate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np


def to_gf2(matrix) -> np.ndarray:
    return np.array(matrix, dtype=np.uint8) % 2


@dataclass(frozen=True)
class RowReduceResult:
    matrix: np.ndarray
    rank: int
    pivots: Tuple[int, ...]


def row_reduce(matrix) -> RowReduceResult:
    """Reduced row echelon form over GF(2)."""
    mat = to_gf2(matrix).copy()
    if mat.ndim != 2:
        raise ValueError("row_reduce expects a 2-D matrix")
    m, n = mat.shape
    pivots: List[int] = []
    row = 0
    for col in range(n):
        if row == m:
            break
        candidates = np.nonzero(mat[row:, col])[0]
        if candidates.size == 0:
            continue
        pivot = row + int(candidates[0])
        if pivot != row:
            mat[[row, pivot]] = mat[[pivot, row]]
        others = np.nonzero(mat[:, col])[0]
        for r in others:
            if r != row:
                mat[r, :] ^= mat[row, :]
        pivots.append(col)
        row += 1
    return RowReduceResult(matrix=mat, rank=len(pivots), pivots=tuple(pivots))


def rank(matrix) -> int:
    mat = to_gf2(matrix)
    if mat.size == 0:
        return 0
    return row_reduce(mat).rank


def nullspace(matrix) -> np.ndarray:
    """Basis (as rows) of {v : matrix @ v = 0} over GF(2)."""
    mat = to_gf2(matrix)
    n = mat.shape[1]
    if mat.shape[0] == 0:
        return np.eye(n, dtype=np.uint8)
    reduced = row_reduce(mat)
    pivots = set(reduced.pivots)
    basis = []
    for free in (c for c in range(n) if c not in pivots):
        vec = np.zeros(n, dtype=np.uint8)
        vec[free] = 1
        for row, col in enumerate(reduced.pivots):
            if reduced.matrix[row, free]:
                vec[col] = 1
        basis.append(vec)
    if not basis:
        return np.zeros((0, n), dtype=np.uint8)
    return np.vstack(basis)


def solve(matrix, vector) -> Optional[np.ndarray]:
    """One solution x of matrix @ x = vector, or None when inconsistent."""
    mat = to_gf2(matrix)
    vec = to_gf2(vector).reshape(-1, 1)
    m, n = mat.shape
    reduced = row_reduce(np.concatenate([mat, vec], axis=1))
    if n in reduced.pivots:
        return None
    x = np.zeros(n, dtype=np.uint8)
    for row, col in enumerate(reduced.pivots):
        x[col] = reduced.matrix[row, n]
    return x


def inverse(matrix) -> Optional[np.ndarray]:
    """Inverse over GF(2), or None when singular."""
    mat = to_gf2(matrix)
    m, n = mat.shape
    if m != n:
        raise ValueError("inverse expects a square matrix")
    if m == 0:
        return np.zeros((0, 0), dtype=np.uint8)
    reduced = row_reduce(np.concatenate([mat, np.eye(n, dtype=np.uint8)], axis=1))
    if reduced.pivots[:n] != tuple(range(n)) or len(reduced.pivots) < n:
        return None
    return reduced.matrix[:, n:].copy()


def matmul(a, b) -> np.ndarray:
    return (to_gf2(a).astype(np.int64) @ to_gf2(b).astype(np.int64) % 2).astype(np.uint8)


def row_space_intersection(a, b) -> np.ndarray:
    """Basis of rowspace(a) ∩ rowspace(b) by the Zassenhaus construction."""
    a = to_gf2(a)
    b = to_gf2(b)
    n = a.shape[1] if a.size else b.shape[1]
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((0, n), dtype=np.uint8)
    stacked = np.vstack([
        np.concatenate([a, a], axis=1),
        np.concatenate([b, np.zeros_like(b)], axis=1),
    ])
    reduced = row_reduce(stacked)
    rows = []
    for row, col in enumerate(reduced.pivots):
        if col >= n:
            rows.append(reduced.matrix[row, n:])
    if not rows:
        return np.zeros((0, n), dtype=np.uint8)
    return np.vstack(rows)


def bits_to_int(vector: Sequence[int]) -> int:
    value = 0
    for i, bit in enumerate(vector):
        if int(bit) & 1:
            value |= 1 << i
    return value


def int_to_bits(value: int, length: int) -> np.ndarray:
    return np.array([(value >> i) & 1 for i in range(length)], dtype=np.uint8)


class BitSpan:
    """
    Incrementally maintained GF(2) span of packed integer vectors.

    Every stored row carries a mask recording which inserted vectors it is
    built from, so ``reduce`` reports the combination that cancels a vector.
    """

    def __init__(self) -> None:
        self._rows: Dict[int, Tuple[int, int]] = {}
        self._count = 0

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, vector: int) -> Tuple[int, int]:
        """Return (residual, combination mask of inserted vectors)."""
        mask = 0
        residual = 0
        # rows are keyed by their lowest bit, so scanning upwards terminates
        while vector:
            low = vector & -vector
            entry = self._rows.get(low.bit_length() - 1)
            if entry is None:
                residual |= low
                vector ^= low
            else:
                vector ^= entry[0]
                mask ^= entry[1]
        return residual, mask

    def contains(self, vector: int) -> bool:
        return self.reduce(vector)[0] == 0

    def add(self, vector: int) -> bool:
        """Insert a vector; False (and no insertion index used) if dependent."""
        residual, mask = self.reduce(vector)
        if residual == 0:
            return False
        mask ^= 1 << self._count
        self._count += 1
        pivot = (residual & -residual).bit_length() - 1
        for key, (row, row_mask) in list(self._rows.items()):
            if (row >> pivot) & 1:
                self._rows[key] = (row ^ residual, row_mask ^ mask)
        self._rows[pivot] = (residual, mask)
        return True
