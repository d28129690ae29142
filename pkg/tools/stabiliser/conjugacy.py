"""
Reversible (conjugate) pairs of stabiliser groups.

Given groups A and B of equal rank, the shared part S = A ∩ B is computed by a
Zassenhaus intersection, transversals of A/S and B/S are chosen greedily in
generator order, and the transversal of B is re-based by the inverse of the
commutation matrix so that a_i anticommutes with exactly b_i.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import gf2
from .errors import InvalidGroup, PauliLengthMismatch, RankMismatch, SignConflict
from .group import StabiliserGroup, canonicalise, contains
from .pauli import PauliOperator, commutes, product

logger = logging.getLogger(__name__)


def _as_tuple_matrix(matrix: np.ndarray) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(int(v) for v in row) for row in np.asarray(matrix))


def commutation_matrix(basis_a: Sequence[PauliOperator],
                       basis_b: Sequence[PauliOperator]) -> np.ndarray:
    """M[i, j] = 1 iff basis_a[i] anticommutes with basis_b[j]."""
    mat = np.zeros((len(basis_a), len(basis_b)), dtype=np.uint8)
    for i, a in enumerate(basis_a):
        for j, b in enumerate(basis_b):
            mat[i, j] = commutes(a, b)
    return mat


@dataclass(frozen=True)
class ConjugatePair:
    group_a: StabiliserGroup
    group_b: StabiliserGroup
    intersection: StabiliserGroup
    basis_a: Tuple[PauliOperator, ...]
    basis_b: Tuple[PauliOperator, ...]
    commutation_before: Tuple[Tuple[int, ...], ...] = field(default=(), compare=False)

    reversible = True

    @property
    def n(self) -> int:
        return self.group_a.n

    @property
    def n_m(self) -> int:
        return len(self.basis_a)

    def group_b_for(self, outcome_bits: Optional[Sequence[int]] = None) -> StabiliserGroup:
        """B with the conjugate basis signed by (-1)^outcome_bits."""
        if outcome_bits is None:
            return self.group_b
        signed = [b if not (int(m) & 1) else -b for b, m in zip(self.basis_b, outcome_bits)]
        return StabiliserGroup(self.n, self.intersection.generators + tuple(signed))

    def reversed(self, outcome_bits: Optional[Sequence[int]] = None) -> "ConjugatePair":
        """The pair (B(m), A) with the roles of the two bases exchanged."""
        if outcome_bits is None:
            outcome_bits = [0] * self.n_m
        group_b = self.group_b_for(outcome_bits)
        signed_b = group_b.generators[self.intersection.rank:]
        return ConjugatePair(group_a=group_b, group_b=self.group_a,
                             intersection=self.intersection,
                             basis_a=signed_b, basis_b=self.basis_a,
                             commutation_before=_as_tuple_matrix(np.eye(self.n_m, dtype=np.uint8)))

    def problems(self) -> List[str]:
        """Empty when every pair invariant holds."""
        issues = []
        if len(self.basis_a) != len(self.basis_b):
            issues.append("conjugate bases differ in length")
        mat = commutation_matrix(self.basis_a, self.basis_b)
        if not np.array_equal(mat, np.eye(self.n_m, dtype=np.uint8)):
            issues.append("conjugate bases are not biorthogonal")
        if self.group_a.rank != self.group_b.rank:
            issues.append("groups differ in rank")
        for name, group, basis in (("A", self.group_a, self.basis_a), ("B", self.group_b, self.basis_b)):
            try:
                spanned = StabiliserGroup.from_generators(
                    list(self.intersection.generators) + list(basis), self.n)
            except InvalidGroup as e:
                issues.append(f"intersection and basis of {name} do not form a group: {e}")
                continue
            if spanned.rank != group.rank or not all(
                    contains(spanned, g).phase == 0 and contains(spanned, g).member
                    for g in group.generators):
                issues.append(f"intersection and basis do not span {name} as a signed group")
        return issues

    def to_dict(self) -> Dict[str, Any]:
        return {
            "reversible": True,
            "n": self.n,
            "n_m": self.n_m,
            "group_a": self.group_a.to_dict(),
            "group_b": self.group_b.to_dict(),
            "intersection": self.intersection.to_dict(),
            "basis_a": [str(a) for a in self.basis_a],
            "basis_b": [str(b) for b in self.basis_b],
            "commutation_before": [list(r) for r in self.commutation_before],
            "commutation_after": commutation_matrix(self.basis_a, self.basis_b).tolist(),
        }


@dataclass(frozen=True)
class NotReversible:
    """Failure verdict with a witness commuting with the whole other quotient."""

    group_a: StabiliserGroup
    group_b: StabiliserGroup
    intersection: StabiliserGroup
    basis_a: Tuple[PauliOperator, ...]
    basis_b: Tuple[PauliOperator, ...]
    witness: PauliOperator
    witness_side: str
    witness_commutation: Tuple[int, ...]
    commutation: Tuple[Tuple[int, ...], ...] = field(default=(), compare=False)

    reversible = False

    @property
    def n(self) -> int:
        return self.group_a.n

    @property
    def n_m(self) -> int:
        return len(self.basis_a)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "reversible": False,
            "n": self.n,
            "n_m": self.n_m,
            "witness": str(self.witness),
            "witness_side": self.witness_side,
            "witness_commutation": list(self.witness_commutation),
            "basis_a": [str(a) for a in self.basis_a],
            "basis_b": [str(b) for b in self.basis_b],
            "commutation": [list(r) for r in self.commutation],
        }


def group_intersection(a: StabiliserGroup, b: StabiliserGroup) -> StabiliserGroup:
    """Signed intersection; raises SignConflict if a shared element has opposite signs."""
    if a.n != b.n:
        raise PauliLengthMismatch(f"groups act on {a.n} and {b.n} qubits")
    rows = gf2.row_space_intersection(a.matrix(), b.matrix())
    elements = []
    for row in rows:
        unsigned = PauliOperator.from_vector(row)
        in_a = contains(a, unsigned)
        element = unsigned.with_phase(-in_a.phase)
        in_b = contains(b, element)
        if in_b.phase != 0:
            raise SignConflict(
                f"{element.unsigned()} appears with opposite signs in the two groups",
                element=element)
        elements.append(element)
    if not elements:
        return StabiliserGroup.trivial(a.n)
    return canonicalise(elements)


def quotient_basis(group: StabiliserGroup, sub: StabiliserGroup) -> Tuple[PauliOperator, ...]:
    """Greedy transversal of group/sub taken from the group's generators in order."""
    span = gf2.BitSpan()
    for g in sub.generators:
        span.add(g.symplectic_int)
    picks = [g for g in group.generators if span.add(g.symplectic_int)]
    if len(picks) != group.rank - sub.rank:
        raise InvalidGroup("subgroup is not contained in the group")
    return tuple(picks)


def rebased_products(pair: Union[ConjugatePair, NotReversible],
                     subset: Union[str, Sequence[int]]) -> PauliOperator:
    """Product of the b_i selected by a bit vector (or a bit string like "110")."""
    if isinstance(subset, str):
        subset = [int(c) for c in subset]
    if len(subset) != pair.n_m:
        raise ValueError(f"subset has length {len(subset)}, expected {pair.n_m}")
    return product((b for b, bit in zip(pair.basis_b, subset) if int(bit) & 1), pair.n)


def check_reversible(a: StabiliserGroup, b: StabiliserGroup) -> Union[ConjugatePair, NotReversible]:
    if a.n != b.n:
        raise PauliLengthMismatch(f"groups act on {a.n} and {b.n} qubits")
    if a.rank != b.rank:
        raise RankMismatch(f"groups have ranks {a.rank} and {b.rank}")
    shared = group_intersection(a, b)
    basis_a = quotient_basis(a, shared)
    basis_b = quotient_basis(b, shared)
    mat = commutation_matrix(basis_a, basis_b)
    inv = gf2.inverse(mat)
    if inv is None:
        kernel = gf2.nullspace(mat)[0]
        witness = product((bj for bj, bit in zip(basis_b, kernel) if bit), a.n)
        logger.info(f"pair is not reversible; witness {witness}")
        return NotReversible(group_a=a, group_b=b, intersection=shared,
                             basis_a=basis_a, basis_b=basis_b, witness=witness,
                             witness_side="b",
                             witness_commutation=tuple(commutes(witness, ai) for ai in basis_a),
                             commutation=_as_tuple_matrix(mat))
    rebased = tuple(
        product((basis_b[k] for k in range(len(basis_b)) if inv[k, j]), a.n)
        for j in range(len(basis_b))
    )
    pair = ConjugatePair(group_a=a, group_b=b, intersection=shared,
                         basis_a=basis_a, basis_b=rebased,
                         commutation_before=_as_tuple_matrix(mat))
    logger.debug(f"reversible pair with n_m={pair.n_m}")
    return pair
