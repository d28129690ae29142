"""
Signed stabiliser groups.

A group is an immutable, independent, pairwise-commuting list of Hermitian
generators. The sign of each generator lives in its phase (0 or 2); the
unsigned symplectic rows are derived on demand. Measurement returns a new
group and never mutates its input.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from . import gf2
from .errors import InvalidGroup, NonHermitianPauli, PauliLengthMismatch, PauliParseError
from .outcomes import OutcomeSource
from .pauli import PauliOperator, commutes, multiply, parse_pauli, product

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StabiliserGroup:
    n: int
    generators: Tuple[PauliOperator, ...] = field(default_factory=tuple)

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        span = gf2.BitSpan()
        for i, g in enumerate(gens):
            if g.n != self.n:
                raise PauliLengthMismatch(f"generator {g} has {g.n} qubits, group has {self.n}")
            if not g.is_hermitian:
                raise InvalidGroup(f"generator {g} is not Hermitian")
            if g.is_identity:
                raise InvalidGroup(f"generator {i} is a multiple of the identity")
            for h in gens[:i]:
                if commutes(g, h):
                    raise InvalidGroup(f"generators {h} and {g} anticommute")
            if not span.add(g.symplectic_int):
                raise InvalidGroup(
                    f"generator {g} is dependent on earlier generators; "
                    "use StabiliserGroup.from_generators to reduce")
        object.__setattr__(self, "_span_cache", span)

    # -- construction ---------------------------------------------------

    @classmethod
    def trivial(cls, n: int) -> "StabiliserGroup":
        """The group generated by the identity alone."""
        return cls(n, ())

    @classmethod
    def from_generators(cls, paulis: Iterable[PauliOperator], n: Optional[int] = None) -> "StabiliserGroup":
        """
        Keep generators greedily in the given order, dropping dependent ones.

        A dependent generator whose sign disagrees with the product of the kept
        ones would put -I in the group and raises InvalidGroup.
        """
        paulis = list(paulis)
        if n is None:
            if not paulis:
                raise InvalidGroup("cannot infer qubit count from an empty generator list")
            n = paulis[0].n
        kept: List[PauliOperator] = []
        span = gf2.BitSpan()
        for p in paulis:
            if p.n != n:
                raise PauliLengthMismatch(f"{p} has {p.n} qubits, expected {n}")
            if not p.is_hermitian:
                raise InvalidGroup(f"generator {p} is not Hermitian")
            for k in kept:
                if commutes(p, k):
                    raise InvalidGroup(f"generators {k} and {p} anticommute")
            residual, mask = span.reduce(p.symplectic_int)
            if residual:
                span.add(p.symplectic_int)
                kept.append(p)
                continue
            implied = product((kept[i] for i in range(len(kept)) if (mask >> i) & 1), n)
            if implied.phase != p.phase:
                raise InvalidGroup(f"{p} conflicts with {implied}: -I would be in the group")
        return cls(n, tuple(kept))

    @classmethod
    def from_strings(cls, *texts: str) -> "StabiliserGroup":
        """Build from dense Pauli strings, reducing dependent generators."""
        paulis = [parse_pauli(t) for t in texts]
        return cls.from_generators(paulis)

    # -- views ----------------------------------------------------------

    @property
    def rank(self) -> int:
        """Number of independent generators."""
        return len(self.generators)

    @property
    def logical_count(self) -> int:
        """Number of logical qubits, n - rank."""
        return self.n - self.rank

    @property
    def signs(self) -> List[int]:
        """Sign exponent bit per generator (0 for +, 1 for -)."""
        return [g.phase // 2 for g in self.generators]

    def matrix(self) -> np.ndarray:
        """Generators as rows of (x|z) vectors."""
        if not self.generators:
            return np.zeros((0, 2 * self.n), dtype=np.uint8)
        return np.vstack([g.to_vector() for g in self.generators])

    def with_sign_bits(self, bits: Sequence[int]) -> "StabiliserGroup":
        """Same unsigned generators, signs replaced by (-1)^bits."""
        if len(bits) != self.rank:
            raise ValueError(f"expected {self.rank} sign bits, got {len(bits)}")
        gens = tuple(g.with_phase(2 * (int(b) & 1)) for g, b in zip(self.generators, bits))
        return StabiliserGroup(self.n, gens)

    def unsigned(self) -> "StabiliserGroup":
        """Same generators with every sign set to +."""
        return self.with_sign_bits([0] * self.rank)

    def same_unsigned(self, other: "StabiliserGroup") -> bool:
        """True when both groups agree up to generator signs."""
        if self.n != other.n or self.rank != other.rank:
            return False
        return all(contains(self, g).member for g in other.generators)

    def __str__(self) -> str:
        return "<" + ", ".join(str(g) for g in self.generators) + ">"

    def to_dict(self) -> Dict[str, Any]:
        """JSON form with one signed entry per generator."""
        return {
            "n": self.n,
            "generators": [
                {"pauli": str(g)[1:], "sign": "+" if g.phase == 0 else "-"}
                for g in self.generators
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StabiliserGroup":
        """Parse the JSON form; generators may be plain strings."""
        try:
            n = int(data["n"])
            paulis = []
            for entry in data.get("generators", []):
                if isinstance(entry, str):
                    p = parse_pauli(entry)
                else:
                    sign = entry.get("sign", "+")
                    if sign not in ("+", "-"):
                        raise PauliParseError(f"generator sign must be + or -, got {sign!r}")
                    p = parse_pauli(sign + entry["pauli"])
                if p.n != n:
                    raise PauliLengthMismatch(f"generator {p} does not have {n} qubits")
                paulis.append(p)
        except (KeyError, TypeError, AttributeError) as e:
            raise PauliParseError(f"malformed group JSON: {e}") from e
        if not paulis:
            return cls.trivial(n)
        return cls.from_generators(paulis, n)


class Membership(NamedTuple):
    """Result of a membership query: p = i^phase * s for some s in the group."""

    member: bool
    phase: int = 0

    @property
    def sign(self) -> Optional[int]:
        """+1 or -1 for a Hermitian member, otherwise None."""
        if not self.member or self.phase % 2:
            return None
        return 1 if self.phase == 0 else -1


def contains(g: StabiliserGroup, p: PauliOperator) -> Membership:
    """Decide whether ±p (or ±ip) lies in g and report the relative phase."""
    if p.n != g.n:
        raise PauliLengthMismatch(f"operator has {p.n} qubits, group has {g.n}")
    indices = express(g, p)
    if indices is None:
        return Membership(False)
    element = product((g.generators[i] for i in indices), g.n)
    return Membership(True, (p.phase - element.phase) % 4)


def express(g: StabiliserGroup, p: PauliOperator) -> Optional[List[int]]:
    """Generator indices whose product equals p up to phase, or None."""
    residual, mask = g._span_cache.reduce(p.symplectic_int)
    if residual:
        return None
    return [i for i in range(g.rank) if (mask >> i) & 1]


def canonicalise(g: Union[StabiliserGroup, Sequence[PauliOperator]]) -> StabiliserGroup:
    """
    Reduced row echelon generators of the signed group.

    Columns are ordered x_0..x_{n-1}, z_0..z_{n-1}. Accepts a plain sequence of
    generators so dependent input can be reduced; a dependent generator with the
    wrong sign raises InvalidGroup.
    """
    if isinstance(g, StabiliserGroup):
        n = g.n
        rows = list(g.generators)
    else:
        rows = list(g)
        if not rows:
            raise InvalidGroup("cannot canonicalise an empty generator list without n")
        n = rows[0].n
    for i, r in enumerate(rows):
        if r.n != n:
            raise PauliLengthMismatch(f"{r} has {r.n} qubits, expected {n}")
        if not r.is_hermitian:
            raise InvalidGroup(f"generator {r} is not Hermitian")
        for s in rows[:i]:
            if commutes(r, s):
                raise InvalidGroup(f"generators {s} and {r} anticommute")
    pivot_row = 0
    for col in range(2 * n):
        found = next((i for i in range(pivot_row, len(rows))
                      if (rows[i].symplectic_int >> col) & 1), None)
        if found is None:
            continue
        rows[pivot_row], rows[found] = rows[found], rows[pivot_row]
        pivot = rows[pivot_row]
        for i in range(len(rows)):
            if i != pivot_row and (rows[i].symplectic_int >> col) & 1:
                rows[i] = multiply(pivot, rows[i])
        pivot_row += 1
    for r in rows[pivot_row:]:
        if r.phase != 0:
            raise InvalidGroup("generators are dependent with inconsistent signs: -I is in the group")
    return StabiliserGroup(n, tuple(rows[:pivot_row]))


@dataclass(frozen=True)
class LogicalBasis:
    """Symplectic pairs (X̄_i, Z̄_i) of logical representatives."""

    pairs: Tuple[Tuple[PauliOperator, PauliOperator], ...] = ()

    @property
    def k(self) -> int:
        """Number of logical qubits."""
        return len(self.pairs)

    @property
    def x_ops(self) -> List[PauliOperator]:
        """Logical X representatives."""
        return [p[0] for p in self.pairs]

    @property
    def z_ops(self) -> List[PauliOperator]:
        """Logical Z representatives."""
        return [p[1] for p in self.pairs]

    def operators(self) -> List[PauliOperator]:
        """X̄_1..X̄_k followed by Z̄_1..Z̄_k."""
        return self.x_ops + self.z_ops

    @classmethod
    def from_operators(cls, operators: Sequence[PauliOperator]) -> "LogicalBasis":
        """Inverse of operators(): X ops then Z ops."""
        k = len(operators) // 2
        return cls(tuple((operators[i], operators[k + i]) for i in range(k)))

    def gram(self) -> np.ndarray:
        """Pairwise anticommutation matrix of the operators."""
        ops = self.operators()
        return np.array([[commutes(p, q) for q in ops] for p in ops], dtype=np.uint8)

    def problems(self, group: StabiliserGroup) -> List[str]:
        """Empty when the basis is a valid logical basis for the group."""
        issues = []
        k = self.k
        expected = np.zeros((2 * k, 2 * k), dtype=np.uint8)
        expected[:k, k:] = np.eye(k, dtype=np.uint8)
        expected[k:, :k] = np.eye(k, dtype=np.uint8)
        if not np.array_equal(self.gram(), expected):
            issues.append("logical operators do not satisfy the canonical commutation pattern")
        for op in self.operators():
            if not op.is_hermitian:
                issues.append(f"{op} is not Hermitian")
            for g in group.generators:
                if commutes(op, g):
                    issues.append(f"{op} anticommutes with generator {g}")
                    break
        span = gf2.BitSpan()
        for g in group.generators:
            span.add(g.symplectic_int)
        for op in self.operators():
            if not span.add(op.symplectic_int):
                issues.append(f"{op} is dependent modulo the group")
        return issues

    def to_dict(self) -> Dict[str, Any]:
        """JSON form listing each (X, Z) representative pair."""
        return {"pairs": [{"x": str(x), "z": str(z)} for x, z in self.pairs]}


def normaliser_logicals(g: StabiliserGroup) -> LogicalBasis:
    """Symplectic Gram–Schmidt on the normaliser, modulo the group."""
    n = g.n
    if g.rank == 0:
        swapped = np.zeros((0, 2 * n), dtype=np.uint8)
    else:
        mat = g.matrix()
        swapped = np.concatenate([mat[:, n:], mat[:, :n]], axis=1)
    candidates = [PauliOperator.from_vector(v) for v in gf2.nullspace(swapped)]
    pairs: List[Tuple[PauliOperator, PauliOperator]] = []
    while candidates:
        p = candidates.pop(0)
        partner = next((i for i, c in enumerate(candidates) if commutes(p, c)), None)
        if partner is None:
            continue
        q = candidates.pop(partner)
        reduced = []
        for c in candidates:
            with_q, with_p = commutes(c, q), commutes(c, p)
            if with_q:
                c = multiply(c, p)
            if with_p:
                c = multiply(c, q)
            reduced.append(c.unsigned())
        candidates = reduced
        pairs.append((p.unsigned(), q.unsigned()))
    if len(pairs) != g.logical_count:
        raise InvalidGroup(f"expected {g.logical_count} logical pairs, found {len(pairs)}")
    return LogicalBasis(tuple(pairs))


class MeasurementResult(NamedTuple):
    group: StabiliserGroup
    outcome: int
    deterministic: bool
    logical: bool = False


def measure_pauli(g: StabiliserGroup, b: PauliOperator, source: OutcomeSource,
                  absorb: bool = False) -> MeasurementResult:
    """
    Projective measurement of a Hermitian Pauli b.

    The pivot is the lowest-index anticommuting generator. When b commutes with
    every generator but is not in the group the measurement is flagged as
    logical; the group is unchanged unless ``absorb`` is set, in which case the
    measured operator joins the group with its drawn sign.
    """
    if b.n != g.n:
        raise PauliLengthMismatch(f"measured operator has {b.n} qubits, group has {g.n}")
    if not b.is_hermitian:
        raise NonHermitianPauli(f"cannot measure non-Hermitian {b}")
    anticommuting = [i for i, gen in enumerate(g.generators) if commutes(gen, b)]
    if anticommuting:
        pivot = anticommuting[0]
        gens = list(g.generators)
        for i in anticommuting[1:]:
            gens[i] = multiply(gens[pivot], gens[i])
        outcome = source.draw()
        gens[pivot] = b if outcome == 1 else -b
        logger.debug(f"measured {b}: random outcome {outcome:+d}, pivot {pivot}")
        return MeasurementResult(StabiliserGroup(g.n, tuple(gens)), outcome, False)
    membership = contains(g, b)
    if membership.member:
        return MeasurementResult(g, membership.sign, True)
    outcome = source.draw()
    logger.warning(f"measured {b}, which commutes with the group but is not in it")
    if absorb:
        signed = b if outcome == 1 else -b
        return MeasurementResult(StabiliserGroup(g.n, g.generators + (signed,)), outcome, False, True)
    return MeasurementResult(g, outcome, False, True)


def code_distance(g: StabiliserGroup, max_weight: Optional[int] = None) -> Optional[float]:
    """
    Minimum weight of a logical operator (normaliser element outside the group).

    Returns math.inf when there are no logical qubits and None when no logical
    operator exists up to ``max_weight``. Exhaustive, so intended for small n.
    """
    if g.logical_count == 0:
        return math.inf
    limit = g.n if max_weight is None else min(max_weight, g.n)
    for w in range(1, limit + 1):
        for qubits in itertools.combinations(range(g.n), w):
            for letters in itertools.product("XYZ", repeat=w):
                p = PauliOperator.from_terms(g.n, dict(zip(qubits, letters)))
                if any(commutes(p, gen) for gen in g.generators):
                    continue
                if not contains(g, p).member:
                    return w
    return None
