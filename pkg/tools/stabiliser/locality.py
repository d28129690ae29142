"""
Lattice geometry and locality checks for conjugate pairs.

Distances are Euclidean with optional periodic boundaries (minimum over image
shifts along each periodic axis). When every coordinate and period is integral
squared distances are exact integers; otherwise comparisons allow 1e-9 slack.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .conjugacy import ConjugatePair
from .errors import PauliParseError
from .group import contains
from .pauli import PauliOperator, commutes, multiply, product

logger = logging.getLogger(__name__)

DISTANCE_TOL = 1e-9


@dataclass(frozen=True)
class Region:
    qubits: FrozenSet[int]

    @classmethod
    def of(cls, qubits: Iterable[int]) -> "Region":
        """Region from any iterable of qubit indices."""
        return cls(frozenset(int(q) for q in qubits))

    @classmethod
    def support_of(cls, p: PauliOperator) -> "Region":
        """Region covering the support of p."""
        return cls(p.support.qubits)

    def __len__(self) -> int:
        return len(self.qubits)

    def __iter__(self):
        return iter(sorted(self.qubits))

    def __contains__(self, qubit: int) -> bool:
        return qubit in self.qubits

    def issubset(self, other: "Region") -> bool:
        """True when every qubit of self lies in other."""
        return self.qubits <= other.qubits


@dataclass(frozen=True)
class Lattice:
    dim: int
    positions: Tuple[Tuple[float, ...], ...]
    period: Optional[Tuple[Optional[float], ...]] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("lattice dimension must be at least 1")
        positions = tuple(tuple(p) for p in self.positions)
        for p in positions:
            if len(p) != self.dim:
                raise ValueError(f"position {p} does not have {self.dim} coordinates")
        object.__setattr__(self, "positions", positions)
        if self.period is not None:
            period = tuple(self.period)
            if len(period) != self.dim:
                raise ValueError(f"period must have {self.dim} entries")
            object.__setattr__(self, "period", period)
        values = [c for p in positions for c in p] + [c for c in (self.period or ()) if c is not None]
        object.__setattr__(self, "integral", all(float(c).is_integer() for c in values))

    @property
    def n(self) -> int:
        """Number of sites."""
        return len(self.positions)

    def _axis_delta(self, axis: int, u: float, v: float) -> float:
        d = abs(u - v)
        if self.period is not None and self.period[axis]:
            span = self.period[axis]
            d = d % span
            d = min(d, span - d)
        return d

    def distance_squared(self, i: int, j: int) -> Union[int, float]:
        """Squared distance, exact for integral lattices."""
        total = sum(self._axis_delta(k, self.positions[i][k], self.positions[j][k]) ** 2
                    for k in range(self.dim))
        return int(round(total)) if self.integral else total

    def distance(self, i: int, j: int) -> float:
        """Euclidean distance, minimum image on periodic axes."""
        return math.sqrt(self.distance_squared(i, j))

    def within(self, i: int, j: int, rho: float) -> bool:
        """True when sites i and j are at most rho apart."""
        d2 = self.distance_squared(i, j)
        if self.integral and float(rho * rho).is_integer():
            return d2 <= int(rho * rho)
        return math.sqrt(d2) <= rho + DISTANCE_TOL

    def to_dict(self) -> Dict[str, Any]:
        """JSON form; period only when set."""
        data: Dict[str, Any] = {"dim": self.dim, "positions": [list(p) for p in self.positions]}
        if self.period is not None:
            data["period"] = list(self.period)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Lattice":
        """Parse dim, positions and optional period."""
        try:
            period = data.get("period")
            return cls(dim=int(data["dim"]),
                       positions=tuple(tuple(p) for p in data["positions"]),
                       period=tuple(period) if period is not None else None)
        except (KeyError, TypeError) as e:
            raise PauliParseError(f"malformed lattice JSON: {e}") from e

    @classmethod
    def line(cls, n: int, spacing: float = 1) -> "Lattice":
        """Open chain of n sites with the given spacing."""
        return cls(dim=1, positions=tuple((q * spacing,) for q in range(n)))


def _check_region(lat: Lattice, r: Region) -> None:
    for q in r.qubits:
        if not 0 <= q < lat.n:
            raise ValueError(f"qubit {q} is not on the lattice")


def diameter(lat: Lattice, r: Region) -> float:
    """Largest pairwise distance inside the region."""
    if not r.qubits:
        raise ValueError("diameter of an empty region is undefined")
    _check_region(lat, r)
    qubits = sorted(r.qubits)
    best = 0
    for idx, i in enumerate(qubits):
        for j in qubits[idx + 1:]:
            best = max(best, lat.distance_squared(i, j))
    return math.sqrt(best)


def neighbourhood(lat: Lattice, r: Region, rho: float) -> Region:
    """All qubits within rho of the region, including the region itself."""
    if rho < 0:
        raise ValueError("rho must be non-negative")
    _check_region(lat, r)
    members = set(r.qubits)
    for p in range(lat.n):
        if p in members:
            continue
        if any(lat.within(p, q, rho) for q in r.qubits):
            members.add(p)
    return Region(frozenset(members))


def support_diameter(lat: Lattice, p: PauliOperator) -> float:
    """Diameter of the support of p; 0 for the identity."""
    support = p.support.qubits
    if not support:
        return 0.0
    return diameter(lat, Region(support))


@dataclass
class LocalityReport:
    passed: bool
    l: float
    max_diameter: float
    violations: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "l": self.l, "max_diameter": self.max_diameter,
                "violations": list(self.violations)}


def check_local_reversibility(pair: ConjugatePair, lat: Lattice, l: float) -> LocalityReport:
    """Every conjugate basis element must have support diameter at most l."""
    if lat.n != pair.n:
        raise ValueError(f"lattice has {lat.n} sites but the pair acts on {pair.n} qubits")
    worst = 0.0
    violations = []
    for side, basis in (("a", pair.basis_a), ("b", pair.basis_b)):
        for index, op in enumerate(basis):
            d = support_diameter(lat, op)
            worst = max(worst, d)
            if d > l + DISTANCE_TOL:
                violations.append({"side": side, "index": index, "pauli": str(op), "diameter": d})
    if violations:
        logger.info(f"{len(violations)} conjugate basis elements exceed l={l}")
    return LocalityReport(passed=not violations, l=l, max_diameter=worst, violations=violations)


def relocalise(pair: ConjugatePair, p: PauliOperator,
               lat: Optional[Lattice] = None, l: Optional[float] = None) -> PauliOperator:
    """
    Multiply p by the a_i paired with every b_i it anticommutes with.

    The result commutes with all b_i. With a lattice and bound l the support
    is audited against the 2l-neighbourhood of the original support.
    """
    chosen = [a for a, b in zip(pair.basis_a, pair.basis_b) if commutes(p, b)]
    result = multiply(product(chosen, p.n), p)
    if lat is not None and l is not None and not p.support.empty:
        allowed = neighbourhood(lat, Region.support_of(p), 2 * l)
        if not Region.support_of(result).issubset(allowed):
            logger.warning(f"relocalised {p} escapes its {2 * l}-neighbourhood; "
                           "the pair is not l-locally reversible")
    return result


class ErrorClass(str, enum.Enum):
    DETECTABLE = "detectable"
    SELF_CORRECTING = "self_correcting"
    UNDETECTABLE_LOGICAL = "undetectable_logical"


def classify_error(pair: ConjugatePair, e: PauliOperator) -> ErrorClass:
    """Sort a Pauli error into detectable, self-correcting or logical."""
    if any(commutes(e, s) for s in pair.intersection.generators):
        return ErrorClass.DETECTABLE
    if contains(pair.group_b, relocalise(pair, e)).member:
        return ErrorClass.SELF_CORRECTING
    return ErrorClass.UNDETECTABLE_LOGICAL
