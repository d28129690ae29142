"""
Exact Pauli-group arithmetic over the binary symplectic representation.

An operator on n qubits is stored as two packed bit masks (bit q of ``x_bits``
and ``z_bits`` describes qubit q) and a phase exponent e, and denotes

    i^e * σ_0 ⊗ σ_1 ⊗ ... ⊗ σ_{n-1},   σ(x, z) ∈ {I, X, Z, Y} for (00, 10, 01, 11).

The product convention is XZ = -iY (equivalently Y = iXZ) everywhere in the
package. Hermitian operators are exactly those with e ∈ {0, 2}.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, List, Sequence

import numpy as np

from .errors import NonHermitianPauli, PauliLengthMismatch, PauliParseError

_PAULI_RE = re.compile(r"^([+-]?)(i?)([IXYZ]+)$")
_LETTERS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS = {letter: bits for bits, letter in _LETTERS.items()}
_SIGN_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_SIGN_PHASE = {"": 0, "+": 0, "-": 2, "+i": 1, "i": 1, "-i": 3}


@dataclass(frozen=True)
class Support:
    """Qubits on which an operator acts non-trivially."""

    qubits: FrozenSet[int]

    def __len__(self) -> int:
        return len(self.qubits)

    def __iter__(self):
        return iter(sorted(self.qubits))

    def sorted(self) -> List[int]:
        """Support qubits in increasing order."""
        return sorted(self.qubits)

    @property
    def empty(self) -> bool:
        """True when no qubit is acted on."""
        return not self.qubits


@dataclass(frozen=True)
class PauliOperator:
    n: int
    x_bits: int
    z_bits: int
    phase: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise PauliParseError(f"qubit count must be non-negative, got {self.n}")
        limit = 1 << self.n
        if not (0 <= self.x_bits < limit and 0 <= self.z_bits < limit):
            raise PauliLengthMismatch(f"bit masks exceed {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    # -- construction ---------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        """The n-qubit identity with phase +1."""
        return cls(n, 0, 0, 0)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliOperator":
        """One Pauli letter on one qubit, identity elsewhere."""
        return cls.from_terms(n, {qubit: letter})

    @classmethod
    def from_terms(cls, n: int, terms: Dict[int, str], phase: int = 0) -> "PauliOperator":
        """Build from a sparse {qubit: letter} map."""
        x = z = 0
        for qubit, letter in terms.items():
            qubit = int(qubit)
            if not 0 <= qubit < n:
                raise PauliParseError(f"qubit {qubit} out of range for n={n}")
            if letter not in _BITS:
                raise PauliParseError(f"invalid Pauli letter {letter!r}")
            bx, bz = _BITS[letter]
            x |= bx << qubit
            z |= bz << qubit
        return cls(n, x, z, phase)

    @classmethod
    def from_vector(cls, vector: Sequence[int], phase: int = 0) -> "PauliOperator":
        """Build from a length-2n (x|z) GF(2) vector."""
        vector = np.asarray(vector, dtype=np.uint8).ravel()
        if vector.size % 2:
            raise PauliLengthMismatch("symplectic vector must have even length")
        n = vector.size // 2
        x = z = 0
        for q in range(n):
            if vector[q] & 1:
                x |= 1 << q
            if vector[n + q] & 1:
                z |= 1 << q
        return cls(n, x, z, phase)

    # -- views ----------------------------------------------------------

    @property
    def symplectic_int(self) -> int:
        """x bits in positions [0, n), z bits in [n, 2n)."""
        return self.x_bits | (self.z_bits << self.n)

    def to_vector(self) -> np.ndarray:
        """Length-2n (x|z) GF(2) vector."""
        out = np.zeros(2 * self.n, dtype=np.uint8)
        for q in range(self.n):
            out[q] = (self.x_bits >> q) & 1
            out[self.n + q] = (self.z_bits >> q) & 1
        return out

    def letter(self, qubit: int) -> str:
        """I, X, Y or Z on one qubit."""
        return _LETTERS[((self.x_bits >> qubit) & 1, (self.z_bits >> qubit) & 1)]

    @property
    def support(self) -> Support:
        """Qubits acted on non-trivially."""
        mask = self.x_bits | self.z_bits
        return Support(frozenset(q for q in range(self.n) if (mask >> q) & 1))

    @property
    def weight(self) -> int:
        """Number of qubits in the support."""
        return (self.x_bits | self.z_bits).bit_count()

    @property
    def is_identity(self) -> bool:
        """True for any phase times the identity."""
        return self.x_bits == 0 and self.z_bits == 0

    @property
    def is_hermitian(self) -> bool:
        """True when the phase is +1 or -1."""
        return self.phase % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian operators."""
        self.require_hermitian()
        return 1 if self.phase == 0 else -1

    def require_hermitian(self) -> "PauliOperator":
        """Return self, or raise NonHermitianPauli for a phase of ±i."""
        if not self.is_hermitian:
            raise NonHermitianPauli(f"{self} has phase ±i and is not an observable")
        return self

    # -- algebra --------------------------------------------------------

    def _check_n(self, other: "PauliOperator") -> None:
        if self.n != other.n:
            raise PauliLengthMismatch(f"qubit counts differ: {self.n} vs {other.n}")

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def __neg__(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x_bits, self.z_bits, self.phase + 2)

    def commutes_with(self, other: "PauliOperator") -> bool:
        """True when the two operators commute."""
        return commutes(self, other) == 0

    def with_phase(self, phase: int) -> "PauliOperator":
        """Same Pauli letters with the phase replaced."""
        return PauliOperator(self.n, self.x_bits, self.z_bits, phase)

    def unsigned(self) -> "PauliOperator":
        """Same Pauli letters with phase +1."""
        return self.with_phase(0)

    def hermitian_part(self) -> "PauliOperator":
        """Drop a factor of ±i so the operator becomes Hermitian."""
        if self.is_hermitian:
            return self
        return self.with_phase(self.phase + 1)

    # -- text -----------------------------------------------------------

    def __str__(self) -> str:
        return format_pauli(self)

    def to_dict(self) -> Dict[str, Any]:
        """Sparse JSON form: n, terms and sign."""
        terms = {str(q): self.letter(q) for q in self.support}
        return {"n": self.n, "terms": terms, "sign": _SIGN_TEXT[self.phase]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PauliOperator":
        """Parse the sparse JSON form."""
        try:
            n = int(data["n"])
            sign = data.get("sign", "+")
            if sign not in _SIGN_PHASE:
                raise PauliParseError(f"invalid sign {sign!r}")
            return cls.from_terms(n, {int(q): l for q, l in data.get("terms", {}).items()},
                                  _SIGN_PHASE[sign])
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, PauliParseError):
                raise
            raise PauliParseError(f"malformed sparse Pauli: {e}") from e


def multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    """Exact product pq including the phase."""
    p._check_n(q)
    x1, z1, x2, z2 = p.x_bits, p.z_bits, q.x_bits, q.z_bits
    nx1, nz1, nx2, nz2 = ~x1, ~z1, ~x2, ~z2
    # σaσb = +iσc for (X,Y), (Y,Z), (Z,X) and -iσc for the reversed orders
    plus = (x1 & nz1 & x2 & z2) | (x1 & z1 & nx2 & z2) | (nx1 & z1 & x2 & nz2)
    minus = (x1 & z1 & x2 & nz2) | (nx1 & z1 & x2 & z2) | (x1 & nz1 & nx2 & z2)
    phase = p.phase + q.phase + plus.bit_count() - minus.bit_count()
    return PauliOperator(p.n, x1 ^ x2, z1 ^ z2, phase)


def product(operators: Iterable[PauliOperator], n: int) -> PauliOperator:
    """Ordered product, identity for an empty iterable."""
    result = PauliOperator.identity(n)
    for op in operators:
        result = multiply(result, op)
    return result


def commutes(p: PauliOperator, q: PauliOperator) -> int:
    """Symplectic inner product: 0 if pq = qp, 1 if pq = -qp."""
    p._check_n(q)
    return ((p.x_bits & q.z_bits).bit_count() + (p.z_bits & q.x_bits).bit_count()) & 1


def parse_pauli(text: str) -> PauliOperator:
    """
    Parse ``[+-]?(i)?[IXYZ]+``; the first letter acts on qubit 0.

    >>> parse_pauli("+XZI").x_bits, parse_pauli("+XZI").z_bits
    (1, 2)
    """
    if not isinstance(text, str) or not text:
        raise PauliParseError("empty Pauli string")
    match = _PAULI_RE.match(text.strip())
    if not match:
        raise PauliParseError(f"malformed Pauli string {text!r}")
    sign, imag, letters = match.groups()
    phase = (2 if sign == "-" else 0) + (1 if imag else 0)
    return PauliOperator.from_terms(len(letters), dict(enumerate(letters)), phase)


def format_pauli(p: PauliOperator) -> str:
    """Canonical text form; the sign is always written."""
    prefix = {0: "+", 1: "+i", 2: "-", 3: "-i"}[p.phase]
    return prefix + "".join(p.letter(q) for q in range(p.n))


def signed_observable(text: str) -> PauliOperator:
    """Parse a Pauli and reject ±i phases."""
    return parse_pauli(text).require_hermitian()
