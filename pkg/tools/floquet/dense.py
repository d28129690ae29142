"""
Dense statevector and operator oracle.

Matrices are built in the computational basis with qubit 0 as the most
significant tensor factor, so the basis index of a bit string c has bit n-1-q
for qubit q. Paulis are never materialised as Kronecker products; they are
applied as a permutation of basis states times a phase vector.

Operator checks refuse above FLOQUET_MAX_DENSE_QUBITS, state-only checks
above FLOQUET_MAX_STATE_QUBITS.
"""

from __future__ import annotations

import itertools
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from tools.stabiliser.conjugacy import ConjugatePair, NotReversible
from tools.stabiliser.errors import (
    DimensionLimitExceeded,
    NonUnitaryOperator,
    NotCodePreserving,
    NotInNormaliser,
    PauliLengthMismatch,
    StateNotInCodespace,
)
from tools.stabiliser.group import StabiliserGroup, normaliser_logicals
from tools.stabiliser.locality import relocalise
from tools.stabiliser.outcomes import ForcedOutcomes
from tools.stabiliser.pauli import PauliOperator, commutes

from .sequence import FloquetSequence, logical_pauli, period_action

logger = logging.getLogger(__name__)

MAX_DENSE_QUBITS = int(os.environ.get("FLOQUET_MAX_DENSE_QUBITS", "12"))
MAX_STATE_QUBITS = int(os.environ.get("FLOQUET_MAX_STATE_QUBITS", "20"))
DEFAULT_TOL = float(os.environ.get("FLOQUET_DEFAULT_TOL", "1e-10"))

PairLike = Union[ConjugatePair, NotReversible]


def require_dense(n: int) -> None:
    if n > MAX_DENSE_QUBITS:
        raise DimensionLimitExceeded(
            f"{n} qubits exceeds the dense operator limit of {MAX_DENSE_QUBITS}")


def require_state(n: int) -> None:
    if n > MAX_STATE_QUBITS:
        raise DimensionLimitExceeded(
            f"{n} qubits exceeds the statevector limit of {MAX_STATE_QUBITS}")


def _masks(p: PauliOperator) -> Tuple[int, int]:
    xm = zm = 0
    for q in range(p.n):
        bit = 1 << (p.n - 1 - q)
        if (p.x_bits >> q) & 1:
            xm |= bit
        if (p.z_bits >> q) & 1:
            zm |= bit
    return xm, zm


def pauli_action(p: PauliOperator) -> Tuple[np.ndarray, np.ndarray]:
    """
    Column c of the Pauli matrix has a single entry vals[c] in row c ^ xmask.

    vals[c] = i^(phase + #Y) * (-1)^popcount(c & zmask).
    """
    dim = 1 << p.n
    cols = np.arange(dim, dtype=np.int64)
    xm, zm = _masks(p)
    parity = np.zeros(dim, dtype=np.int64)
    masked = cols & zm
    while zm:
        low = zm & -zm
        parity ^= (masked & low) != 0
        zm ^= low
    n_y = bin(p.x_bits & p.z_bits).count("1")
    scale = 1j ** ((p.phase + n_y) % 4)
    vals = scale * (1 - 2 * parity).astype(complex)
    return cols ^ xm, vals


def pauli_matrix(p: PauliOperator) -> np.ndarray:
    require_dense(p.n)
    rows, vals = pauli_action(p)
    dim = 1 << p.n
    mat = np.zeros((dim, dim), dtype=complex)
    mat[rows, np.arange(dim)] = vals
    return mat


def apply_pauli(p: PauliOperator, target: np.ndarray) -> np.ndarray:
    """P @ target for a state vector or a matrix, without building P."""
    rows, vals = pauli_action(p)
    # row r of the result reads column r ^ xmask of P, which is rows[r]
    source = rows
    if target.ndim == 1:
        return vals[source] * target[source]
    return vals[source][:, None] * target[source]


@dataclass(frozen=True)
class DenseOperator:
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"operator must be square, got shape {mat.shape}")
        dim = mat.shape[0]
        if dim & (dim - 1):
            raise ValueError(f"dimension {dim} is not a power of two")
        if not np.all(np.isfinite(mat)):
            raise ValueError("operator has non-finite entries")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.dim.bit_length() - 1

    def dagger(self) -> "DenseOperator":
        return DenseOperator(self.matrix.conj().T)

    def __matmul__(self, other: "DenseOperator") -> "DenseOperator":
        return DenseOperator(self.matrix @ other.matrix)

    def is_unitary(self, tol: float = DEFAULT_TOL) -> bool:
        return operator_norm(self.matrix.conj().T @ self.matrix - np.eye(self.dim)) <= tol

    def is_hermitian(self, tol: float = DEFAULT_TOL) -> bool:
        return operator_norm(self.matrix - self.matrix.conj().T) <= tol

    def distance(self, other: "DenseOperator") -> float:
        return operator_norm(self.matrix - other.matrix)

    @classmethod
    def from_pauli(cls, p: PauliOperator) -> "DenseOperator":
        return cls(pauli_matrix(p))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DenseOperator":
        real = np.asarray(data["real"], dtype=float)
        imag = np.asarray(data.get("imag", np.zeros_like(real)), dtype=float)
        return cls(real + 1j * imag)

    def to_dict(self) -> Dict[str, Any]:
        return {"real": self.matrix.real.tolist(), "imag": self.matrix.imag.tolist()}


@dataclass(frozen=True)
class DenseState:
    vector: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=complex).reshape(-1)
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state is not normalised (norm {norm})")
        vec.setflags(write=False)
        object.__setattr__(self, "vector", vec)

    @property
    def dim(self) -> int:
        return self.vector.shape[0]

    @property
    def n(self) -> int:
        return self.dim.bit_length() - 1

    @classmethod
    def normalised(cls, vector: np.ndarray) -> "DenseState":
        vec = np.asarray(vector, dtype=complex).reshape(-1)
        return cls(vec / np.linalg.norm(vec))

    @classmethod
    def basis(cls, n: int, index: int = 0) -> "DenseState":
        vec = np.zeros(1 << n, dtype=complex)
        vec[index] = 1
        return cls(vec)

    def expectation(self, p: PauliOperator) -> complex:
        return complex(np.vdot(self.vector, apply_pauli(p, self.vector)))


def operator_norm(mat: np.ndarray, iterations: int = 200, rel_tol: float = 1e-10) -> float:
    """
    Spectral norm by power iteration on M^dagger M.

    If the estimate has not settled after ``iterations`` rounds the Frobenius
    norm is returned instead, which bounds the spectral norm from above.
    """
    mat = np.asarray(mat)
    frobenius = float(np.linalg.norm(mat))
    if frobenius == 0.0:
        return 0.0
    rng = np.random.default_rng(0)
    v = rng.standard_normal(mat.shape[1]) + 1j * rng.standard_normal(mat.shape[1])
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(iterations):
        w = mat.conj().T @ (mat @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        if abs(norm - estimate) <= rel_tol * norm:
            return float(np.sqrt(norm))
        estimate = norm
    logger.debug("power iteration did not settle; using the Frobenius bound")
    return frobenius


def _bits(value: int, width: int) -> Tuple[int, ...]:
    return tuple((value >> i) & 1 for i in range(width))


def all_outcomes(width: int) -> List[Tuple[int, ...]]:
    """Every outcome bit vector of the given width; bit i of the index is entry i."""
    return [_bits(v, width) for v in range(1 << width)]


def project(ops: Sequence[PauliOperator], bits: Optional[Sequence[int]], target: np.ndarray) -> np.ndarray:
    """Apply prod_j (I + (-1)^bits[j] op_j)/2 to a vector or matrix."""
    if bits is None:
        bits = [0] * len(ops)
    if len(bits) != len(ops):
        raise ValueError(f"{len(bits)} outcome bits for {len(ops)} generators")
    out = np.asarray(target, dtype=complex)
    for op, bit in zip(ops, bits):
        flipped = apply_pauli(op, out)
        out = (out - flipped) / 2 if int(bit) & 1 else (out + flipped) / 2
    return out


def projector_matrix(ops: Sequence[PauliOperator], bits: Optional[Sequence[int]], n: int) -> np.ndarray:
    require_dense(n)
    for op in ops:
        if op.n != n:
            raise PauliLengthMismatch(f"generator {op} does not act on {n} qubits")
    return project(ops, bits, np.eye(1 << n, dtype=complex))


def projector(g: StabiliserGroup, m: Optional[Sequence[int]] = None) -> DenseOperator:
    """Projector onto the joint eigenspace with eigenvalue sign_j * (-1)^m_j."""
    if m is not None and len(m) != g.rank:
        raise ValueError(f"outcome vector has length {len(m)}, group has rank {g.rank}")
    return DenseOperator(projector_matrix(g.generators, m, g.n))


def random_codespace_state(g: StabiliserGroup, rng: Optional[np.random.Generator] = None) -> DenseState:
    require_state(g.n)
    rng = rng if rng is not None else np.random.default_rng()
    dim = 1 << g.n
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return DenseState.normalised(project(g.generators, None, vec))


def in_codespace(g: StabiliserGroup, state: DenseState, tol: float = DEFAULT_TOL) -> bool:
    return float(np.linalg.norm(project(g.generators, None, state.vector) - state.vector)) <= tol


def embed_local_operator(n: int, qubits: Sequence[int], local: np.ndarray) -> DenseOperator:
    """Extend an operator on the listed qubits (first listed = most significant) by identity."""
    require_dense(n)
    qubits = list(qubits)
    local = np.asarray(local, dtype=complex)
    size = 1 << len(qubits)
    if local.shape != (size, size):
        raise ValueError(f"local operator must be {size}x{size} for {len(qubits)} qubits")
    if len(set(qubits)) != len(qubits) or any(not 0 <= q < n for q in qubits):
        raise ValueError(f"invalid qubit list {qubits}")
    dim = 1 << n
    cols = np.arange(dim, dtype=np.int64)
    shifts = [n - 1 - q for q in qubits]
    local_index = np.zeros(dim, dtype=np.int64)
    cleared = cols.copy()
    for pos, shift in enumerate(shifts):
        local_index |= ((cols >> shift) & 1) << (len(qubits) - 1 - pos)
        cleared &= ~(1 << shift)
    full = np.zeros((dim, dim), dtype=complex)
    for li in range(size):
        row_bits = 0
        for pos, shift in enumerate(shifts):
            if (li >> (len(qubits) - 1 - pos)) & 1:
                row_bits |= 1 << shift
        rows = cleared | row_bits
        full[rows, cols] += local[li, local_index]
    return DenseOperator(full)


@dataclass
class OracleReport:
    """Result of one dense check; ``residuals`` holds the worst residual per identity."""

    name: str
    passed: bool
    tol: float
    residuals: Dict[str, float] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "tol": self.tol,
                "max_residual": self.max_residual, "residuals": dict(self.residuals),
                "details": dict(self.details)}


def _parallel_max(fn, items: Iterable[Any], threads: int) -> List[Any]:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def verify_pair_identities(pair: PairLike, tol: float = DEFAULT_TOL, threads: int = 1) -> OracleReport:
    """
    Check P_B P_A P_B = 2^-n_m P_B and P_A P_B P_A = 2^-n_m P_A over every pair
    of outcome vectors, where P_A and P_B project onto the conjugate bases only.
    """
    n, n_m = pair.n, pair.n_m
    require_dense(n)
    scale = 2.0 ** -n_m
    outcomes = all_outcomes(n_m)
    b_projectors = [projector_matrix(pair.basis_b, m, n) for m in outcomes]

    def _one(m_a: Tuple[int, ...]) -> Tuple[float, float]:
        pa = projector_matrix(pair.basis_a, m_a, n)
        worst_b = worst_a = 0.0
        for pb in b_projectors:
            worst_b = max(worst_b, operator_norm(pb @ pa @ pb - scale * pb))
            worst_a = max(worst_a, operator_norm(pa @ pb @ pa - scale * pa))
        return worst_b, worst_a

    results = _parallel_max(_one, outcomes, threads)
    residuals = {"b_side": max(r[0] for r in results), "a_side": max(r[1] for r in results)}
    passed = all(v <= tol for v in residuals.values())
    logger.info(f"pair identities on n={n}, n_m={n_m}: passed={passed}")
    return OracleReport("pair_identities", passed, tol, residuals,
                        {"n": n, "n_m": n_m, "outcome_vectors": len(outcomes)})


def uniform_probability_check(pair: PairLike, state: DenseState, tol: float = DEFAULT_TOL) -> OracleReport:
    """Each outcome of measuring the B conjugate basis has probability 2^-n_m."""
    require_state(pair.n)
    if state.n != pair.n:
        raise PauliLengthMismatch(f"state has {state.n} qubits, pair acts on {pair.n}")
    if not in_codespace(pair.group_a, state, max(tol, 1e-9)):
        raise StateNotInCodespace("state is not stabilised by the first group")
    target = 2.0 ** -pair.n_m
    probabilities = {}
    for m in all_outcomes(pair.n_m):
        projected = project(pair.basis_b, m, state.vector)
        probabilities["".join(map(str, m))] = float(np.vdot(projected, projected).real)
    residual = max(abs(p - target) for p in probabilities.values())
    return OracleReport("uniform_probability", residual <= tol, tol, {"probability": residual},
                        {"expected": target, "probabilities": probabilities})


def transition_K(pair: ConjugatePair, m: Optional[Sequence[int]] = None) -> DenseOperator:
    """2^(n_m/2) P_B(m) P_A: the measurement map restricted to the code space of A."""
    require_dense(pair.n)
    pa = projector_matrix(pair.group_a.generators, None, pair.n)
    return DenseOperator(2.0 ** (pair.n_m / 2) * project(pair.basis_b, m, pa))


def transition_V(pair: ConjugatePair) -> DenseOperator:
    """prod_i (a_i + b_i)/sqrt(2), a unitary agreeing with K(0) on the code space."""
    require_dense(pair.n)
    factors = []
    for a, b in zip(pair.basis_a, pair.basis_b):
        factors.append((pauli_matrix(a) + pauli_matrix(b)) / np.sqrt(2))
    for f1, f2 in itertools.combinations(factors, 2):
        assert operator_norm(f1 @ f2 - f2 @ f1) <= 1e-12, "factors of V must commute"
    mat = np.eye(1 << pair.n, dtype=complex)
    for f in factors:
        mat = f @ mat
    return DenseOperator(mat)


def verify_transition_operators(pair: ConjugatePair, tol: float = DEFAULT_TOL,
                                threads: int = 1) -> OracleReport:
    """K^dagger K = P_A, K_reverse K = P_A for every outcome, V P_A = K(0) and V unitary."""
    require_dense(pair.n)
    pa = projector_matrix(pair.group_a.generators, None, pair.n)

    def _one(m: Tuple[int, ...]) -> Tuple[float, float]:
        k = transition_K(pair, m).matrix
        back = transition_K(pair.reversed(m)).matrix
        return operator_norm(k.conj().T @ k - pa), operator_norm(back @ k - pa)

    results = _parallel_max(_one, all_outcomes(pair.n_m), threads)
    v = transition_V(pair).matrix
    residuals = {
        "isometry": max(r[0] for r in results),
        "round_trip": max(r[1] for r in results),
        "v_matches_k": operator_norm(v @ pa - transition_K(pair).matrix),
        "v_unitary": operator_norm(v.conj().T @ v - np.eye(1 << pair.n)),
    }
    passed = all(r <= tol for r in residuals.values())
    logger.info(f"transition operators on n={pair.n}: passed={passed}")
    return OracleReport("transition_operators", passed, tol, residuals, {"n": pair.n, "n_m": pair.n_m})


def logical_expectation_check(pair: ConjugatePair, state: DenseState, q: PauliOperator,
                              tol: float = DEFAULT_TOL) -> OracleReport:
    """
    <Q> before the transition equals <Q'> in every post-measurement state,
    with Q' the representative rewritten to commute with B.
    """
    require_state(pair.n)
    if any(commutes(q, g) for g in pair.group_a.generators):
        raise NotInNormaliser(f"{q} does not commute with the first group")
    if not in_codespace(pair.group_a, state, max(tol, 1e-9)):
        raise StateNotInCodespace("state is not stabilised by the first group")
    rewritten = relocalise(pair, q)
    before = state.expectation(q)
    after = {}
    residual = 0.0
    for m in all_outcomes(pair.n_m):
        projected = project(pair.basis_b, m, state.vector)
        prob = float(np.vdot(projected, projected).real)
        value = complex(np.vdot(projected, apply_pauli(rewritten, projected))) / prob
        after["".join(map(str, m))] = value.real
        residual = max(residual, abs(value - before))
    return OracleReport("logical_expectation", residual <= tol, tol, {"expectation": residual},
                        {"logical": str(q), "rewritten": str(rewritten),
                         "before": before.real, "after": after})


def measure_state(state: DenseState, b: PauliOperator, outcome: int) -> Tuple[DenseState, float]:
    """Project onto the outcome (+1 or -1) of b; returns the normalised state and its probability."""
    flipped = apply_pauli(b, state.vector)
    projected = (state.vector + outcome * flipped) / 2
    prob = float(np.vdot(projected, projected).real)
    if prob <= 1e-15:
        raise ValueError(f"outcome {outcome:+d} of {b} has zero probability")
    return DenseState.normalised(projected), prob


def period_unitary(seq: FloquetSequence, unitaries: Optional[Sequence[Optional[DenseOperator]]] = None,
                   tol: float = DEFAULT_TOL) -> DenseOperator:
    """
    V_{T-1} U_{T-1} ... V_0 U_0 over one pass of the sequence.

    ``unitaries`` holds one optional operator per transition, applied before
    it. Each must be unitary and commute with the projector of the group it
    acts on.
    """
    pairs = seq.pairs
    require_dense(seq.n)
    if unitaries is None:
        unitaries = [None] * len(pairs)
    if len(unitaries) != len(pairs):
        raise ValueError(f"expected {len(pairs)} interleaved unitaries, got {len(unitaries)}")
    total = np.eye(1 << seq.n, dtype=complex)
    for t, (pair, u) in enumerate(zip(pairs, unitaries)):
        if u is not None:
            if u.n != seq.n:
                raise PauliLengthMismatch(f"unitary {t} acts on {u.n} qubits, sequence on {seq.n}")
            if not u.is_unitary(tol):
                raise NonUnitaryOperator(f"unitary {t} is not unitary")
            pa = projector_matrix(pair.group_a.generators, None, seq.n)
            if operator_norm(u.matrix @ pa - pa @ u.matrix) > tol:
                raise NotCodePreserving(f"unitary {t} does not preserve the code space of group {t}")
            total = u.matrix @ total
        total = transition_V(pair).matrix @ total
    logger.debug(f"composed {len(pairs)} transition unitaries on n={seq.n}")
    return DenseOperator(total)


def verify_period_action(seq: FloquetSequence, tol: float = DEFAULT_TOL) -> OracleReport:
    """
    Conjugating each initial logical by the period unitary gives, on the code
    space, the image the tableau assigns it (up to sign).
    """
    action = period_action(seq, ForcedOutcomes([1] * seq.outcomes_per_period))
    w = period_unitary(seq, tol=tol).matrix
    p0 = projector_matrix(seq.isgs[0].generators, None, seq.n)
    wp = w @ p0
    initial = normaliser_logicals(seq.isgs[0])
    residuals = {"unitary": operator_norm(w.conj().T @ w - np.eye(1 << seq.n))}
    images = []
    for j, q in enumerate(initial.operators()):
        column = action.symplectic[:, j]
        image = logical_pauli(initial, column) if column.any() else PauliOperator.identity(seq.n)
        lhs = w @ apply_pauli(q, p0)
        rhs = apply_pauli(image, wp)
        residuals[str(q)] = min(operator_norm(lhs - rhs), operator_norm(lhs + rhs))
        images.append(str(image))
    passed = all(r <= tol for r in residuals.values())
    logger.info(f"period action of {seq.name or '<unnamed>'} on n={seq.n}: passed={passed}")
    return OracleReport("period_action", passed, tol, residuals,
                        {"k": initial.k, "images": images,
                         "symplectic": action.symplectic.astype(int).tolist()})
