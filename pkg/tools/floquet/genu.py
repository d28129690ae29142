"""
Generalised logical unitaries across a conjugate pair.

A unitary U that maps the code space of A into the code space of B in a way
that measurement cannot distinguish is written as exp(i sum_b phi_b b) U_A,
where each b is a product of the rebased conjugate basis of B and U_A is
code-preserving on A. This module checks the defining conditions on a dense
U, recovers the angles with a Walsh-Hadamard transform, and evaluates the
connected correlations such an operator creates between elements of A.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from tools.stabiliser import gf2
from tools.stabiliser.conjugacy import ConjugatePair, rebased_products
from tools.stabiliser.errors import (
    NonUnitaryOperator,
    OutsideConjugateGroup,
    PauliParseError,
    ReconstructionFailure,
    StateNotInCodespace,
    SupportOverlap,
)
from tools.stabiliser.group import StabiliserGroup, code_distance, normaliser_logicals
from tools.stabiliser.locality import Lattice, Region
from tools.stabiliser.pauli import PauliOperator, commutes, multiply, product

from .dense import (
    DEFAULT_TOL,
    DenseOperator,
    DenseState,
    OracleReport,
    all_outcomes,
    apply_pauli,
    in_codespace,
    operator_norm,
    pauli_matrix,
    project,
    projector_matrix,
    random_codespace_state,
    require_dense,
    require_state,
)

logger = logging.getLogger(__name__)

ANGLE_TOL = 1e-9
CLIFFORD_GATES = ("H", "S", "SDG", "X", "Y", "Z", "CNOT", "CZ")
_TWO_QUBIT = ("CNOT", "CZ")


def _subset_text(bits: Sequence[int]) -> str:
    return "".join(str(int(b) & 1) for b in bits)


def _subset_int(bits: Sequence[int]) -> int:
    return sum((int(b) & 1) << i for i, b in enumerate(bits))


def _distance_to_multiple(angle: float, step: float) -> float:
    r = math.fmod(angle, step)
    if r < 0:
        r += step
    return min(r, step - r)


@dataclass(frozen=True)
class GenTerm:
    subset: Tuple[int, ...]
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "subset", tuple(int(b) & 1 for b in self.subset))
        if not any(self.subset):
            raise ValueError("the empty subset is a global phase, not a term")

    @property
    def transversal(self) -> bool:
        """Angle is a multiple of pi/2, so the term is a Pauli up to phase."""
        return _distance_to_multiple(self.angle, math.pi / 2) <= ANGLE_TOL

    def operator(self, pair: ConjugatePair) -> PauliOperator:
        return rebased_products(pair, self.subset)

    def to_dict(self) -> Dict[str, Any]:
        return {"subset": _subset_text(self.subset), "phi": self.angle, "transversal": self.transversal}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GenTerm":
        try:
            return cls(subset=tuple(int(c) for c in data["subset"]), angle=float(data["phi"]))
        except (KeyError, TypeError, ValueError) as e:
            raise PauliParseError(f"malformed term {data!r}: {e}") from e


@dataclass(frozen=True)
class LogicalPart:
    """Code-preserving part: identity, a dense matrix, or a logical Clifford circuit."""

    kind: str = "identity"
    matrix: Optional[np.ndarray] = field(default=None, compare=False)
    gates: Tuple[Tuple[str, Tuple[int, ...]], ...] = ()

    def __post_init__(self):
        if self.kind not in ("identity", "matrix", "clifford"):
            raise ValueError(f"unknown logical part kind {self.kind!r}")
        if self.kind == "matrix" and self.matrix is None:
            raise ValueError("matrix logical part needs a matrix")
        for name, qubits in self.gates:
            if name not in CLIFFORD_GATES:
                raise ValueError(f"unsupported logical gate {name!r}")
            expected = 2 if name in _TWO_QUBIT else 1
            if len(qubits) != expected or len(set(qubits)) != len(qubits):
                raise ValueError(f"{name} acts on {expected} distinct logical qubits, got {list(qubits)}")

    @classmethod
    def clifford(cls, *gates: Tuple[str, Sequence[int]]) -> "LogicalPart":
        return cls(kind="clifford", gates=tuple((g, tuple(q)) for g, q in gates))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "LogicalPart":
        return cls(kind="matrix", matrix=np.asarray(matrix, dtype=complex))

    def materialise(self, pair: ConjugatePair) -> np.ndarray:
        """Full-space unitary. A matrix part is extended by the identity off the code space."""
        require_dense(pair.n)
        dim = 1 << pair.n
        if self.kind == "identity":
            return np.eye(dim, dtype=complex)
        if self.kind == "matrix":
            pa = projector_matrix(pair.group_a.generators, None, pair.n)
            return self.matrix @ pa + (np.eye(dim) - pa)
        logicals = normaliser_logicals(pair.group_a)
        xs = [pauli_matrix(x) for x in logicals.x_ops]
        zs = [pauli_matrix(z) for z in logicals.z_ops]
        eye = np.eye(dim, dtype=complex)
        out = eye
        for name, qubits in self.gates:
            if any(q >= logicals.k for q in qubits):
                raise ValueError(f"gate {name} on {list(qubits)} but the code has {logicals.k} logical qubits")
            out = _gate_matrix(name, qubits, xs, zs, eye) @ out
        return out

    def to_dict(self) -> Dict[str, Any]:
        if self.kind == "matrix":
            return {"kind": "matrix", "real": self.matrix.real.tolist(), "imag": self.matrix.imag.tolist()}
        if self.kind == "clifford":
            return {"kind": "clifford", "gates": [{"gate": g, "qubits": list(q)} for g, q in self.gates]}
        return {"kind": "identity"}

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "LogicalPart":
        if not data:
            return cls()
        kind = data.get("kind", "identity")
        try:
            if kind == "matrix":
                return cls.from_matrix(DenseOperator.from_dict(data).matrix)
            if kind == "clifford":
                return cls.clifford(*[(g["gate"], g["qubits"]) for g in data.get("gates", [])])
        except (KeyError, TypeError) as e:
            raise PauliParseError(f"malformed logical part: {e}") from e
        return cls(kind=kind)


def _gate_matrix(name: str, qubits: Tuple[int, ...], xs: List[np.ndarray],
                 zs: List[np.ndarray], eye: np.ndarray) -> np.ndarray:
    q = qubits[0]
    if name == "X":
        return xs[q]
    if name == "Z":
        return zs[q]
    if name == "Y":
        return 1j * xs[q] @ zs[q]
    if name == "H":
        return (xs[q] + zs[q]) / math.sqrt(2)
    if name == "S":
        return ((1 + 1j) * eye + (1 - 1j) * zs[q]) / 2
    if name == "SDG":
        return ((1 - 1j) * eye + (1 + 1j) * zs[q]) / 2
    t = qubits[1]
    target = xs[t] if name == "CNOT" else zs[t]
    return (eye + zs[q]) / 2 + (eye - zs[q]) @ target / 2


@dataclass(frozen=True)
class GeneralisedUnitarySpec:
    pair: ConjugatePair
    terms: Tuple[GenTerm, ...] = ()
    logical: LogicalPart = field(default_factory=LogicalPart)
    global_phase: float = 0.0
    perturbation: Optional[Tuple[Tuple[int, ...], float]] = None
    residual: Optional[float] = field(default=None, compare=False)
    phase_table: Dict[str, float] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for term in self.terms:
            if len(term.subset) != self.pair.n_m:
                raise ValueError(f"term subset {term.subset} does not match n_m={self.pair.n_m}")

    @property
    def transversal_terms(self) -> Tuple[GenTerm, ...]:
        return tuple(t for t in self.terms if t.transversal)

    @property
    def nontrivial_terms(self) -> Tuple[GenTerm, ...]:
        return tuple(t for t in self.terms if not t.transversal)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "terms": [t.to_dict() for t in self.terms],
            "transversal_terms": [_subset_text(t.subset) for t in self.transversal_terms],
            "logical": self.logical.to_dict(),
            "global_phase": self.global_phase,
        }
        if self.perturbation is not None:
            data["perturbation"] = {"a_subset": _subset_text(self.perturbation[0]),
                                    "epsilon": self.perturbation[1]}
        if self.residual is not None:
            data["residual"] = self.residual
        if self.phase_table:
            data["phase_table"] = dict(self.phase_table)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any], pair: ConjugatePair) -> "GeneralisedUnitarySpec":
        perturbation = None
        if data.get("perturbation"):
            p = data["perturbation"]
            try:
                perturbation = (tuple(int(c) for c in p["a_subset"]), float(p["epsilon"]))
            except (KeyError, TypeError, ValueError) as e:
                raise PauliParseError(f"malformed perturbation: {e}") from e
        return cls(pair=pair,
                   terms=tuple(GenTerm.from_dict(t) for t in data.get("terms", [])),
                   logical=LogicalPart.from_dict(data.get("logical")),
                   global_phase=float(data.get("global_phase", 0.0)),
                   perturbation=perturbation)


def _apply_exponential(ops: Sequence[PauliOperator], angles: Sequence[float], target: np.ndarray) -> np.ndarray:
    out = target
    for op, angle in zip(ops, angles):
        out = math.cos(angle) * out + 1j * math.sin(angle) * apply_pauli(op, out)
    return out


def build_exponential(spec: GeneralisedUnitarySpec) -> DenseOperator:
    """exp(i sum phi_b b) U_A, one commuting factor cos(phi) + i sin(phi) b at a time."""
    pair = spec.pair
    require_dense(pair.n)
    ops = [t.operator(pair) for t in spec.terms]
    for p, q in itertools.combinations(ops, 2):
        assert not commutes(p, q), f"terms {p} and {q} do not commute"
    mat = _apply_exponential(ops, [t.angle for t in spec.terms], spec.logical.materialise(pair))
    if spec.perturbation is not None:
        subset, epsilon = spec.perturbation
        if len(subset) != pair.n_m or not any(subset):
            raise ValueError(f"perturbation subset {subset} is not a nonempty subset of the A basis")
        a = product((ai for ai, bit in zip(pair.basis_a, subset) if bit), pair.n)
        mat = _apply_exponential([a], [epsilon], mat)
    if spec.global_phase:
        mat = np.exp(1j * spec.global_phase) * mat
    return DenseOperator(mat)


CONDITIONS = ("detectability", "self_correction", "logical_preservation",
              "logical_equivalence", "uniform_probability")


@dataclass
class ConditionReport:
    tol: float
    n_m: int
    residuals: Dict[str, float]
    alphas: Dict[str, List[float]] = field(default_factory=dict)
    phases: Dict[str, float] = field(default_factory=dict)
    unitarity: float = 0.0

    def condition_passed(self, name: str) -> bool:
        return self.residuals[name] <= self.tol

    @property
    def failed(self) -> List[str]:
        return [c for c in CONDITIONS if not self.condition_passed(c)]

    @property
    def passed(self) -> bool:
        return not self.failed

    def phase_array(self) -> np.ndarray:
        return np.array([self.phases[_subset_text(m)] for m in all_outcomes(self.n_m)])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "tol": self.tol,
            "conditions": {c: {"passed": self.condition_passed(c), "residual": self.residuals[c]}
                           for c in CONDITIONS},
            "alphas": {k: list(v) for k, v in self.alphas.items()},
            "phases": dict(self.phases),
            "unitarity": self.unitarity,
        }


def _fit_phase(reference: np.ndarray, other: np.ndarray) -> Tuple[float, float]:
    """Best e^{i alpha} with other ~ e^{i alpha} reference, and the residual norm."""
    overlap = np.vdot(reference, other)
    alpha = float(np.angle(overlap)) if abs(overlap) > 1e-12 else 0.0
    return alpha, operator_norm(other - np.exp(1j * alpha) * reference)


def check_conditions(pair: ConjugatePair, u: DenseOperator, tol: float = DEFAULT_TOL,
                     samples: int = 4, seed: int = 0) -> ConditionReport:
    """
    Evaluate the defining conditions of a generalised logical unitary.

    detectability: P_S U P_A = U P_A. self_correction: for each a_i and
    outcome m, P_B(m) a_i U P_A is a phase times P_B(m) U P_A.
    logical_preservation: M(m)^dagger M(m) = 2^-n_m P_A for M(m) = P_B(m) U P_A.
    logical_equivalence: P_Abar P_B(m) U P_A are equal up to phases phi(m),
    with phi(0) = 0. uniform_probability is sampled on random code states.
    """
    n, n_m = pair.n, pair.n_m
    require_dense(n)
    if u.n != n:
        raise ValueError(f"operator acts on {u.n} qubits, pair on {n}")
    mat = u.matrix
    unitarity = operator_norm(mat.conj().T @ mat - np.eye(1 << n))
    if unitarity > max(tol, 1e-8):
        raise NonUnitaryOperator(f"operator is not unitary (residual {unitarity:.3e})")
    pa = projector_matrix(pair.group_a.generators, None, n)
    ps = projector_matrix(pair.intersection.generators, None, n)
    upa = mat @ pa
    a_images = [apply_pauli(a, upa) for a in pair.basis_a]
    scale = 2.0 ** -n_m

    residuals = dict.fromkeys(CONDITIONS, 0.0)
    residuals["detectability"] = operator_norm(ps @ upa - upa)
    alphas: Dict[str, List[float]] = {}
    phases: Dict[str, float] = {}
    reference = None
    for m in all_outcomes(n_m):
        key = _subset_text(m)
        block = project(pair.basis_b, m, upa)
        fits = [_fit_phase(block, project(pair.basis_b, m, image)) for image in a_images]
        alphas[key] = [alpha for alpha, _ in fits]
        residuals["self_correction"] = max([residuals["self_correction"]] + [r for _, r in fits])
        residuals["logical_preservation"] = max(residuals["logical_preservation"],
                                                operator_norm(block.conj().T @ block - scale * pa))
        reduced = project(pair.basis_a, None, block)
        if reference is None:
            reference = reduced
        phi, res = _fit_phase(reference, reduced)
        phases[key] = phi
        residuals["logical_equivalence"] = max(residuals["logical_equivalence"], res)

    rng = np.random.default_rng(seed)
    for _ in range(samples):
        evolved = mat @ random_codespace_state(pair.group_a, rng).vector
        for m in all_outcomes(n_m):
            projected = project(pair.basis_b, m, evolved)
            prob = float(np.vdot(projected, projected).real)
            residuals["uniform_probability"] = max(residuals["uniform_probability"], abs(prob - scale))

    report = ConditionReport(tol=tol, n_m=n_m, residuals=residuals, alphas=alphas,
                             phases=phases, unitarity=unitarity)
    logger.info(f"conditions on n={n}, n_m={n_m}: failed={report.failed}")
    return report


def walsh_hadamard(values: np.ndarray) -> np.ndarray:
    """Unnormalised transform: out[beta] = sum_m values[m] (-1)^popcount(beta & m)."""
    out = np.array(values, dtype=float)
    size = out.shape[0]
    if size & (size - 1):
        raise ValueError(f"length {size} is not a power of two")
    h = 1
    while h < size:
        view = out.reshape(-1, 2, h)
        low, high = view[:, 0, :].copy(), view[:, 1, :].copy()
        view[:, 0, :] = low + high
        view[:, 1, :] = low - high
        h *= 2
    return out


def _characters(n_m: int) -> np.ndarray:
    """chi[beta, m] = (-1)^popcount(beta & m)."""
    idx = np.arange(1 << n_m)
    parity = np.array([[bin(b & m).count("1") & 1 for m in idx] for b in idx])
    return 1 - 2 * parity


def phase_function(terms: Sequence[GenTerm], n_m: int) -> np.ndarray:
    """phi(m) = sum_b phi_b chi_b(m), the eigenphase of exp(i sum phi_b b) on outcome m."""
    chi = _characters(n_m)
    out = np.zeros(1 << n_m)
    for t in terms:
        out += t.angle * chi[_subset_int(t.subset)]
    return out


def angles_equivalent(first: Sequence[GenTerm], second: Sequence[GenTerm], n_m: int,
                      tol: float = 1e-8) -> bool:
    """True when both term lists give the same exponential up to a global phase."""
    diff = phase_function(first, n_m) - phase_function(second, n_m)
    diff = np.angle(np.exp(1j * (diff - diff[0])))
    return bool(np.all(np.abs(diff) <= tol))


def _branch_cost(angles: np.ndarray) -> Tuple[int, float]:
    dists = [_distance_to_multiple(a, math.pi) for a in angles[1:]]
    return sum(d > ANGLE_TOL for d in dists), float(sum(dists))


def _select_branch(phi: np.ndarray, n_m: int) -> np.ndarray:
    """
    Walsh angles of phi, after greedily shifting single entries by +-2pi
    (at most n_m accepted shifts) to minimise the number of terms that are
    not multiples of pi.
    """
    size = 1 << n_m
    angles = walsh_hadamard(phi) / size
    chi = _characters(n_m)
    cost = _branch_cost(angles)
    for _ in range(n_m):
        best = None
        for m in range(1, size):
            for sign in (1, -1):
                trial = angles + sign * 2 * math.pi * chi[:, m] / size
                trial_cost = _branch_cost(trial)
                if trial_cost < cost and (best is None or trial_cost < best[0]):
                    best = (trial_cost, trial)
        if best is None:
            break
        cost, angles = best
        logger.debug(f"branch shift accepted, cost now {cost}")
    return angles


def decompose_canonical(pair: ConjugatePair, u: DenseOperator, tol: float = 1e-8,
                        report: Optional[ConditionReport] = None) -> GeneralisedUnitarySpec:
    """
    Write U P_A as exp(i sum alpha_b b) U_A P_A.

    The phase table phi(m) is taken relative to the all-zero outcome, its
    Walsh transform gives alpha_b, and U_A = P_A exp(-i sum alpha_b b) U P_A.
    Angles are reported in [0, pi); multiples of pi are dropped into the
    global phase of U_A.
    """
    n_m = pair.n_m
    report = report or check_conditions(pair, u, tol)
    if not report.passed:
        raise ReconstructionFailure(f"conditions fail: {', '.join(report.failed)}",
                                    phase_table=dict(report.phases))
    phi = np.angle(np.exp(1j * report.phase_array()))
    angles = _select_branch(phi, n_m)
    terms = []
    for beta in range(1, 1 << n_m):
        angle = math.fmod(angles[beta], math.pi)
        if angle < 0:
            angle += math.pi
        if _distance_to_multiple(angle, math.pi) <= ANGLE_TOL:
            continue
        terms.append(GenTerm(subset=tuple((beta >> i) & 1 for i in range(n_m)), angle=angle))
    ops = [t.operator(pair) for t in terms]
    pa = projector_matrix(pair.group_a.generators, None, pair.n)
    upa = u.matrix @ pa
    ua = pa @ _apply_exponential(ops, [-t.angle for t in terms], upa)
    rebuilt = _apply_exponential(ops, [t.angle for t in terms], ua)
    residual = max(operator_norm(upa - rebuilt), operator_norm(ua.conj().T @ ua - pa))
    if residual > tol:
        logger.error(f"canonical form residual {residual:.3e} exceeds {tol:.1e}")
        raise ReconstructionFailure(f"reconstruction residual {residual:.3e} exceeds tolerance",
                                    phase_table=dict(report.phases), residual=residual)
    spec = GeneralisedUnitarySpec(pair=pair, terms=tuple(terms), logical=LogicalPart.from_matrix(ua),
                                  residual=residual, phase_table=dict(report.phases))
    if spec.transversal_terms:
        logger.info(f"{len(spec.transversal_terms)} transversal Pauli terms in the decomposition")
    return spec


def _require_in_basis_group(pair: ConjugatePair, q: PauliOperator) -> None:
    span = gf2.BitSpan()
    for a in pair.basis_a:
        span.add(a.symplectic_int)
    if not span.contains(q.symplectic_int):
        raise OutsideConjugateGroup(f"{q} is not generated by the conjugate basis of A")


def anticommuting_terms(spec: GeneralisedUnitarySpec, q: PauliOperator) -> Tuple[int, ...]:
    """Indices of the terms whose operator anticommutes with q."""
    return tuple(i for i, t in enumerate(spec.terms) if commutes(q, t.operator(spec.pair)))


def correlation_closed_form(spec: GeneralisedUnitarySpec, a: PauliOperator,
                            a_prime: PauliOperator) -> float:
    """
    |prod_{K(aa')} f| * |1 - prod_{K(a) & K(a')} f^2| with f = cos(2 phi).

    The term subsets must be linearly independent; otherwise cross terms
    between products of terms survive and the formula does not apply.
    """
    pair = spec.pair
    _require_in_basis_group(pair, a)
    _require_in_basis_group(pair, a_prime)
    if spec.terms:
        subsets = np.array([t.subset for t in spec.terms], dtype=np.uint8)
        if gf2.rank(subsets) != len(spec.terms):
            raise ValueError("term subsets are linearly dependent; use correlation_dense")
    f = [math.cos(2 * t.angle) for t in spec.terms]
    k_a = set(anticommuting_terms(spec, a))
    k_ap = set(anticommuting_terms(spec, a_prime))
    k_both = anticommuting_terms(spec, multiply(a, a_prime))
    outer = math.prod(f[i] for i in k_both)
    inner = math.prod(f[i] ** 2 for i in k_a & k_ap)
    return abs(outer) * abs(1 - inner)


def correlation_dense(spec: GeneralisedUnitarySpec, a: PauliOperator, a_prime: PauliOperator,
                      state: DenseState) -> float:
    """|<aa'> - <a><a'>| on exp(i sum phi_b b)|state>."""
    pair = spec.pair
    require_state(pair.n)
    if not in_codespace(pair.group_a, state, 1e-9):
        raise StateNotInCodespace("state is not stabilised by the first group")
    ops = [t.operator(pair) for t in spec.terms]
    evolved = DenseState.normalised(_apply_exponential(ops, [t.angle for t in spec.terms], state.vector))
    both = evolved.expectation(multiply(a, a_prime)).real
    return abs(both - evolved.expectation(a).real * evolved.expectation(a_prime).real)


def _region_distance(lattice: Lattice, first: Region, second: Region) -> float:
    return min(lattice.distance(i, j) for i in first.qubits for j in second.qubits)


def zero_correlation_stabiliser_check(group: StabiliserGroup, a_obs: DenseOperator, b_obs: DenseOperator,
                                      regions: Tuple[Region, Region], tol: float = DEFAULT_TOL,
                                      lattice: Optional[Lattice] = None, locality: Optional[float] = None,
                                      samples: int = 10, seed: int = 0) -> OracleReport:
    """
    Connected correlation of two observables on disjoint small regions
    vanishes on every code state. Regions at least as large as the code
    distance (or closer than ``locality`` on the lattice) skip the check.
    """
    region_a, region_b = regions
    if region_a.qubits & region_b.qubits:
        raise SupportOverlap(f"regions share qubits {sorted(region_a.qubits & region_b.qubits)}")
    require_dense(group.n)
    distance = code_distance(group)
    details: Dict[str, Any] = {"distance": distance, "sizes": [len(region_a), len(region_b)]}
    reason = None
    if distance is not None and max(len(region_a), len(region_b)) >= distance:
        reason = f"region size reaches the code distance {distance}"
    elif lattice is not None and locality is not None:
        separation = _region_distance(lattice, region_a, region_b)
        details["separation"] = separation
        if separation <= locality:
            reason = f"regions are only {separation:.3f} apart, within the bound {locality}"
    if reason is not None:
        logger.warning(f"zero-correlation check skipped: {reason}")
        details["skipped"] = True
        details["reason"] = reason
        return OracleReport("zero_correlation", True, tol, {}, details)
    rng = np.random.default_rng(seed)
    worst = 0.0
    a_mat, b_mat = a_obs.matrix, b_obs.matrix
    for _ in range(samples):
        psi = random_codespace_state(group, rng).vector
        a_psi = a_mat @ psi
        both = np.vdot(psi, a_mat @ (b_mat @ psi))
        worst = max(worst, abs(both - np.vdot(psi, a_psi) * np.vdot(psi, b_mat @ psi)))
    details["skipped"] = False
    return OracleReport("zero_correlation", worst <= tol, tol, {"correlation": float(worst)}, details)
