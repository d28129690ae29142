"""
Floquet sequences: execution, logical tracking and the period's logical action.

A sequence is a list of instantaneous stabiliser groups. Each adjacent pair is
checked for reversibility; running a step measures the conjugate basis of the
next group, and logical representatives are multiplied by elements of the
current group so that they survive the measurement.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from tools.stabiliser import gf2
from tools.stabiliser.conjugacy import ConjugatePair, NotReversible, check_reversible
from tools.stabiliser.errors import (
    GroupMismatch,
    IrreversibleTransition,
    NonPeriodicSequence,
    NotInNormaliser,
    PauliParseError,
)
from tools.stabiliser.group import (
    LogicalBasis,
    StabiliserGroup,
    contains,
    measure_pauli,
    normaliser_logicals,
)
from tools.stabiliser.locality import Lattice, check_local_reversibility
from tools.stabiliser.outcomes import ForcedOutcomes, OutcomeSource
from tools.stabiliser.pauli import PauliOperator, commutes, multiply, product

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FloquetSequence:
    isgs: Tuple[StabiliserGroup, ...]
    lattice: Optional[Lattice] = None
    l: Optional[float] = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "isgs", tuple(self.isgs))

    @property
    def n(self) -> int:
        return self.isgs[0].n

    @property
    def tau(self) -> int:
        return len(self.isgs)

    @cached_property
    def transitions(self) -> Tuple[Union[ConjugatePair, NotReversible], ...]:
        return tuple(check_reversible(a, b) for a, b in zip(self.isgs, self.isgs[1:]))

    @property
    def pairs(self) -> Tuple[ConjugatePair, ...]:
        """Validated conjugate pairs; raises on the first irreversible transition."""
        for index, t in enumerate(self.transitions):
            if not t.reversible:
                raise IrreversibleTransition(
                    f"transition {index} is not reversible (witness {t.witness})",
                    index=index, witness=t.witness)
        return self.transitions

    @property
    def is_periodic(self) -> bool:
        return self.tau >= 2 and self.isgs[0].same_unsigned(self.isgs[-1])

    @property
    def outcomes_per_period(self) -> int:
        return sum(p.n_m for p in self.pairs)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"name": self.name, "n": self.n,
                                "isgs": [g.to_dict() for g in self.isgs]}
        if self.lattice is not None:
            data["lattice"] = self.lattice.to_dict()
        if self.l is not None:
            data["l"] = self.l
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FloquetSequence":
        try:
            isgs = tuple(StabiliserGroup.from_dict(g) for g in data["isgs"])
        except (KeyError, TypeError) as e:
            raise PauliParseError(f"malformed sequence JSON: {e}") from e
        if len(isgs) < 2:
            raise PauliParseError("a sequence needs at least two groups")
        lattice = Lattice.from_dict(data["lattice"]) if data.get("lattice") else None
        l = data.get("l")
        return cls(isgs=isgs, lattice=lattice, l=float(l) if l is not None else None,
                   name=data.get("name", ""))


@dataclass
class SequenceReport:
    valid: bool
    periodic: bool
    transitions: List[Dict[str, Any]] = field(default_factory=list)
    problems: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"valid": self.valid, "periodic": self.periodic,
                "transitions": self.transitions, "problems": self.problems}


def validate(seq: FloquetSequence) -> SequenceReport:
    """Run every adjacency check and collect a report."""
    problems: List[str] = []
    entries: List[Dict[str, Any]] = []
    if seq.tau < 2:
        problems.append("a sequence needs at least two groups")
    ranks = {g.rank for g in seq.isgs}
    if len(ranks) > 1:
        problems.append(f"groups have differing ranks {sorted(ranks)}")
        return SequenceReport(valid=False, periodic=False, problems=problems)
    for index, t in enumerate(seq.transitions):
        entry: Dict[str, Any] = {"index": index, "reversible": t.reversible, "n_m": t.n_m}
        if not t.reversible:
            entry["witness"] = str(t.witness)
            problems.append(f"transition {index} is not reversible")
        else:
            for issue in t.problems():
                problems.append(f"transition {index}: {issue}")
            if seq.lattice is not None and seq.l is not None:
                local = check_local_reversibility(t, seq.lattice, seq.l)
                entry["max_diameter"] = local.max_diameter
                entry["local"] = local.passed
                if not local.passed:
                    problems.append(f"transition {index} is not {seq.l}-locally reversible")
        entries.append(entry)
    report = SequenceReport(valid=not problems, periodic=seq.is_periodic,
                            transitions=entries, problems=problems)
    logger.info(f"validated sequence {seq.name or '<unnamed>'}: valid={report.valid}")
    return report


@dataclass(frozen=True)
class RunState:
    t: int
    group: StabiliserGroup
    logicals: LogicalBasis
    outcomes: Tuple[int, ...] = ()
    history: Tuple[Dict[str, Any], ...] = ()


def initial_state(seq: FloquetSequence, logicals: Optional[LogicalBasis] = None) -> RunState:
    first = seq.isgs[0]
    return RunState(t=0, group=first, logicals=logicals or normaliser_logicals(first))


def _signed_in(group: StabiliserGroup, op: PauliOperator) -> PauliOperator:
    """The element ±op that actually lies in the group."""
    membership = contains(group, op)
    if not membership.member:
        raise GroupMismatch(f"{op} is not an element of the current group")
    return op.with_phase(op.phase - membership.phase)


def rewrite_logicals(logicals: LogicalBasis, pair: ConjugatePair,
                     group: Optional[StabiliserGroup] = None) -> LogicalBasis:
    """
    Replace each Q by a·Q, where a multiplies the a_i whose partner b_i
    anticommutes with Q, so the result commutes with the whole of B.

    When ``group`` is given, each a_i takes its sign from that group (the
    signs actually stabilising the current state) instead of pair.group_a.
    """
    reference = group or pair.group_a
    rewritten = []
    for q in logicals.operators():
        if any(commutes(q, g) for g in reference.generators):
            raise NotInNormaliser(f"{q} does not commute with the current group")
        chosen = [a for a, b in zip(pair.basis_a, pair.basis_b) if commutes(q, b)]
        if group is not None:
            chosen = [_signed_in(group, a) for a in chosen]
        rewritten.append(multiply(product(chosen, q.n), q))
    return LogicalBasis.from_operators(rewritten)


def step(state: RunState, pair: ConjugatePair, outcomes: OutcomeSource) -> RunState:
    """Measure the conjugate basis of B and carry the logicals across."""
    if not state.group.same_unsigned(pair.group_a):
        raise GroupMismatch(f"step {state.t}: current group does not match the pair's first group")
    logicals = rewrite_logicals(state.logicals, pair, group=state.group)
    group = state.group
    drawn = []
    for b in pair.basis_b:
        result = measure_pauli(group, b, outcomes)
        group = result.group
        drawn.append(result.outcome)
    if not group.same_unsigned(pair.group_b):
        raise GroupMismatch(f"step {state.t}: post-measurement group does not match")
    record = {"t": state.t + 1, "outcomes": drawn, "group": group.to_dict()}
    logger.debug(f"step {state.t} -> {state.t + 1}: outcomes {drawn}")
    return RunState(t=state.t + 1, group=group, logicals=logicals,
                    outcomes=state.outcomes + tuple(drawn),
                    history=state.history + (record,))


def symplectic_form(k: int) -> np.ndarray:
    omega = np.zeros((2 * k, 2 * k), dtype=np.uint8)
    omega[:k, k:] = np.eye(k, dtype=np.uint8)
    omega[k:, :k] = np.eye(k, dtype=np.uint8)
    return omega


def logical_pauli(basis: LogicalBasis, coefficients: Sequence[int]) -> PauliOperator:
    """Hermitian product of the basis operators selected by a 2k bit vector."""
    ops = basis.operators()
    if not ops:
        raise ValueError("empty logical basis")
    chosen = [op for op, c in zip(ops, coefficients) if int(c) & 1]
    return product(chosen, ops[0].n).hermitian_part()


@dataclass
class LogicalAction:
    symplectic: np.ndarray
    phases: Tuple[int, ...]
    frame_correction: Optional[PauliOperator] = None
    final_logicals: Optional[LogicalBasis] = None
    outcomes: Tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return self.symplectic.shape[0] // 2

    @property
    def is_symplectic(self) -> bool:
        omega = symplectic_form(self.k)
        return np.array_equal(gf2.matmul(gf2.matmul(self.symplectic.T, omega), self.symplectic), omega)

    @property
    def is_identity(self) -> bool:
        return np.array_equal(self.symplectic, np.eye(2 * self.k, dtype=np.uint8))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "symplectic": self.symplectic.astype(int).tolist(),
            "phases": list(self.phases),
            "is_symplectic": self.is_symplectic,
            "is_identity": self.is_identity,
            "frame_correction": str(self.frame_correction) if self.frame_correction else None,
            "final_logicals": self.final_logicals.to_dict() if self.final_logicals else None,
        }


def extract_action(initial: LogicalBasis, final: LogicalBasis,
                   group: StabiliserGroup) -> LogicalAction:
    """Express final representatives in the initial basis modulo the group."""
    k = initial.k
    xs, zs = initial.x_ops, initial.z_ops
    symplectic = np.zeros((2 * k, 2 * k), dtype=np.uint8)
    phases = []
    for j, rep in enumerate(final.operators()):
        coeffs = [commutes(rep, zs[i]) for i in range(k)] + [commutes(rep, xs[i]) for i in range(k)]
        symplectic[:, j] = coeffs
        image = logical_pauli(initial, coeffs) if any(coeffs) else PauliOperator.identity(group.n)
        membership = contains(group, multiply(image, rep))
        if not membership.member or membership.phase % 2:
            raise GroupMismatch(f"final representative {rep} is not equivalent to {image}")
        phases.append(1 if membership.phase == 0 else -1)
    frame = None
    if k:
        flips = np.array([0 if s == 1 else 1 for s in phases], dtype=np.uint8)
        f = gf2.matmul(gf2.matmul(symplectic, symplectic_form(k)), flips.reshape(-1, 1)).ravel()
        frame = logical_pauli(initial, f) if f.any() else PauliOperator.identity(group.n)
    return LogicalAction(symplectic=symplectic, phases=tuple(phases),
                         frame_correction=frame, final_logicals=final)


@dataclass
class RunRecord:
    sequence: str
    source: Dict[str, Any]
    final_state: RunState
    action: Optional[LogicalAction] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sequence": self.sequence,
            "source": self.source,
            "outcomes": list(self.final_state.outcomes),
            "steps": list(self.final_state.history),
            "final_group": self.final_state.group.to_dict(),
            "action": self.action.to_dict() if self.action else None,
        }


def run_sequence(seq: FloquetSequence, outcomes: OutcomeSource,
                 logicals: Optional[LogicalBasis] = None) -> RunRecord:
    """Execute every transition once; attach the logical action if periodic."""
    state = initial_state(seq, logicals)
    initial = state.logicals
    for pair in seq.pairs:
        state = step(state, pair, outcomes)
    action = None
    if seq.is_periodic:
        action = extract_action(initial, state.logicals, state.group)
        action.outcomes = state.outcomes
    return RunRecord(sequence=seq.name, source=outcomes.describe(), final_state=state, action=action)


def period_action(seq: FloquetSequence, outcomes: OutcomeSource,
                  logicals: Optional[LogicalBasis] = None) -> LogicalAction:
    if not seq.is_periodic:
        raise NonPeriodicSequence("first and last groups differ as unsigned groups")
    return run_sequence(seq, outcomes, logicals).action


@dataclass
class SweepReport:
    streams: int
    consistent: bool
    symplectic: Optional[np.ndarray]
    phase_patterns: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "streams": self.streams,
            "consistent": self.consistent,
            "symplectic": self.symplectic.astype(int).tolist() if self.symplectic is not None else None,
            "phase_patterns": self.phase_patterns,
        }


def sweep_period_actions(seq: FloquetSequence, streams: Iterable[Sequence[int]],
                         threads: int = 1) -> SweepReport:
    """Run the period once per forced stream and compare the symplectic parts."""
    if not seq.is_periodic:
        raise NonPeriodicSequence("first and last groups differ as unsigned groups")
    seq.pairs  # fail fast on irreversible transitions before spawning workers
    start = initial_state(seq).logicals

    def _one(stream: Sequence[int]) -> LogicalAction:
        return period_action(seq, ForcedOutcomes(stream), start)

    streams = list(streams)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            actions = list(pool.map(_one, streams))
    else:
        actions = [_one(s) for s in streams]
    if not actions:
        return SweepReport(streams=0, consistent=True, symplectic=None, phase_patterns=0)
    first = actions[0].symplectic
    consistent = all(np.array_equal(first, a.symplectic) for a in actions)
    if not consistent:
        logger.error("symplectic action depends on the outcome stream")
    return SweepReport(streams=len(actions), consistent=consistent, symplectic=first,
                       phase_patterns=len({a.phases for a in actions}))
