"""
Exception hierarchy for the stabiliser and Floquet tools.

Value-style failures (bad input, inconsistent groups) subclass ValueError so
callers can treat them like any other argument error. Runtime-style failures
(resource guards, exhausted outcome streams, numerical reconstruction) subclass
RuntimeError.
"""

from typing import Any, Dict, Optional


class StabiliserError(Exception):
    """Base class for every error raised by this package."""

    def to_dict(self) -> Dict[str, Any]:
        return {"error": str(self), "type": type(self).__name__}


class PauliLengthMismatch(StabiliserError, ValueError):
    """Two operators (or an operator and a group) disagree on qubit count."""


class PauliParseError(StabiliserError, ValueError):
    """Text or JSON could not be parsed into a Pauli operator."""


class NonHermitianPauli(StabiliserError, ValueError):
    """A Pauli with phase ±i was used where an observable is required."""


class InvalidGroup(StabiliserError, ValueError):
    """Generators do not define a valid stabiliser group."""


class SignConflict(StabiliserError, ValueError):
    """Two groups contain the same Pauli with opposite signs."""

    def __init__(self, message: str, element: Optional[Any] = None):
        super().__init__(message)
        self.element = element


class RankMismatch(StabiliserError, ValueError):
    """Groups of different rank cannot form a reversible pair."""


class GroupMismatch(StabiliserError, ValueError):
    """The current group does not match the group a transition expects."""


class NonPeriodicSequence(StabiliserError, ValueError):
    """First and last groups of a sequence differ as unsigned groups."""


class StateNotInCodespace(StabiliserError, ValueError):
    """A dense state is not stabilised by the required group."""


class NotInNormaliser(StabiliserError, ValueError):
    """An operator expected to be logical fails to commute with the group."""


class OutsideConjugateGroup(StabiliserError, ValueError):
    """An operator is not an element of the group spanned by a conjugate basis."""


class SupportOverlap(StabiliserError, ValueError):
    """Two observables expected on disjoint regions share qubits."""


class DimensionLimitExceeded(StabiliserError, RuntimeError):
    """Dense operation refused because the qubit count exceeds the cap."""


class OutcomeStreamExhausted(StabiliserError, RuntimeError):
    """A forced outcome stream ran out of entries."""


class NonUnitaryOperator(StabiliserError, RuntimeError):
    """A dense operator expected to be unitary is not."""


class NotCodePreserving(StabiliserError, ValueError):
    """An interleaved unitary does not commute with the code-space projector."""


class ReconstructionFailure(StabiliserError, RuntimeError):
    """Canonical-form reconstruction residual exceeded tolerance."""

    def __init__(self, message: str, phase_table: Optional[Dict[str, float]] = None,
                 residual: Optional[float] = None):
        super().__init__(message)
        self.phase_table = phase_table or {}
        self.residual = residual


class IrreversibleTransition(StabiliserError, ValueError):
    """A sequence contains an adjacent pair that is not reversible."""

    def __init__(self, message: str, index: Optional[int] = None, witness: Optional[Any] = None):
        super().__init__(message)
        self.index = index
        self.witness = witness
