"""
Measurement outcome sources.

Every run is reproducible from either a seed or an explicit forced stream.
Sources record what they hand out so run artifacts can report the stream.
Outcomes are ±1; each source instance belongs to a single run.
"""

from __future__ import annotations

import itertools
import logging
from abc import ABC, abstractmethod
from typing import Iterable, Iterator, List, Optional, Sequence

import numpy as np

from .errors import OutcomeStreamExhausted, PauliParseError

logger = logging.getLogger(__name__)


class OutcomeSource(ABC):
    """Hands out ±1 outcomes for non-deterministic measurements."""

    def __init__(self) -> None:
        self.history: List[int] = []

    def draw(self) -> int:
        outcome = self._next()
        self.history.append(outcome)
        return outcome

    @abstractmethod
    def _next(self) -> int:
        ...

    @abstractmethod
    def describe(self) -> dict:
        ...


class SeededOutcomes(OutcomeSource):
    """Uniformly random outcomes from a seeded numpy generator."""

    def __init__(self, seed: Optional[int] = None):
        super().__init__()
        self.seed = seed
        self._rng = np.random.default_rng(seed)

    def _next(self) -> int:
        return 1 if self._rng.integers(0, 2) == 0 else -1

    def describe(self) -> dict:
        return {"kind": "seeded", "seed": self.seed}


class ForcedOutcomes(OutcomeSource):
    """Replays a fixed list of outcomes and fails when it runs out."""

    def __init__(self, outcomes: Iterable[int]):
        super().__init__()
        self.outcomes = [int(o) for o in outcomes]
        for o in self.outcomes:
            if o not in (1, -1):
                raise ValueError(f"forced outcomes must be ±1, got {o}")
        self._position = 0

    def _next(self) -> int:
        if self._position >= len(self.outcomes):
            raise OutcomeStreamExhausted(
                f"forced stream exhausted after {len(self.outcomes)} outcomes")
        outcome = self.outcomes[self._position]
        self._position += 1
        return outcome

    @property
    def remaining(self) -> int:
        return len(self.outcomes) - self._position

    def describe(self) -> dict:
        return {"kind": "forced", "outcomes": list(self.outcomes)}


def parse_outcome_stream(text: str) -> List[int]:
    """
    Parse "+1,-1,+1" or the shorthand "+-+" into a list of ±1.
    """
    text = (text or "").strip()
    if not text:
        return []
    if "," not in text and set(text) <= {"+", "-"}:
        return [1 if c == "+" else -1 for c in text]
    values = []
    for token in text.split(","):
        token = token.strip()
        if token in ("+1", "1", "+"):
            values.append(1)
        elif token in ("-1", "-"):
            values.append(-1)
        else:
            raise PauliParseError(f"invalid outcome {token!r}; use +1 or -1")
    return values


def exhaustive_streams(total: int) -> Iterator[List[int]]:
    """All 2^total ±1 streams, all-+1 first."""
    for bits in itertools.product((0, 1), repeat=total):
        yield bits_to_outcomes(bits)


def bits_to_outcomes(bits: Sequence[int]) -> List[int]:
    return [1 if int(b) == 0 else -1 for b in bits]
