"""Structured thought stream: the run's auditable reasoning trace.

Every planner decision, retrieval, generation, validation verdict, and error
is emitted as one JSON line with a category, a confidence, and evidence
references. The file is flushed per event so a crashed run still leaves a
complete trace up to the failure point.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, IO, Optional, Sequence, Union


class ThoughtCategory(str, Enum):
    ANALYSIS = "Analysis"
    BOTTLENECK = "Bottleneck"
    PROPOSAL = "Proposal"
    RETRIEVAL = "Retrieval"
    GENERATION = "Generation"
    VALIDATION = "Validation"
    DECISION = "Decision"
    ERROR = "Error"
    PROGRESS = "Progress"


@dataclass(frozen=True)
class ThoughtEvent:
    category: ThoughtCategory
    message: str
    confidence: float = 1.0
    evidence: tuple[str, ...] = ()
    timestamp: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")
        if not self.message:
            raise ValueError("message must be non-empty")

    def to_json(self) -> dict:
        return {
            "category": self.category.value,
            "message": self.message,
            "confidence": self.confidence,
            "evidence": list(self.evidence),  # always present, even when empty
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ThoughtEvent":
        return cls(
            category=ThoughtCategory(data["category"]),
            message=data["message"],
            confidence=data["confidence"],
            evidence=tuple(data["evidence"]),
            timestamp=data["timestamp"],
        )


def emit_thought(event: ThoughtEvent, sink: IO[str]) -> None:
    """One JSON line per event, flushed immediately."""
    sink.write(json.dumps(event.to_json()) + "\n")
    sink.flush()


class ThoughtStream:
    """Collects events in order, clamping timestamps to be non-decreasing.

    Owns nothing: when ``sink`` is a file object the caller closes it. Events
    are always kept in memory (runs are bounded by the iteration cap, so the
    list stays small) for audit cross-checks against the run record.
    """

    def __init__(
        self,
        sink: Optional[IO[str]] = None,
        clock: Callable[[], float] = time.time,
    ):
        self._sink = sink
        self._clock = clock
        self._last_ts = float("-inf")
        self.events: list[ThoughtEvent] = []

    def emit(
        self,
        category: Union[ThoughtCategory, str],
        message: str,
        confidence: float = 1.0,
        evidence: Sequence[str] = (),
    ) -> ThoughtEvent:
        ts = max(self._clock(), self._last_ts)
        self._last_ts = ts
        event = ThoughtEvent(
            category=ThoughtCategory(category),
            message=message,
            confidence=confidence,
            evidence=tuple(evidence),
            timestamp=ts,
        )
        self.events.append(event)
        if self._sink is not None:
            emit_thought(event, self._sink)
        return event

    def emitter(self) -> Callable[[str, str], None]:
        """Two-argument adapter for components that only name and describe."""

        def _emit(category: str, message: str) -> None:
            self.emit(category, message)

        return _emit

    def categories(self) -> list[str]:
        return [e.category.value for e in self.events]


def load_thoughts(path: Union[str, Path]) -> list[ThoughtEvent]:
    events = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            events.append(ThoughtEvent.from_json(json.loads(line)))
    return events
