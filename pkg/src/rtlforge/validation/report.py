"""Validation result model shared by every stage and by the orchestrator."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Optional, Sequence


class ValidationStage(IntEnum):
    """Highest stage whose checks have passed; integer order is meaningful."""

    NONE = 0
    LINT_PASSED = 1
    SIM_PASSED = 2
    SYNTH_PASSED = 3


class ErrorCategory(str, Enum):
    SYNTAX = "syntax"
    PORT_MISMATCH = "port_mismatch"
    WIDTH_MISMATCH = "width_mismatch"
    UNDECLARED_SIGNAL = "undeclared_signal"
    INFERRED_LATCH = "inferred_latch"
    OTHER = "other"


class ErrorTrend(str, Enum):
    IMPROVING = "improving"
    WORSENING = "worsening"
    TYPE_CHANGED = "type_changed"
    UNCHANGED = "unchanged"


@dataclass(frozen=True)
class CategorizedError:
    category: ErrorCategory
    message: str
    file: Optional[str] = None
    line: Optional[int] = None
    context: Optional[str] = None  # up to 5 source lines around the error

    def to_json(self) -> dict:
        return {
            "category": self.category.value,
            "message": self.message,
            "file": self.file,
            "line": self.line,
            "context": self.context,
        }

    @classmethod
    def from_json(cls, data: dict) -> "CategorizedError":
        return cls(
            category=ErrorCategory(data["category"]),
            message=data["message"],
            file=data.get("file"),
            line=data.get("line"),
            context=data.get("context"),
        )


@dataclass(frozen=True)
class SimScan:
    """Outcome of scanning simulator stdout for a status marker.

    ``passed`` is None when no recognized marker appeared; the pipeline
    treats that as failure with reason "no status marker".
    """

    passed: Optional[bool]
    marker_kind: Optional[str] = None  # "mismatch" | "count" | "status"
    mismatches: Optional[int] = None
    samples: Optional[int] = None
    passed_count: Optional[int] = None
    total_count: Optional[int] = None
    marker_line: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "marker_kind": self.marker_kind,
            "mismatches": self.mismatches,
            "samples": self.samples,
            "passed_count": self.passed_count,
            "total_count": self.total_count,
            "marker_line": self.marker_line,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SimScan":
        return cls(**data)


@dataclass(frozen=True)
class SynthMetrics:
    cell_count: int
    wire_count: int
    latch_warnings: int = 0
    loop_detected: bool = False

    def to_json(self) -> dict:
        return {
            "cell_count": self.cell_count,
            "wire_count": self.wire_count,
            "latch_warnings": self.latch_warnings,
            "loop_detected": self.loop_detected,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SynthMetrics":
        return cls(**data)


@dataclass(frozen=True)
class ValidationReport:
    """Everything one validation pass learned about a candidate design.

    ``lint_passed``/``sim_passed``/``synth_passed`` are None for stages that
    never ran (missing tool, no testbench, earlier failure); ``skipped``
    records why.
    """

    stage_reached: ValidationStage
    lint_passed: Optional[bool] = None
    sim_passed: Optional[bool] = None
    synth_passed: Optional[bool] = None
    errors: tuple[CategorizedError, ...] = ()
    sim_scan: Optional[SimScan] = None
    synth_metrics: Optional[SynthMetrics] = None
    skipped: tuple[str, ...] = ()
    tool_logs: tuple[tuple[str, str], ...] = ()  # (stage, log excerpt)
    wall_time_s: float = 0.0

    def log_for(self, stage: str) -> Optional[str]:
        for name, log in self.tool_logs:
            if name == stage:
                return log
        return None

    def to_json(self) -> dict:
        return {
            "stage_reached": self.stage_reached.name,
            "lint_passed": self.lint_passed,
            "sim_passed": self.sim_passed,
            "synth_passed": self.synth_passed,
            "errors": [e.to_json() for e in self.errors],
            "sim_scan": self.sim_scan.to_json() if self.sim_scan else None,
            "synth_metrics": self.synth_metrics.to_json() if self.synth_metrics else None,
            "skipped": list(self.skipped),
            "tool_logs": [[k, v] for k, v in self.tool_logs],
            "wall_time_s": self.wall_time_s,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ValidationReport":
        return cls(
            stage_reached=ValidationStage[data["stage_reached"]],
            lint_passed=data.get("lint_passed"),
            sim_passed=data.get("sim_passed"),
            synth_passed=data.get("synth_passed"),
            errors=tuple(CategorizedError.from_json(e) for e in data.get("errors", [])),
            sim_scan=SimScan.from_json(data["sim_scan"]) if data.get("sim_scan") else None,
            synth_metrics=(
                SynthMetrics.from_json(data["synth_metrics"])
                if data.get("synth_metrics")
                else None
            ),
            skipped=tuple(data.get("skipped", [])),
            tool_logs=tuple((k, v) for k, v in data.get("tool_logs", [])),
            wall_time_s=data.get("wall_time_s", 0.0),
        )


def error_trend(
    previous: Sequence[CategorizedError], current: Sequence[CategorizedError]
) -> ErrorTrend:
    """Trend between consecutive validation passes.

    Count decides improving/worsening; on a tie the category multiset
    decides type_changed vs unchanged.
    """
    if len(current) < len(previous):
        return ErrorTrend.IMPROVING
    if len(current) > len(previous):
        return ErrorTrend.WORSENING
    prev_kinds = Counter(e.category for e in previous)
    cur_kinds = Counter(e.category for e in current)
    return ErrorTrend.UNCHANGED if prev_kinds == cur_kinds else ErrorTrend.TYPE_CHANGED
