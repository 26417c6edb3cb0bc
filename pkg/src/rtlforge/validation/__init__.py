"""EDA validation pipeline: lint, simulate, synthesize, categorize, hint.

Real tool invocations go through a runner object; the fixture runner
replays recorded tool logs so every consumer (and the whole test suite)
works on machines without Icarus/Verilator/Yosys installed.
"""

from .report import (
    CategorizedError,
    ErrorCategory,
    ErrorTrend,
    SimScan,
    SynthMetrics,
    ValidationReport,
    ValidationStage,
    error_trend,
)
from .markers import scan_sim_output
from .categorize import categorize_errors, extract_context
from .hints import fix_hints, load_hint_database
from .tools import FixtureRunner, SubprocessRunner, ToolMissing, ToolResult
from .stages import LintResult, SimResult, SynthResult, lint, run_validation, simulate, synthesize_check

__all__ = [
    "CategorizedError",
    "ErrorCategory",
    "ErrorTrend",
    "SimScan",
    "SynthMetrics",
    "ValidationReport",
    "ValidationStage",
    "error_trend",
    "scan_sim_output",
    "categorize_errors",
    "extract_context",
    "fix_hints",
    "load_hint_database",
    "FixtureRunner",
    "SubprocessRunner",
    "ToolMissing",
    "ToolResult",
    "LintResult",
    "SimResult",
    "SynthResult",
    "lint",
    "simulate",
    "synthesize_check",
    "run_validation",
]
