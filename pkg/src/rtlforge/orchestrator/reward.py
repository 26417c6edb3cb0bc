"""Reward shaping over validation outcomes.

Four components, summed exactly:

  term  +100 simulation passed / +60 lint passed but not sim / -50 neither
  eff   +20 sim passed on the first attempt, minus 0.001 per token
  qual  +10 cell count at or under the low-area threshold, +15 no latch
        or combinational-loop warnings (both only when synthesis ran)
  prog  +5 per validation stage advanced, +3 per error eliminated,
        both relative to the previous report (no previous: from zero)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..validation import ValidationReport, ValidationStage

TERM_SIM_PASS = 100.0
TERM_LINT_PASS = 60.0
TERM_FAIL = -50.0
EFF_FIRST_TRY = 20.0
EFF_PER_TOKEN = 0.001
QUAL_LOW_AREA = 10.0
QUAL_CLEAN_TIMING = 15.0
PROG_PER_STAGE = 5.0
PROG_PER_ERROR = 3.0
LOW_AREA_FACTOR = 1.25


@dataclass(frozen=True)
class RewardBreakdown:
    term: float
    eff: float
    qual: float
    prog: float

    @property
    def total(self) -> float:
        return self.term + self.eff + self.qual + self.prog


def compute_reward(
    report: ValidationReport,
    tokens_used: int,
    iteration_index: int,
    first_attempt: Optional[bool] = None,
    previous_report: Optional[ValidationReport] = None,
    cell_baseline: Optional[float] = None,
) -> RewardBreakdown:
    """Pure function of the report pair, token count, and iteration.

    ``cell_baseline`` is the per-category expected cell count; the
    low-area bonus pays when cells <= 1.25x that baseline. Without a
    baseline (or without synthesis metrics) the quality bonuses stay 0.
    """
    if first_attempt is None:
        first_attempt = iteration_index == 0
    stage = report.stage_reached

    if stage >= ValidationStage.SIM_PASSED:
        term = TERM_SIM_PASS
    elif stage >= ValidationStage.LINT_PASSED:
        term = TERM_LINT_PASS
    else:
        term = TERM_FAIL

    eff = -EFF_PER_TOKEN * tokens_used
    if stage >= ValidationStage.SIM_PASSED and first_attempt:
        eff += EFF_FIRST_TRY

    qual = 0.0
    metrics = report.synth_metrics
    if metrics is not None:
        if cell_baseline is not None and metrics.cell_count <= LOW_AREA_FACTOR * cell_baseline:
            qual += QUAL_LOW_AREA
        if metrics.latch_warnings == 0 and not metrics.loop_detected:
            qual += QUAL_CLEAN_TIMING

    prev_stage = previous_report.stage_reached if previous_report else ValidationStage.NONE
    stages_advanced = max(0, int(stage) - int(prev_stage))
    errors_eliminated = 0
    if previous_report is not None:
        errors_eliminated = max(0, len(previous_report.errors) - len(report.errors))
    prog = PROG_PER_STAGE * stages_advanced + PROG_PER_ERROR * errors_eliminated

    return RewardBreakdown(term=term, eff=eff, qual=qual, prog=prog)
