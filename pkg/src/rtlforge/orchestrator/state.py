"""State encoding for the RL tier: 40 structural features + 128-d identifier.

The structural layout is versioned and shipped as data
(``data/state_layout.json``); tests hold the two in lockstep. Unknown
values encode as 0, every entry lands in [0, 1].
"""

from __future__ import annotations

import hashlib
import re
from typing import Optional, Sequence

import numpy as np

from ..specs import DesignCategory, Spec, infer_category
from ..validation import ErrorCategory, ErrorTrend, ValidationReport, error_trend
from ..verilog import find_modules

STATE_DIM = 168
STRUCTURAL_DIM = 40
IDENTIFIER_DIM = 128
LAYOUT_VERSION = 1

NUM_AGENTS = 4
MAX_ITERATIONS_NORM = 5.0

_CATEGORIES = tuple(DesignCategory)
_ERROR_CATEGORIES = tuple(ErrorCategory)
_TRENDS = tuple(ErrorTrend)
_ALWAYS_RE = re.compile(r"\balways(?:_ff|_comb|_latch)?\b")

# index map, one name per structural slot; mirrored in data/state_layout.json
STRUCTURAL_LAYOUT = (
    ("complexity", "task: description word count / 200, clamped"),
    *[(f"category_{c.value}", "task: design-category one-hot") for c in _CATEGORIES],
    ("iteration", "progress: iteration index / 5, clamped"),
    *[(f"stage_{s}", "progress: validation-stage one-hot") for s in ("none", "lint", "sim", "synth")],
    ("phase_refine", "progress: 1 when iteration > 0"),
    ("phase_polish", "progress: 1 when simulation has passed"),
    *[(f"errors_{c.value}", "errors: category count / 10, clamped") for c in _ERROR_CATEGORIES],
    *[(f"trend_{t.value}", "errors: trend one-hot vs previous report") for t in _TRENDS],
    ("code_lines", "code: line count / 200, clamped"),
    ("code_always", "code: always-block count / 10, clamped"),
    ("code_ports", "code: top-module port count / 20, clamped"),
    *[(f"agent_count_{i}", "history: agent selection count / 5, clamped") for i in range(NUM_AGENTS)],
    *[(f"last_agent_{i}", "history: last-agent one-hot") for i in range(NUM_AGENTS)],
    ("sim_mismatch_frac", "sim: mismatches / samples"),
    ("sim_latency", "sim: validation wall time / 60 s, clamped"),
    ("sim_passed", "sim: 1 when the status marker reported a pass"),
    ("sim_samples", "sim: sample count / 1000, clamped"),
)

assert len(STRUCTURAL_LAYOUT) == STRUCTURAL_DIM

_INDEX = {name: i for i, (name, _) in enumerate(STRUCTURAL_LAYOUT)}


def feature_index(name: str) -> int:
    return _INDEX[name]


def _clip01(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def spec_identifier(text: str) -> np.ndarray:
    """Deterministic 128-d vector from character trigrams.

    Each trigram is hashed (blake2b, 8 bytes); the low 7 bits pick a
    bucket, bit 7 picks the sign. The result is L2-normalized. Texts
    shorter than 3 characters hash as a single gram; empty text gives the
    zero vector. No randomness, no machine dependence.
    """
    v = np.zeros(IDENTIFIER_DIM)
    if not text:
        return v
    grams = [text[i:i + 3] for i in range(len(text) - 2)] or [text]
    for g in grams:
        h = int.from_bytes(hashlib.blake2b(g.encode("utf-8"), digest_size=8).digest(), "big")
        sign = 1.0 if (h >> 7) & 1 else -1.0
        v[h & 127] += sign
    norm = np.linalg.norm(v)
    if norm > 0:
        v /= norm
    return v


def encode_state(
    spec: Spec,
    iteration: int,
    latest_report: Optional[ValidationReport] = None,
    previous_report: Optional[ValidationReport] = None,
    agent_counts: Sequence[int] = (0, 0, 0, 0),
    last_agent: Optional[int] = None,
    source: Optional[str] = None,
) -> np.ndarray:
    """Encode one refinement-loop snapshot; always exactly 168 entries."""
    v = np.zeros(STRUCTURAL_DIM)

    words = len(spec.description.split())
    v[0] = _clip01(words / 200.0)
    v[1 + _CATEGORIES.index(infer_category(spec))] = 1.0

    base = feature_index("iteration")
    v[base] = _clip01(iteration / MAX_ITERATIONS_NORM)
    if latest_report is not None:
        v[base + 1 + int(latest_report.stage_reached)] = 1.0
    v[feature_index("phase_refine")] = 1.0 if iteration > 0 else 0.0

    if latest_report is not None:
        counts = {c: 0 for c in _ERROR_CATEGORIES}
        for err in latest_report.errors:
            counts[err.category] += 1
        # synthesis warnings only live in the metrics block of the report;
        # surface them in the error signals so downstream policies see them
        if latest_report.synth_metrics is not None:
            counts[ErrorCategory.INFERRED_LATCH] += latest_report.synth_metrics.latch_warnings
            if latest_report.synth_metrics.loop_detected:
                counts[ErrorCategory.OTHER] += 1
        ebase = feature_index("errors_syntax")
        for i, c in enumerate(_ERROR_CATEGORIES):
            v[ebase + i] = _clip01(counts[c] / 10.0)
        if previous_report is not None:
            trend = error_trend(previous_report.errors, latest_report.errors)
            v[feature_index(f"trend_{trend.value}")] = 1.0

    if source:
        v[feature_index("code_lines")] = _clip01((source.count("\n") + 1) / 200.0)
        v[feature_index("code_always")] = _clip01(len(_ALWAYS_RE.findall(source)) / 10.0)
        decls = find_modules(source)
        if decls:
            v[feature_index("code_ports")] = _clip01(len(decls[0].ports) / 20.0)

    abase = feature_index("agent_count_0")
    for i in range(NUM_AGENTS):
        v[abase + i] = _clip01(agent_counts[i] / 5.0) if i < len(agent_counts) else 0.0
    if last_agent is not None and 0 <= last_agent < NUM_AGENTS:
        v[feature_index(f"last_agent_{last_agent}")] = 1.0

    if latest_report is not None and latest_report.sim_scan is not None:
        scan = latest_report.sim_scan
        if scan.mismatches is not None and scan.samples:
            v[feature_index("sim_mismatch_frac")] = _clip01(scan.mismatches / scan.samples)
        if scan.samples:
            v[feature_index("sim_samples")] = _clip01(scan.samples / 1000.0)
        if scan.passed:
            v[feature_index("sim_passed")] = 1.0
    if latest_report is not None:
        v[feature_index("sim_latency")] = _clip01(latest_report.wall_time_s / 60.0)
        if latest_report.stage_reached >= 2:  # sim passed
            v[feature_index("phase_polish")] = 1.0

    return np.concatenate([v, spec_identifier(spec.description)])
