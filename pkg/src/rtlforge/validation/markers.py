"""Simulator output scanning.

Exactly three status marker formats are recognized, each anchored to a
whole line (leading/trailing blanks tolerated, keywords case-sensitive):

1. ``Mismatches: M in N samples``   pass iff M == 0
2. ``K/N tests passed``             pass iff K == N (singular "test" allowed,
                                    optional trailing '.' or '!')
3. ``STATUS: PASS`` / ``STATUS: FAIL``

When several formats appear, the lowest-numbered format governs; within a
format the last occurrence governs (testbenches print the final tally
last). No marker at all means the scan cannot certify a pass.

The scanner is total: any text (including binary garbage decoded with
replacement characters) yields a SimScan, never an exception.
"""

from __future__ import annotations

import re

from .report import SimScan

MISMATCH_RE = re.compile(r"^\s*Mismatches:\s+(\d+)\s+in\s+(\d+)\s+samples\s*$")
COUNT_RE = re.compile(r"^\s*(\d+)\s*/\s*(\d+)\s+tests?\s+passed\s*[.!]?\s*$")
STATUS_RE = re.compile(r"^\s*STATUS:\s+(PASS|FAIL)\s*$")


def scan_sim_output(text: str) -> SimScan:
    mismatch = count = status = None
    for line in text.splitlines():
        m = MISMATCH_RE.match(line)
        if m:
            mismatch = (int(m.group(1)), int(m.group(2)), line)
            continue
        m = COUNT_RE.match(line)
        if m:
            count = (int(m.group(1)), int(m.group(2)), line)
            continue
        m = STATUS_RE.match(line)
        if m:
            status = (m.group(1), line)

    if mismatch is not None:
        bad, total, line = mismatch
        return SimScan(
            passed=bad == 0,
            marker_kind="mismatch",
            mismatches=bad,
            samples=total,
            marker_line=line.strip(),
        )
    if count is not None:
        good, total, line = count
        return SimScan(
            passed=good == total and total > 0,
            marker_kind="count",
            passed_count=good,
            total_count=total,
            marker_line=line.strip(),
        )
    if status is not None:
        verdict, line = status
        return SimScan(
            passed=verdict == "PASS",
            marker_kind="status",
            marker_line=line.strip(),
        )
    return SimScan(passed=None)
