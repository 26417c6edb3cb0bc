"""Sim-output marker scanning: the three formats, precedence, totality."""

from __future__ import annotations

from hypothesis import given
from hypothesis import strategies as st

from rtlforge.validation import scan_sim_output

ADVERSARIAL_LINES = [
    "Mismatches: 0 in samples",
    "Mismatches: in 439 samples",
    "mismatches: 0 in 439 samples",
    "MISMATCHES: 0 IN 439 SAMPLES",
    "Mismatches 0 in 439 samples",
    "Mismatches: 0 in 439 sample",
    "Mismatches: -1 in 439 samples",
    "Mismatches: 0.5 in 439 samples",
    "xMismatches: 0 in 439 samples detected",
    "Mismatches: 0 in 439 samples extra",
    "5/ tests passed",
    "/5 tests passed",
    "5/5 tests",
    "5/5 tests failed",
    "five/five tests passed",
    "5\\5 tests passed",
    "STATUS PASS",
    "STATUS: MAYBE",
    "status: pass",
    "THE STATUS: PASSED",
]


def test_mismatch_zero_passes():
    scan = scan_sim_output("starting\nMismatches: 0 in 439 samples\n")
    assert scan.passed is True
    assert scan.marker_kind == "mismatch"
    assert scan.mismatches == 0
    assert scan.samples == 439


def test_mismatch_nonzero_fails():
    scan = scan_sim_output("Mismatches: 2 in 439 samples")
    assert scan.passed is False
    assert scan.mismatches == 2


def test_count_format():
    assert scan_sim_output("5/5 tests passed").passed is True
    assert scan_sim_output("4/5 tests passed").passed is False
    assert scan_sim_output("1/1 test passed").passed is True
    assert scan_sim_output("7/7 tests passed.").passed is True
    assert scan_sim_output("0/0 tests passed").passed is False  # vacuous run


def test_status_format():
    assert scan_sim_output("STATUS: PASS").passed is True
    assert scan_sim_output("STATUS: FAIL").passed is False


def test_whitespace_tolerated():
    assert scan_sim_output("   Mismatches: 0 in 10 samples   ").passed is True
    assert scan_sim_output("\t3/3 tests passed\t").passed is True
    assert scan_sim_output("  STATUS: PASS  ").passed is True


def test_mismatch_governs_over_status():
    text = "STATUS: PASS\nMismatches: 3 in 10 samples\n"
    scan = scan_sim_output(text)
    assert scan.marker_kind == "mismatch"
    assert scan.passed is False


def test_count_governs_over_status():
    text = "STATUS: FAIL\n8/8 tests passed\n"
    scan = scan_sim_output(text)
    assert scan.marker_kind == "count"
    assert scan.passed is True


def test_last_occurrence_of_format_wins():
    text = "Mismatches: 4 in 10 samples\nMismatches: 0 in 439 samples\n"
    scan = scan_sim_output(text)
    assert scan.passed is True
    assert scan.samples == 439


def test_no_marker_returns_none():
    scan = scan_sim_output("simulation finished at time 1000ns\n")
    assert scan.passed is None
    assert scan.marker_kind is None


def test_adversarial_lines_rejected():
    for line in ADVERSARIAL_LINES:
        scan = scan_sim_output(line)
        assert scan.passed is None, f"marker wrongly accepted: {line!r}"


def test_adversarial_lines_do_not_mask_real_marker():
    text = "\n".join([*ADVERSARIAL_LINES, "Mismatches: 0 in 12 samples"])
    assert scan_sim_output(text).passed is True


@given(st.text(max_size=500))
def test_scanner_total_on_arbitrary_text(text):
    scan = scan_sim_output(text)
    assert scan.passed in (True, False, None)
