"""The three validation stages and their sequencing.

Lint modes: "verilog2001" checks with Icarus (`iverilog -g2001 -t null`);
"systemverilog" prefers `verilator --lint-only` and falls back to Icarus'
2012 mode when Verilator is absent. Simulation compiles design+testbench
with Icarus and runs vvp under a timeout; a timeout is a functional
failure, not an infrastructure error. Synthesis runs Yosys and extracts
cell/wire counts plus latch and logic-loop warnings from the stat report.
"""

from __future__ import annotations

import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import re

from .categorize import categorize_errors
from .markers import scan_sim_output
from .report import (
    CategorizedError,
    ErrorCategory,
    SimScan,
    SynthMetrics,
    ValidationReport,
    ValidationStage,
)
from .tools import ToolMissing, ToolResult

SIM_TIMEOUT_S = 60.0

_CELLS_RE = re.compile(r"Number of cells:\s+(\d+)")
_WIRES_RE = re.compile(r"Number of wires:\s+(\d+)")
_LATCH_RE = re.compile(r"(?i)latch inferred|inferr(?:ed|ing) latch|\$dlatch")
_LOOP_RE = re.compile(r"(?i)found (?:a )?logic loop|combinational loop")


@dataclass(frozen=True)
class LintResult:
    passed: bool
    errors: tuple[CategorizedError, ...]
    log: str
    tool: str


@dataclass(frozen=True)
class SimResult:
    passed: bool
    scan: SimScan
    errors: tuple[CategorizedError, ...]
    log: str
    timed_out: bool = False


@dataclass(frozen=True)
class SynthResult:
    passed: bool
    metrics: Optional[SynthMetrics]
    errors: tuple[CategorizedError, ...]
    log: str


def _write_sources(workdir: Path, named_sources: Sequence[tuple[str, str]]) -> list[str]:
    files = []
    for name, text in named_sources:
        path = workdir / name
        path.write_text(text)
        files.append(name)
    return files


def _sources_map(named_sources: Sequence[tuple[str, str]]) -> dict[str, str]:
    return {name: text for name, text in named_sources}


def lint(
    source: str,
    runner,
    mode: str = "verilog2001",
    extra_sources: Sequence[tuple[str, str]] = (),
    filename: str = "design.v",
) -> LintResult:
    if mode not in ("verilog2001", "systemverilog"):
        raise ValueError(f"unknown lint mode {mode!r}")
    named = [(filename, source), *extra_sources]
    with tempfile.TemporaryDirectory(prefix="rtlforge_lint_") as tmp:
        workdir = Path(tmp)
        files = _write_sources(workdir, named)
        if mode == "systemverilog" and runner.available("verilator"):
            tool = "verilator"
            args = ["--lint-only", "-Wno-fatal", *files]
        else:
            tool = "iverilog"
            std = "-g2012" if mode == "systemverilog" else "-g2001"
            args = [std, "-t", "null", *files]
        result = runner.run(tool, args, cwd=str(workdir))
    errors = tuple(categorize_errors(result.output, _sources_map(named)))
    return LintResult(passed=result.ok, errors=errors, log=result.output, tool=tool)


def simulate(
    design_source: str,
    testbench_source: str,
    runner,
    timeout_s: float = SIM_TIMEOUT_S,
    design_filename: str = "design.v",
    testbench_filename: str = "tb.v",
) -> SimResult:
    named = [(design_filename, design_source), (testbench_filename, testbench_source)]
    with tempfile.TemporaryDirectory(prefix="rtlforge_sim_") as tmp:
        workdir = Path(tmp)
        files = _write_sources(workdir, named)
        compile_result = runner.run(
            "iverilog", ["-g2012", "-o", "sim.out", *files], cwd=str(workdir)
        )
        if not compile_result.ok:
            errors = tuple(categorize_errors(compile_result.output, _sources_map(named)))
            return SimResult(
                passed=False,
                scan=SimScan(passed=None),
                errors=errors,
                log=compile_result.output,
            )
        run_result = runner.run("vvp", ["sim.out"], cwd=str(workdir), timeout_s=timeout_s)

    if run_result.timed_out:
        err = CategorizedError(
            category=ErrorCategory.OTHER,
            message=f"simulation exceeded {timeout_s:.0f}s timeout",
        )
        return SimResult(
            passed=False,
            scan=SimScan(passed=None),
            errors=(err,),
            log=run_result.output,
            timed_out=True,
        )
    scan = scan_sim_output(run_result.output)
    if scan.passed is None:
        err = CategorizedError(
            category=ErrorCategory.OTHER,
            message="no status marker in simulation output",
        )
        return SimResult(passed=False, scan=scan, errors=(err,), log=run_result.output)
    errors: tuple[CategorizedError, ...] = ()
    if not scan.passed:
        errors = (
            CategorizedError(
                category=ErrorCategory.OTHER,
                message=f"functional mismatch: {scan.marker_line}",
            ),
        )
    return SimResult(passed=bool(scan.passed), scan=scan, errors=errors, log=run_result.output)


def synthesize_check(
    source: str,
    runner,
    filename: str = "design.v",
) -> SynthResult:
    with tempfile.TemporaryDirectory(prefix="rtlforge_synth_") as tmp:
        workdir = Path(tmp)
        _write_sources(workdir, [(filename, source)])
        script = f"read_verilog -sv {filename}; synth; stat"
        result = runner.run("yosys", ["-p", script], cwd=str(workdir))

    log = result.output
    metrics = None
    cells = _CELLS_RE.search(log)
    wires = _WIRES_RE.search(log)
    if cells and wires:
        metrics = SynthMetrics(
            cell_count=int(cells.group(1)),
            wire_count=int(wires.group(1)),
            latch_warnings=len(_LATCH_RE.findall(log)),
            loop_detected=bool(_LOOP_RE.search(log)),
        )
    errors = ()
    if not result.ok:
        errors = tuple(categorize_errors(log, {filename: source}))
    return SynthResult(passed=result.ok, metrics=metrics, errors=errors, log=log)


def _clip(log: str, limit: int = 4000) -> str:
    return log if len(log) <= limit else log[:limit] + "\n... [truncated]"


def run_validation(
    design_source: str,
    runner,
    testbench_source: Optional[str] = None,
    design_language: str = "verilog2001",
    timeout_s: float = SIM_TIMEOUT_S,
    run_synth: bool = True,
) -> ValidationReport:
    """Lint, then simulate (when a testbench exists), then synthesize.

    A stage failure stops the pipeline; stage_reached stays at the highest
    contiguous pass. Missing tools downgrade a stage to skipped rather
    than failing the run.
    """
    started = time.monotonic()
    stage = ValidationStage.NONE
    lint_passed = sim_passed = synth_passed = None
    errors: list[CategorizedError] = []
    skipped: list[str] = []
    logs: list[tuple[str, str]] = []
    sim_scan = None
    metrics = None

    try:
        lint_result = lint(design_source, runner, mode=design_language)
        lint_passed = lint_result.passed
        logs.append(("lint", _clip(lint_result.log)))
        errors.extend(lint_result.errors)
        if lint_result.passed:
            stage = ValidationStage.LINT_PASSED
    except ToolMissing as exc:
        skipped.append(f"lint: {exc.tool} missing")

    if lint_passed:
        if testbench_source is None:
            skipped.append("sim: no testbench")
        else:
            try:
                sim_result = simulate(
                    design_source, testbench_source, runner, timeout_s=timeout_s
                )
                sim_passed = sim_result.passed
                sim_scan = sim_result.scan
                logs.append(("sim", _clip(sim_result.log)))
                errors.extend(sim_result.errors)
                if sim_result.passed:
                    stage = ValidationStage.SIM_PASSED
            except ToolMissing as exc:
                skipped.append(f"sim: {exc.tool} missing")

    sim_blocked = testbench_source is not None and sim_passed is not True
    if lint_passed and run_synth and not sim_blocked:
        try:
            synth_result = synthesize_check(design_source, runner)
            synth_passed = synth_result.passed
            metrics = synth_result.metrics
            logs.append(("synth", _clip(synth_result.log)))
            errors.extend(synth_result.errors)
            if synth_result.passed:
                stage = ValidationStage.SYNTH_PASSED
        except ToolMissing as exc:
            skipped.append(f"synth: {exc.tool} missing")

    return ValidationReport(
        stage_reached=stage,
        lint_passed=lint_passed,
        sim_passed=sim_passed,
        synth_passed=synth_passed,
        errors=tuple(errors),
        sim_scan=sim_scan,
        synth_metrics=metrics,
        skipped=tuple(skipped),
        tool_logs=tuple(logs),
        wall_time_s=time.monotonic() - started,
    )
