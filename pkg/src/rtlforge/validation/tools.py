"""Tool invocation: real subprocesses or recorded-log replay.

Tool binaries resolve in this order: RTLFORGE_<TOOL> environment variable,
explicit path from configuration, then PATH lookup. A missing tool raises
ToolMissing, which is a different failure from a lint that ran and found
errors; callers degrade to the fixture runner or skip the stage.
"""

from __future__ import annotations

import os
import shutil
import subprocess
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

KNOWN_TOOLS = ("iverilog", "vvp", "verilator", "yosys")


class ToolMissing(Exception):
    def __init__(self, tool: str):
        self.tool = tool
        super().__init__(
            f"EDA tool {tool!r} not found; set RTLFORGE_{tool.upper()} or install it"
        )


@dataclass(frozen=True)
class ToolResult:
    returncode: int
    stdout: str = ""
    stderr: str = ""
    timed_out: bool = False

    @property
    def output(self) -> str:
        return self.stdout + ("\n" if self.stdout and self.stderr else "") + self.stderr

    @property
    def ok(self) -> bool:
        return self.returncode == 0 and not self.timed_out


class SubprocessRunner:
    """Runs real EDA tools with capture, timeouts, and env/path overrides."""

    def __init__(self, tool_paths: Optional[Mapping[str, str]] = None):
        self.tool_paths = dict(tool_paths or {})

    def resolve(self, tool: str) -> str:
        env_override = os.environ.get(f"RTLFORGE_{tool.upper()}")
        if env_override:
            return env_override
        if tool in self.tool_paths:
            return self.tool_paths[tool]
        found = shutil.which(tool)
        if not found:
            raise ToolMissing(tool)
        return found

    def available(self, tool: str) -> bool:
        try:
            self.resolve(tool)
            return True
        except ToolMissing:
            return False

    def run(
        self,
        tool: str,
        args: Sequence[str],
        cwd: Optional[str] = None,
        timeout_s: Optional[float] = None,
    ) -> ToolResult:
        binary = self.resolve(tool)
        try:
            proc = subprocess.run(
                [binary, *args],
                cwd=cwd,
                capture_output=True,
                text=True,
                errors="replace",
                timeout=timeout_s,
            )
        except subprocess.TimeoutExpired as exc:
            def _decode(raw) -> str:
                if raw is None:
                    return ""
                if isinstance(raw, bytes):
                    return raw.decode(errors="replace")
                return raw
            return ToolResult(
                returncode=-1,
                stdout=_decode(exc.stdout),
                stderr=_decode(exc.stderr),
                timed_out=True,
            )
        return ToolResult(
            returncode=proc.returncode, stdout=proc.stdout, stderr=proc.stderr
        )


@dataclass
class FixtureRunner:
    """Replays recorded tool logs so pipelines run without EDA tools.

    ``script`` maps tool name to a queue of results consumed in order; when
    a tool's queue runs dry the ``default`` result for that tool is served
    (so a finite script can model failures followed by steady-state
    passes). All invocations are recorded in ``calls``.
    """

    script: dict[str, list[ToolResult]] = field(default_factory=dict)
    defaults: dict[str, ToolResult] = field(default_factory=dict)
    calls: list[tuple[str, tuple[str, ...]]] = field(default_factory=list)

    PASSING_LOGS = {
        "iverilog": ToolResult(0, "", ""),
        "vvp": ToolResult(0, "All scenarios exercised.\nMismatches: 0 in 128 samples\n", ""),
        "verilator": ToolResult(0, "", "- Verilator: Verilated design\n"),
        "yosys": ToolResult(
            0,
            (
                "-- Running command `read_verilog design.v; synth; stat' --\n"
                "=== design ===\n"
                "   Number of wires:                 12\n"
                "   Number of wire bits:             24\n"
                "   Number of public wires:           6\n"
                "   Number of cells:                  9\n"
                "     $_AND_                          4\n"
                "     $_XOR_                          5\n"
            ),
            "",
        ),
    }

    @classmethod
    def passing(cls) -> "FixtureRunner":
        """Every tool succeeds forever with plausible logs."""
        return cls(defaults=dict(cls.PASSING_LOGS))

    def available(self, tool: str) -> bool:
        return True

    def run(
        self,
        tool: str,
        args: Sequence[str],
        cwd: Optional[str] = None,
        timeout_s: Optional[float] = None,
    ) -> ToolResult:
        self.calls.append((tool, tuple(args)))
        queue = self.script.get(tool)
        if queue:
            return queue.pop(0)
        if tool in self.defaults:
            return self.defaults[tool]
        raise ToolMissing(tool)
