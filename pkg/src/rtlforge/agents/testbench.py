"""Testbench generation, compliance checking, and top-name adaptation.

Generated testbenches must hold to four rules so the simulation stage can
trust them: a proper reset sequence, a 10ns clock period, at least five
labeled test scenarios, and a status marker the result scanner recognizes.
Compliance is checked lexically; whether the checks themselves are any good
is ultimately the simulator's problem, not this module's.
"""

from __future__ import annotations

import re
from dataclasses import replace as _replace
from typing import Optional, Sequence

from ..specs import Spec
from ..verilog import ModuleDecl, blank_comments, find_modules
from .backends import DEFAULT_MAX_TOKENS, CompletionRequest
from .extraction import ExtractionFailed, extract_code
from .profiles import AgentName, AgentProfile, load_profiles
from .prompting import build_prompt

VIOLATIONS_MARKER = "### Compliance violations"

# SystemVerilog-only keywords; any hit means the simulator will refuse it.
_SV_TOKEN_RE = re.compile(
    r"\b(logic|bit|byte|always_ff|always_comb|always_latch|interface|endinterface)\b"
)
# `#5 clk = ~clk` / `forever #5 clk = !clk` / `#5.0 clk <= ~clk`;
# the \b after the delay keeps #50 or #55 from passing as a 10ns period
_CLOCK_TOGGLE_RE = re.compile(
    r"#\s*5(?:\.0+)?\b\s*[^;\n]*?\b(\w+)\s*<?=\s*[~!]\s*\1\b"
)
_RESET_NAME_RE = re.compile(r"\b(\w*(?:rst|reset)\w*)\s*<?=", re.IGNORECASE)
_DISPLAY_RE = re.compile(r"\$(?:display|write|strobe)\s*\(")
# Status formats the sim scanner recognizes, as they appear inside $display
# format strings (before argument substitution).
_MARKER_FORMAT_RES = (
    re.compile(r"Mismatches:.*\bin\b.*samples", re.IGNORECASE),
    re.compile(r"%0?d\s*/\s*%0?d\s+tests?\s+passed", re.IGNORECASE),
    re.compile(r"\d+\s*/\s*\d+\s+tests?\s+passed", re.IGNORECASE),
    re.compile(r"STATUS:\s*(?:PASS|FAIL|%s)"),
)


class TestbenchNonCompliant(Exception):
    """Testbench still violates the rules after one regeneration."""

    def __init__(self, violations: Sequence[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class PortMismatch(Exception):
    """Wrapper cannot forward ports one-to-one."""

    def __init__(self, missing: Sequence[str], extra: Sequence[str]):
        parts = []
        if missing:
            parts.append(f"missing from module: {', '.join(sorted(missing))}")
        if extra:
            parts.append(f"not used by testbench: {', '.join(sorted(extra))}")
        super().__init__("; ".join(parts))
        self.missing = sorted(missing)
        self.extra = sorted(extra)


def _instantiates(source: str, module_name: str) -> bool:
    # `name instance_name (` with optional #(params). A declaration can't
    # match: `module name (` has no instance identifier before the paren.
    # The lookbehind blocks substring hits (my_adder) and .port( references.
    pattern = re.compile(
        rf"(?<![\w$.]){re.escape(module_name)}\s+(?:#\s*\([^)]*\)\s*)?"
        rf"[A-Za-z_]\w*\s*\("
    )
    return bool(pattern.search(blank_comments(source)))


def _count_scenarios(source: str) -> int:
    """Labeled scenarios, counted as distinct test announcements."""
    labels = set()
    for m in re.finditer(
        r'\$display\s*\(\s*"([^"]*)"', source
    ):
        text = m.group(1).strip()
        if re.match(r"(?:test|scenario|case)\b", text, re.IGNORECASE):
            labels.add(text)
    return len(labels)


def _has_status_marker(source: str) -> bool:
    return any(fmt.search(source) for fmt in _MARKER_FORMAT_RES)


def check_testbench(
    source: str,
    module_name: str,
    require_clock: bool = True,
    require_reset: bool = True,
) -> list[str]:
    """Lexical compliance check; returns human-readable violations.

    require_clock / require_reset follow the DUT's ports: a purely
    combinational design needs neither a clock generator nor a reset
    sequence, and demanding one would force dead code into the bench.
    """
    violations: list[str] = []
    sv_hits = sorted({m.group(1) for m in _SV_TOKEN_RE.finditer(source)})
    if sv_hits:
        violations.append(
            "SystemVerilog constructs are not allowed; replace "
            + ", ".join(f'"{t}"' for t in sv_hits)
            + " with Verilog-2001 equivalents (reg/wire, always @)"
        )
    if not _instantiates(source, module_name):
        violations.append(f'the design under test "{module_name}" is never instantiated')
    if require_clock and not _CLOCK_TOGGLE_RE.search(source):
        violations.append(
            "no clock generator toggling with #5 delays (10ns period) found"
        )
    if require_reset and not _RESET_NAME_RE.search(source):
        violations.append("no reset signal is ever assigned")
    scenarios = _count_scenarios(source)
    if scenarios < 5:
        violations.append(
            f"only {scenarios} labeled test scenarios found; at least 5 are "
            'required, each announced with $display("Test N: ...")'
        )
    if not _has_status_marker(source):
        violations.append(
            "no recognized status summary; print "
            '"Mismatches: %0d in %0d samples", "%0d/%0d tests passed", '
            'or "STATUS: PASS"/"STATUS: FAIL" before $finish'
        )
    return violations


_CLOCK_PORT_RE = re.compile(r"^(clk|clock)", re.IGNORECASE)
_RESET_PORT_RE = re.compile(r"(rst|reset)", re.IGNORECASE)


def _parse_single_module(header_or_source: str) -> ModuleDecl:
    modules = find_modules(header_or_source)
    if not modules and not re.search(r"\bendmodule\b", header_or_source):
        # bare header: close it so the walker can pair the span
        modules = find_modules(header_or_source.rstrip() + "\nendmodule")
    if not modules:
        raise ValueError("no module declaration found")
    return modules[0]


def generate_testbench(
    backend,
    spec: Spec,
    module_header: str,
    profile: Optional[AgentProfile] = None,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> str:
    """Produce a compliant self-checking testbench for the given module.

    One regeneration is attempted when the first response violates the
    rules, with the violations quoted back; a second non-compliant response
    raises TestbenchNonCompliant.
    """
    if profile is None:
        profile = load_profiles()[AgentName.TESTBENCH]
    decl = _parse_single_module(module_header)
    require_clock = any(_CLOCK_PORT_RE.match(p.name) for p in decl.ports)
    require_reset = any(_RESET_PORT_RE.search(p.name) for p in decl.ports)

    tb_spec = _replace(
        spec,
        description=(
            f"Write a self-checking Verilog-2001 testbench for the module "
            f'"{decl.name}" implementing: {spec.description}'
        ),
        interface_header=decl.header_text,
    )
    request = build_prompt(profile, tb_spec, max_tokens=max_tokens)
    try:
        source = extract_code(backend.complete(request).text)
        violations = check_testbench(
            source, decl.name, require_clock=require_clock, require_reset=require_reset
        )
    except ExtractionFailed:
        violations = ["the response contained no Verilog module"]
    if not violations:
        return source

    feedback = "\n".join(f"- {v}" for v in violations)
    retry = CompletionRequest(
        system_prompt=request.system_prompt,
        user_prompt=(
            f"{request.user_prompt}\n\n{VIOLATIONS_MARKER}\n"
            f"Your previous testbench was rejected for these reasons:\n{feedback}\n"
            f"Rewrite the complete testbench fixing every violation."
        ),
        temperature=request.temperature,
        max_tokens=request.max_tokens,
    )
    try:
        source = extract_code(backend.complete(retry).text)
    except ExtractionFailed:
        raise TestbenchNonCompliant(violations)
    violations = check_testbench(
        source, decl.name, require_clock=require_clock, require_reset=require_reset
    )
    if violations:
        raise TestbenchNonCompliant(violations)
    return source


def _testbench_required_ports(testbench_source: str, top_name: str) -> list[str]:
    """Port names the testbench connects in a named instantiation of top_name."""
    testbench_source = blank_comments(testbench_source)
    m = re.search(
        rf"(?<![\w$.]){re.escape(top_name)}\s+(?:#\s*\([^)]*\)\s*)?[A-Za-z_]\w*\s*\(",
        testbench_source,
    )
    if not m:
        return []
    depth = 0
    start = m.end() - 1
    end = None
    for i in range(start, len(testbench_source)):
        if testbench_source[i] == "(":
            depth += 1
        elif testbench_source[i] == ")":
            depth -= 1
            if depth == 0:
                end = i
                break
    if end is None:
        return []
    body = testbench_source[start + 1 : end]
    return re.findall(r"\.\s*([A-Za-z_]\w*)\s*\(", body)


def _find_top(modules: list[ModuleDecl], source: str) -> ModuleDecl:
    if len(modules) == 1:
        return modules[0]
    instantiated = {
        m.name for m in modules if _instantiates(source, m.name)
    }
    tops = [m for m in modules if m.name not in instantiated]
    return tops[0] if tops else modules[0]


def adapt_testbench(
    module_source: str,
    testbench_source: str,
    expected_top_name: str,
) -> str:
    """Make module_source link against a bench expecting expected_top_name.

    Identity when the top module already has that name; otherwise a wrapper
    with the same ports is appended, forwarding every port one-to-one to the
    generated module. PortMismatch when the port sets disagree.
    """
    modules = find_modules(module_source)
    if not modules:
        raise ValueError("module_source contains no module definition")
    top = _find_top(modules, module_source)
    if top.name == expected_top_name:
        return module_source

    module_ports = {p.name for p in top.ports}
    required = _testbench_required_ports(testbench_source, expected_top_name)
    if required:
        missing = sorted(set(required) - module_ports)
        # extra module ports don't block the wrapper (the bench just leaves
        # them unconnected); missing ones make it impossible to link
        if missing:
            raise PortMismatch(missing, sorted(module_ports - set(required)))

    decls = ",\n".join(
        f"    {p.direction} {p.width + ' ' if p.width else ''}{p.name}"
        for p in top.ports
    )
    conns = ",\n".join(f"        .{p.name}({p.name})" for p in top.ports)
    wrapper = (
        f"module {expected_top_name} (\n{decls}\n);\n"
        f"    {top.name} u_{top.name} (\n{conns}\n    );\n"
        f"endmodule\n"
    )
    return module_source.rstrip() + "\n\n" + wrapper
