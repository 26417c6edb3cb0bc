"""Tool-output error categorization and source context extraction.

Pattern tables cover the message shapes of Icarus Verilog, Verilator, and
Yosys. A line is categorized by the first matching category in table
order; remaining lines mentioning an error fall into OTHER. Summary lines
like "Errors: 0" are not errors.
"""

from __future__ import annotations

import re
from typing import Mapping, Optional, Sequence

from .report import CategorizedError, ErrorCategory

# first match wins, in this order
_CATEGORY_PATTERNS: tuple[tuple[ErrorCategory, tuple[re.Pattern, ...]], ...] = (
    (
        ErrorCategory.PORT_MISMATCH,
        (
            re.compile(r"is not a port of"),
            re.compile(r"(?i)unknown\s+port"),
            re.compile(r"(?i)port .* not found"),
            re.compile(r"(?i)no port named"),
            re.compile(r"(?i)PINNOTFOUND"),
            re.compile(r"(?i)pin not found"),
            re.compile(r"(?i)too many ports"),
            re.compile(r"(?i)port count mismatch"),
        ),
    ),
    (
        ErrorCategory.WIDTH_MISMATCH,
        (
            re.compile(r"(?i)width mismatch"),
            re.compile(r"(?i)(?:%Warning-|\[)WIDTH(?:TRUNC|EXPAND|CONCAT)?[\]:]"),
            re.compile(r"(?i)expects \d+ bits.*(?:got|generates) \d+"),
            re.compile(r"(?i)incompatible width"),
        ),
    ),
    (
        ErrorCategory.UNDECLARED_SIGNAL,
        (
            re.compile(r"Unable to bind wire/reg/memory"),
            re.compile(r"(?i)is not declared"),
            re.compile(r"(?i)undeclared (?:identifier|signal|symbol)"),
            re.compile(r"(?i)can't find definition of variable"),
            re.compile(r"(?i)unable to bind parameter"),
        ),
    ),
    (
        ErrorCategory.INFERRED_LATCH,
        (
            re.compile(r"(?i)latch inferred"),
            re.compile(r"(?i)inferr(?:ed|ing) latch"),
            re.compile(r"(?i)(?:%Warning-|\[)LATCH[\]:]"),
            re.compile(r"\$dlatch"),
        ),
    ),
    (
        ErrorCategory.SYNTAX,
        (
            re.compile(r"(?i)syntax error"),
            re.compile(r"(?i)malformed statement"),
            re.compile(r"(?i)invalid module (?:item|instantiation)"),
            re.compile(r"(?i)unexpected (?:token|EOF)"),
            re.compile(r"(?i)expecting ['\"]?endmodule"),
            re.compile(r"(?i)give up on this module"),
        ),
    ),
)

_FALLBACK_ERROR_RE = re.compile(r"(?i)\berrors?\b|%Error")
_NOT_AN_ERROR_RE = re.compile(r"(?i)\b(?:0|no)\s+errors?\b|errors?\s*:\s*0")
_FILE_LINE_RE = re.compile(r"([A-Za-z0-9_./\\-]+\.s?vh?)\s*:\s*(\d+)")

_MAX_ERRORS = 50


def extract_context(source: str, line: int, radius: int = 2) -> str:
    """Up to five source lines centered on the error line, 1-based."""
    lines = source.splitlines()
    lo = max(0, line - 1 - radius)
    hi = min(len(lines), line + radius)
    out = []
    for i in range(lo, hi):
        marker = ">" if i == line - 1 else " "
        out.append(f"{marker} {i + 1:4d}: {lines[i]}")
    return "\n".join(out)


def categorize_errors(
    tool_output: str, sources: Optional[Mapping[str, str]] = None
) -> list[CategorizedError]:
    """Categorized errors found in raw tool output, in order of appearance."""
    errors: list[CategorizedError] = []
    for line in tool_output.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        category = None
        for cat, patterns in _CATEGORY_PATTERNS:
            if any(p.search(stripped) for p in patterns):
                category = cat
                break
        if category is None:
            if _FALLBACK_ERROR_RE.search(stripped) and not _NOT_AN_ERROR_RE.search(stripped):
                category = ErrorCategory.OTHER
            else:
                continue

        file = line_no = context = None
        m = _FILE_LINE_RE.search(stripped)
        if m:
            file, line_no = m.group(1), int(m.group(2))
            if sources:
                src = sources.get(file)
                if src is None:
                    # match on basename; tools echo paths differently
                    base = file.rsplit("/", 1)[-1]
                    src = next(
                        (text for name, text in sources.items()
                         if name.rsplit("/", 1)[-1] == base),
                        None,
                    )
                if src is not None:
                    context = extract_context(src, line_no)
        errors.append(
            CategorizedError(
                category=category,
                message=stripped,
                file=file,
                line=line_no,
                context=context,
            )
        )
        if len(errors) >= _MAX_ERRORS:
            break
    return errors
