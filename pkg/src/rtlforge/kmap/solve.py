"""End-to-end symbolic solving: prose in, Verilog-2001 out.

Tries the K-map grid parser first, then the truth-table parser; the first
table that parses wins. When both a grid and conflicting prose are present
the grid is trusted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .emit import emit_verilog_multi
from .minimize import detect_xor, minimize
from .model import SopExpression, TruthFunction
from .parse import ParseError, parse_kmap, parse_truth_table_multi


class SolveError(Exception):
    pass


@dataclass(frozen=True)
class SolveResult:
    source: str
    functions: tuple[TruthFunction, ...]
    expressions: tuple[SopExpression, ...]
    xor_forms: tuple[Optional[tuple[tuple[int, ...], int]], ...]
    table_kind: str  # "kmap" or "truth_table"


def solve_text(
    text: str,
    module_name: str = "top_module",
    interface_header: Optional[str] = None,
    output_name: Optional[str] = None,
) -> SolveResult:
    """Solve every output function found in the text and emit one module."""
    functions: list[TruthFunction]
    try:
        functions = [parse_kmap(text)]
        table_kind = "kmap"
    except ParseError:
        try:
            functions = parse_truth_table_multi(text)
            table_kind = "truth_table"
        except ParseError as exc:
            raise SolveError(f"no solvable table found: {exc}") from exc

    if output_name and len(functions) == 1:
        functions = [
            TruthFunction(
                var_names=functions[0].var_names,
                values=functions[0].values,
                output_name=output_name,
            )
        ]

    solved = []
    for tf in functions:
        expr = minimize(tf)
        xor_form = detect_xor(tf) if expr.constant is None else None
        solved.append((tf, expr, xor_form))

    source = emit_verilog_multi(
        solved, module_name=module_name, interface_header=interface_header
    )
    return SolveResult(
        source=source,
        functions=tuple(tf for tf, _, _ in solved),
        expressions=tuple(expr for _, expr, _ in solved),
        xor_forms=tuple(x for _, _, x in solved),
        table_kind=table_kind,
    )
