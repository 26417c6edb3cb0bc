"""Symbolic truth-table and Karnaugh-map solving.

Deterministic pipeline: parse a K-map grid or truth table out of a prose
specification, minimize with Quine-McCluskey plus Petrick's method, detect
pure parity structure, and emit Verilog-2001. No LLM involvement anywhere
in this subpackage.
"""

from .model import (
    CellValue,
    Implicant,
    SopExpression,
    TruthFunction,
    gray_sequence,
)
from .minimize import minimize, prime_implicants, detect_xor
from .parse import ParseError, parse_kmap, parse_truth_table, parse_truth_table_multi, render_kmap
from .emit import EmitError, emit_verilog, emit_verilog_multi
from .solve import SolveError, SolveResult, solve_text

__all__ = [
    "CellValue",
    "Implicant",
    "SopExpression",
    "TruthFunction",
    "gray_sequence",
    "minimize",
    "prime_implicants",
    "detect_xor",
    "ParseError",
    "parse_kmap",
    "parse_truth_table",
    "parse_truth_table_multi",
    "render_kmap",
    "EmitError",
    "emit_verilog",
    "emit_verilog_multi",
    "SolveError",
    "SolveResult",
    "solve_text",
]
