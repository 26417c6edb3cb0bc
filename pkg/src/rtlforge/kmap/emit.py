"""Deterministic Verilog-2001 emission for solved logic functions.

Output is a single module with one continuous assignment per output, ANSI
port list, two-state literals only. Formatting is byte-stable: same inputs,
same text, so regenerated solutions diff cleanly.
"""

from __future__ import annotations

import re
from typing import Optional, Sequence

from .model import Implicant, SopExpression, TruthFunction

_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_$]*$")
# ANSI header port declaration: direction, optional type/width, name.
_HEADER_PORT_RE = re.compile(
    r"\b(input|output|inout)\s+(?:wire\s+|reg\s+|logic\s+)?(?:\[[^\]]*\]\s*)?([A-Za-z_][A-Za-z0-9_$]*)"
)


class EmitError(Exception):
    pass


def _check_identifier(name: str, what: str) -> None:
    if not _IDENT_RE.match(name):
        raise EmitError(f"{what} {name!r} is not a legal Verilog identifier")


def render_term(imp: Implicant, var_names: Sequence[str]) -> str:
    """Product term text; variables appear in declared order."""
    n = len(var_names)
    literals = []
    for i, name in enumerate(var_names):
        bit = 1 << (n - 1 - i)
        if imp.fixed_mask & bit:
            literals.append(name if imp.value_bits & bit else f"~{name}")
    if not literals:
        return "1'b1"
    joined = " & ".join(literals)
    return f"({joined})" if len(literals) > 1 else joined


def render_expression(
    expr: SopExpression,
    var_names: Sequence[str],
    xor_form: Optional[tuple[tuple[int, ...], int]] = None,
) -> str:
    """Right-hand side text. A detected parity form wins over the SOP."""
    if xor_form is not None:
        subset, polarity = xor_form
        chain = " ^ ".join(var_names[i] for i in subset)
        return f"~({chain})" if polarity else chain
    if expr.constant is not None:
        return "1'b1" if expr.constant else "1'b0"
    return " | ".join(render_term(t, var_names) for t in expr.terms)


def _parse_header_ports(header: str) -> tuple[list[str], list[str]]:
    inputs, outputs = [], []
    for direction, name in _HEADER_PORT_RE.findall(header):
        if direction == "input":
            inputs.append(name)
        elif direction == "output":
            outputs.append(name)
    return inputs, outputs


def emit_verilog(
    tf: TruthFunction,
    expr: SopExpression,
    xor_form: Optional[tuple[tuple[int, ...], int]] = None,
    module_name: str = "top_module",
    interface_header: Optional[str] = None,
) -> str:
    """Single-output module around the solved expression."""
    return emit_verilog_multi(
        [(tf, expr, xor_form)], module_name=module_name, interface_header=interface_header
    )


def emit_verilog_multi(
    solved: Sequence[tuple[TruthFunction, SopExpression, Optional[tuple[tuple[int, ...], int]]]],
    module_name: str = "top_module",
    interface_header: Optional[str] = None,
) -> str:
    """One module, one continuous assignment per solved output.

    All functions must share the same variable tuple. When an interface
    header is supplied it is kept verbatim and its ports are bound
    positionally: header inputs to the shared variables, header outputs to
    the solved outputs in order. Without a header an ANSI port list is
    synthesized from the variable and output names.
    """
    if not solved:
        raise EmitError("nothing to emit")
    var_names = solved[0][0].var_names
    for tf, _, _ in solved[1:]:
        if tf.var_names != var_names:
            raise EmitError("all outputs must share one variable order")
    output_names = [tf.output_name for tf, _, _ in solved]
    if len(set(output_names)) != len(output_names):
        raise EmitError(f"duplicate output names: {output_names}")

    if interface_header is not None:
        header = interface_header.strip()
        if not header.endswith(";"):
            header += ";"
        ins, outs = _parse_header_ports(header)
        if len(ins) != len(var_names) or len(outs) != len(solved):
            raise EmitError(
                "interface header has %d inputs/%d outputs; solution needs %d/%d"
                % (len(ins), len(outs), len(var_names), len(solved))
            )
        name_map = dict(zip(var_names, ins))
        bound_vars = tuple(name_map[v] for v in var_names)
        lines = [header]
        for (tf, expr, xor_form), out in zip(solved, outs):
            rhs = render_expression(expr, bound_vars, xor_form)
            lines.append(f"    assign {out} = {rhs};")
        lines.append("endmodule")
        return "\n".join(lines) + "\n"

    _check_identifier(module_name, "module name")
    for name in (*var_names, *output_names):
        _check_identifier(name, "port name")
    ports = [f"    input {v}" for v in var_names]
    ports += [f"    output {o}" for o in output_names]
    lines = [f"module {module_name}(", ",\n".join(ports), ");"]
    for tf, expr, xor_form in solved:
        rhs = render_expression(expr, var_names, xor_form)
        lines.append(f"    assign {tf.output_name} = {rhs};")
    lines.append("endmodule")
    return "\n".join(lines) + "\n"
