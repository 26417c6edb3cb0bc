"""Byte-stable Verilog emission goldens."""

from __future__ import annotations

import pytest

from rtlforge.kmap import (
    EmitError,
    TruthFunction,
    detect_xor,
    emit_verilog,
    emit_verilog_multi,
    minimize,
    solve_text,
)


def test_emit_sop_golden():
    tf = TruthFunction.from_minterms(3, [0, 1, 2, 5, 6, 7])
    expr = minimize(tf)
    assert emit_verilog(tf, expr, module_name="top_module") == (
        "module top_module(\n"
        "    input a,\n"
        "    input b,\n"
        "    input c,\n"
        "    output f\n"
        ");\n"
        "    assign f = (~b & c) | (~a & ~c) | (a & b);\n"
        "endmodule\n"
    )


def test_emit_xor_form_wins():
    tf = TruthFunction.from_minterms(3, [1, 2, 4, 7])
    expr = minimize(tf)
    xor = detect_xor(tf)
    out = emit_verilog(tf, expr, xor_form=xor)
    assert "assign f = a ^ b ^ c;" in out


def test_emit_xnor_polarity():
    tf = TruthFunction.from_minterms(2, [0, 3])
    out = emit_verilog(tf, minimize(tf), xor_form=detect_xor(tf))
    assert "assign f = ~(a ^ b);" in out


def test_emit_constants():
    zero = TruthFunction.from_minterms(2, [])
    assert "assign f = 1'b0;" in emit_verilog(zero, minimize(zero))
    one = TruthFunction.from_minterms(2, [0, 1, 2, 3])
    assert "assign f = 1'b1;" in emit_verilog(one, minimize(one))


def test_emit_single_literal_term_unparenthesized():
    tf = TruthFunction.from_minterms(2, [2, 3])  # f = a
    assert "assign f = a;" in emit_verilog(tf, minimize(tf))


def test_emit_is_deterministic():
    tf = TruthFunction.from_minterms(4, [1, 3, 5, 7, 9, 11, 14])
    expr = minimize(tf)
    assert emit_verilog(tf, expr) == emit_verilog(tf, expr)


def test_emit_honors_interface_header():
    tf = TruthFunction.from_minterms(2, [1, 2])
    expr = minimize(tf)
    header = "module top_module(input x, input y, output out);"
    out = emit_verilog(tf, expr, xor_form=detect_xor(tf), interface_header=header)
    assert out.startswith(header)
    # variables are bound positionally to the header's input names
    assert "assign out = x ^ y;" in out
    assert out.rstrip().endswith("endmodule")


def test_emit_header_port_count_mismatch():
    tf = TruthFunction.from_minterms(2, [1])
    header = "module m(input x, output out);"
    with pytest.raises(EmitError, match="inputs"):
        emit_verilog(tf, minimize(tf), interface_header=header)


def test_emit_rejects_bad_module_name():
    tf = TruthFunction.from_minterms(1, [1])
    with pytest.raises(EmitError):
        emit_verilog(tf, minimize(tf), module_name="2bad")


def test_emit_multi_output():
    a = TruthFunction.from_minterms(2, [1, 2], output_name="sum")
    b = TruthFunction.from_minterms(2, [3], output_name="carry")
    out = emit_verilog_multi([
        (a, minimize(a), detect_xor(a)),
        (b, minimize(b), None),
    ], module_name="half_adder")
    assert "module half_adder(" in out
    assert "assign sum = a ^ b;" in out
    assert "assign carry = (a & b);" in out
    assert out.count("endmodule") == 1


def test_solve_text_end_to_end_kmap():
    text = """
       b
    a  0  1
    0  0  1
    1  1  0
    """
    result = solve_text(text)
    assert result.table_kind == "kmap"
    assert "assign f = a ^ b;" in result.source


def test_solve_text_end_to_end_truth_table():
    text = "a b | f\n0 0 | 0\n0 1 | 1\n1 0 | 0\n1 1 | 1\n"
    result = solve_text(text)
    assert result.table_kind == "truth_table"
    # f = b
    assert "assign f = b;" in result.source


def test_solve_text_reports_failure():
    from rtlforge.kmap import SolveError

    with pytest.raises(SolveError):
        solve_text("just write me a fifo")
