"""Module discovery, header extraction, and dedup on raw Verilog text."""

from __future__ import annotations

import pytest

from rtlforge.verilog import (
    ModulePort,
    blank_comments,
    dedupe_modules,
    extract_header,
    find_modules,
)

ANSI = """
// adder with carry
module adder #(parameter W = 4) (
    input  wire [W-1:0] a,
    input  wire [W-1:0] b,
    input  cin,
    output wire [W:0] sum
);
    assign sum = a + b + cin;
endmodule
"""

NON_ANSI = """
module mux(sel, a, b, y);
  input sel;
  input [7:0] a, b;
  output [7:0] y;
  assign y = sel ? b : a;
endmodule
"""


def test_find_ansi_module():
    mods = find_modules(ANSI)
    assert len(mods) == 1
    m = mods[0]
    assert m.name == "adder"
    assert not m.is_stub
    assert [p.name for p in m.ports] == ["a", "b", "cin", "sum"]
    assert m.ports[0].direction == "input"
    assert m.ports[0].width == "[W-1:0]"
    assert m.ports[2].width == ""
    assert m.ports[3].direction == "output"


def test_find_nonansi_module():
    m = find_modules(NON_ANSI)[0]
    assert m.name == "mux"
    assert [p.name for p in m.ports] == ["sel", "a", "b", "y"]
    assert m.ports[1].width == "[7:0]"
    assert m.ports[3].direction == "output"


def test_module_keyword_in_comment_ignored():
    src = "// module fake(input a);\n" + ANSI
    assert [m.name for m in find_modules(src)] == ["adder"]


def test_two_modules_two_headers():
    src = ANSI + "\n" + NON_ANSI
    header = extract_header(src)
    assert header.count("endmodule") == 2
    assert "module adder" in header
    assert "module mux" in header
    # non-ANSI stub carries pulled-up direction declarations
    assert "input [7:0] a;" in header


def test_extract_header_is_lintable_stub():
    header = extract_header(ANSI)
    assert header.strip().endswith("endmodule")
    assert "assign" not in header


def test_extract_header_requires_module():
    with pytest.raises(ValueError):
        extract_header("wire x;")


def test_stub_detection():
    stub = "module m(input a, output b);\nendmodule\n"
    assert find_modules(stub)[0].is_stub
    stub_decl = "module m(a, b);\ninput a;\noutput b;\nendmodule\n"
    assert find_modules(stub_decl)[0].is_stub
    assert not find_modules(ANSI)[0].is_stub


def test_dedupe_keeps_first_full_definition():
    first = "module m(input a, output f);\n  assign f = a;\nendmodule\n"
    second = "module m(input a, output f);\n  assign f = ~a;\nendmodule\n"
    out = dedupe_modules(first + "\n" + second)
    assert out.count("module m(") == 1
    assert "assign f = a;" in out
    assert "assign f = ~a;" not in out


def test_dedupe_drops_stub_when_full_exists():
    stub = "module m(input a, output f);\nendmodule\n"
    full = "module m(input a, output f);\n  assign f = a;\nendmodule\n"
    out = dedupe_modules(stub + "\n" + full)
    assert out.count("module m(") == 1
    assert "assign f = a;" in out


def test_dedupe_keeps_lone_stub():
    stub = "module m(input a, output f);\nendmodule\n"
    out = dedupe_modules(stub + "\n" + stub)
    assert out.count("module m(") == 1


def test_dedupe_preserves_other_modules_and_text():
    src = "`timescale 1ns/1ps\n" + ANSI + NON_ANSI + ANSI
    out = dedupe_modules(src)
    assert out.count("module adder") == 1
    assert out.count("module mux") == 1
    assert "`timescale" in out


def test_dedupe_idempotent():
    src = ANSI + NON_ANSI + ANSI
    once = dedupe_modules(src)
    assert dedupe_modules(once) == once


def test_blank_comments_preserves_length_and_offsets():
    src = 'x /* module hidden */ y // tail\nz "module str" w'
    out = blank_comments(src)
    assert len(out) == len(src)
    assert "module" not in out
    assert out[0] == "x"
    assert "z" in out and "w" in out
