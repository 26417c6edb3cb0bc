"""Canned benchmark problems shared by the pipeline and acceptance tests.

write_toy_suite() lays out ten problems in a directory: three symbolic
table specs, one hierarchical spec with a scripted decomposition, and six
general specs with scripted completions (five with provided testbenches,
one that generates its own).
"""

import json
from pathlib import Path


def _fenced(body: str, prose: str = "Here is the design:") -> str:
    return f"{prose}\n```verilog\n{body}```\n"


XOR_MD = """kmap_xor
Implement the boolean function given by this truth table:

a b | f
0 0 | 0
0 1 | 1
1 0 | 1
1 1 | 0
"""

GRID_TXT = """kmap_grid
Derive minimal logic from the karnaugh map below.

   b
a  0  1
0  0  1
1  1  0
"""

MAJORITY_JSON = {
    "name": "majority3",
    "description": (
        "Implement the truth table:\n"
        "a b c | f\n"
        "0 0 0 | 0\n"
        "0 0 1 | 0\n"
        "0 1 0 | 0\n"
        "0 1 1 | 1\n"
        "1 0 0 | 0\n"
        "1 0 1 | 1\n"
        "1 1 0 | 1\n"
        "1 1 1 | 1\n"
    ),
}

CPU_MD = """cpu_core
Build a small CPU core with an ALU, a register file, and an instruction
decoder, wired to a uart interface.
"""

CPU_PLAN = {
    "submodules": [
        {
            "name": "alu",
            "description": "8-bit ALU with add and subtract",
            "interface": [
                {"name": "a", "dir": "input", "width": 8},
                {"name": "b", "dir": "input", "width": 8},
                {"name": "op", "dir": "input"},
                {"name": "y", "dir": "output", "width": 8},
            ],
            "dependencies": [],
        },
        {
            "name": "regfile",
            "description": "four-entry byte-wide register file",
            "interface": [
                {"name": "clk", "dir": "input"},
                {"name": "we", "dir": "input"},
                {"name": "waddr", "dir": "input", "width": 2},
                {"name": "wdata", "dir": "input", "width": 8},
                {"name": "raddr", "dir": "input", "width": 2},
                {"name": "rdata", "dir": "output", "width": 8},
            ],
            "dependencies": [],
        },
        {
            "name": "decoder",
            "description": "instruction field decoder",
            "interface": [
                {"name": "instr", "dir": "input", "width": 8},
                {"name": "op", "dir": "output"},
                {"name": "waddr", "dir": "output", "width": 2},
            ],
            "dependencies": [],
        },
        {
            "name": "cpu_top",
            "description": "top level wiring the ALU, register file, and decoder",
            "interface": [
                {"name": "clk", "dir": "input"},
                {"name": "instr", "dir": "input", "width": 8},
                {"name": "result", "dir": "output", "width": 8},
            ],
            "dependencies": ["alu", "regfile", "decoder"],
        },
    ],
    "top": "cpu_top",
}

ALU_V = """module alu (
    input [7:0] a,
    input [7:0] b,
    input op,
    output [7:0] y
);
    assign y = op ? (a - b) : (a + b);
endmodule
"""

DECODER_V = """module decoder (
    input [7:0] instr,
    output op,
    output [1:0] waddr
);
    assign op = instr[7];
    assign waddr = instr[6:5];
endmodule
"""

REGFILE_V = """module regfile (
    input clk,
    input we,
    input [1:0] waddr,
    input [7:0] wdata,
    input [1:0] raddr,
    output [7:0] rdata
);
    reg [7:0] mem [0:3];
    always @(posedge clk) begin
        if (we)
            mem[waddr] <= wdata;
    end
    assign rdata = mem[raddr];
endmodule
"""

CPU_TOP_V = """module cpu_top (
    input clk,
    input [7:0] instr,
    output [7:0] result
);
    wire op;
    wire [1:0] waddr;
    wire [7:0] rdata;

    decoder u_decoder (.instr(instr), .op(op), .waddr(waddr));
    regfile u_regfile (.clk(clk), .we(1'b1), .waddr(waddr), .wdata(result),
                       .raddr(waddr), .rdata(rdata));
    alu u_alu (.a(rdata), .b(instr), .op(op), .y(result));
endmodule
"""

# topo order for the plan above: alu, decoder, regfile, then the top
CPU_RESPONSES = [
    "```json\n" + json.dumps(CPU_PLAN, indent=2) + "\n```",
    _fenced(ALU_V),
    _fenced(DECODER_V),
    _fenced(REGFILE_V),
    _fenced(CPU_TOP_V),
]

COUNTER_JSON = {
    "name": "counter8",
    "description": "8-bit synchronous counter with enable and synchronous reset.",
    "interface_header": "module counter8 (input clk, input rst, input en, output reg [7:0] count);",
}

COUNTER_V = """module counter8 (
    input clk,
    input rst,
    input en,
    output reg [7:0] count
);
    always @(posedge clk) begin
        if (rst)
            count <= 8'd0;
        else if (en)
            count <= count + 8'd1;
    end
endmodule
"""

COUNTER_TB = """module counter8_tb;
    reg clk, rst, en;
    wire [7:0] count;
    integer errors;
    integer total;
    reg [7:0] expected;

    counter8 dut (.clk(clk), .rst(rst), .en(en), .count(count));

    always #5 clk = ~clk;

    initial begin
        clk = 0; rst = 1; en = 0;
        errors = 0; total = 0; expected = 0;
        $display("Test 1: reset clears the count");
        @(posedge clk); #1;
        if (count !== 8'd0) errors = errors + 1;
        total = total + 1;
        rst = 0; en = 1;
        $display("Test 2: counts up while enabled");
        repeat (5) begin
            expected = count + 8'd1;
            @(posedge clk); #1;
            total = total + 1;
            if (count !== expected) errors = errors + 1;
        end
        $display("Test 3: holds while disabled");
        en = 0;
        expected = count;
        @(posedge clk); #1;
        total = total + 1;
        if (count !== expected) errors = errors + 1;
        $display("Mismatches: %0d in %0d samples", errors, total);
        $finish;
    end
endmodule
"""

ADDER_JSON = {
    "name": "adder4",
    "description": "4-bit adder producing a 5-bit sum with carry out.",
    "interface_header": "module adder4 (input [3:0] a, input [3:0] b, output [4:0] sum);",
}

ADDER_V = """module adder4 (
    input [3:0] a,
    input [3:0] b,
    output [4:0] sum
);
    assign sum = {1'b0, a} + {1'b0, b};
endmodule
"""

ADDER_TB = """module adder4_tb;
    reg [3:0] a, b;
    wire [4:0] sum;
    integer errors;
    integer total;
    integer i, j;

    adder4 dut (.a(a), .b(b), .sum(sum));

    initial begin
        errors = 0;
        total = 0;
        for (i = 0; i < 16; i = i + 1) begin
            for (j = 0; j < 16; j = j + 1) begin
                a = i[3:0];
                b = j[3:0];
                #1;
                total = total + 1;
                if (sum !== i + j) errors = errors + 1;
            end
        end
        $display("Mismatches: %0d in %0d samples", errors, total);
        $finish;
    end
endmodule
"""

SHIFT_MD = """shift8
Design an 8-bit shift register with serial input and parallel output. On
each rising clock edge the register shifts left by one and loads the serial
bit into the least significant position.
"""

SHIFT_V = """module shift8 (
    input clk,
    input sin,
    output reg [7:0] q
);
    always @(posedge clk) begin
        q <= {q[6:0], sin};
    end
endmodule
"""

SHIFT_TB = """module shift8_tb;
    reg clk, sin;
    wire [7:0] q;
    integer errors;
    integer total;
    reg [7:0] model;

    shift8 dut (.clk(clk), .sin(sin), .q(q));

    always #5 clk = ~clk;

    initial begin
        clk = 0; sin = 0;
        errors = 0; total = 0; model = 8'bx;
        @(posedge clk);
        repeat (12) begin
            sin = $random;
            model = {q[6:0], sin};
            @(posedge clk); #1;
            total = total + 1;
            if (q !== model) errors = errors + 1;
        end
        $display("Mismatches: %0d in %0d samples", errors, total);
        $finish;
    end
endmodule
"""

MUX_JSON = {
    "name": "mux4",
    "description": "4-to-1 multiplexer over 8-bit data inputs.",
    "interface_header": (
        "module mux4 (input [7:0] d0, input [7:0] d1, input [7:0] d2, "
        "input [7:0] d3, input [1:0] sel, output [7:0] y);"
    ),
}

MUX_V = """module mux4 (
    input [7:0] d0,
    input [7:0] d1,
    input [7:0] d2,
    input [7:0] d3,
    input [1:0] sel,
    output [7:0] y
);
    assign y = (sel == 2'd0) ? d0 :
               (sel == 2'd1) ? d1 :
               (sel == 2'd2) ? d2 : d3;
endmodule
"""

MUX_TB = """module mux4_tb;
    reg [7:0] d0, d1, d2, d3;
    reg [1:0] sel;
    wire [7:0] y;
    integer errors;
    integer total;

    mux4 dut (.d0(d0), .d1(d1), .d2(d2), .d3(d3), .sel(sel), .y(y));

    task check;
        input [1:0] s;
        input [7:0] expect_val;
        begin
            sel = s;
            #1;
            total = total + 1;
            if (y !== expect_val) errors = errors + 1;
        end
    endtask

    initial begin
        errors = 0;
        total = 0;
        d0 = 8'h11; d1 = 8'h22; d2 = 8'h33; d3 = 8'h44;
        check(2'd0, 8'h11);
        check(2'd1, 8'h22);
        check(2'd2, 8'h33);
        check(2'd3, 8'h44);
        $display("Mismatches: %0d in %0d samples", errors, total);
        $finish;
    end
endmodule
"""

GRAY_JSON = {
    "name": "gray3",
    "description": "3-bit Gray-code counter advancing one code per clock.",
    "interface_header": "module gray3 (input clk, input rst, output reg [2:0] g);",
}

GRAY_V = """module gray3 (
    input clk,
    input rst,
    output reg [2:0] g
);
    reg [2:0] bin;
    always @(posedge clk) begin
        if (rst)
            bin <= 3'd0;
        else
            bin <= bin + 3'd1;
    end
    always @(*) begin
        g = bin ^ (bin >> 1);
    end
endmodule
"""

GRAY_TB = """module gray3_tb;
    reg clk, rst;
    wire [2:0] g;
    integer errors;
    integer total;
    reg [2:0] prev;
    reg [2:0] diff;

    gray3 dut (.clk(clk), .rst(rst), .g(g));

    always #5 clk = ~clk;

    initial begin
        clk = 0; rst = 1;
        errors = 0; total = 0;
        @(posedge clk); #1;
        rst = 0;
        prev = g;
        repeat (10) begin
            @(posedge clk); #1;
            diff = prev ^ g;
            total = total + 1;
            if (diff != 3'b001 && diff != 3'b010 && diff != 3'b100)
                errors = errors + 1;
            prev = g;
        end
        $display("Mismatches: %0d in %0d samples", errors, total);
        $finish;
    end
endmodule
"""

DEC_JSON = {
    "name": "dec3to8",
    "description": "3-to-8 one-hot line selector producing exactly one active output.",
    "interface_header": "module dec3to8 (input [2:0] sel, output reg [7:0] y);",
}

DEC_V = """module dec3to8 (
    input [2:0] sel,
    output reg [7:0] y
);
    always @(*) begin
        y = 8'b0;
        y[sel] = 1'b1;
    end
endmodule
"""

DEC_TB_RESPONSE = """module dec3to8_tb;
    reg [2:0] sel;
    wire [7:0] y;
    integer errors;
    integer total;

    dec3to8 dut (.sel(sel), .y(y));

    task check;
        input [2:0] s;
        begin
            sel = s;
            #10;
            total = total + 1;
            if (y !== (8'b1 << s)) errors = errors + 1;
        end
    endtask

    initial begin
        errors = 0;
        total = 0;
        $display("Test 1: select line 0");
        check(3'd0);
        $display("Test 2: select line 1");
        check(3'd1);
        $display("Test 3: select line 3");
        check(3'd3);
        $display("Test 4: select line 5");
        check(3'd5);
        $display("Test 5: select line 7");
        check(3'd7);
        $display("Mismatches: %0d in %0d samples", errors, total);
        $finish;
    end
endmodule
"""

SYMBOLIC_NAMES = ("kmap_xor", "kmap_grid", "majority3")
HIERARCHICAL_NAMES = ("cpu_core",)
GENERAL_NAMES = ("counter8", "adder4", "shift8", "mux4", "gray3", "dec3to8")


def write_toy_suite(problem_dir):
    """Writes the ten-problem suite and returns the problem names by kind."""
    problem_dir = Path(problem_dir)
    problem_dir.mkdir(parents=True, exist_ok=True)

    def put(name, content):
        if isinstance(content, (dict, list)):
            content = json.dumps(content, indent=2) + "\n"
        (problem_dir / name).write_text(content, encoding="utf-8")

    put("p01_xor.md", XOR_MD)
    put("p02_grid.txt", GRID_TXT)
    put("p03_majority.json", MAJORITY_JSON)

    put("p04_cpu.md", CPU_MD)
    put("p04_cpu_responses.json", CPU_RESPONSES)

    put("p05_counter.json", COUNTER_JSON)
    put("p05_counter_responses.json", [_fenced(COUNTER_V)])
    put("p05_counter_tb.v", COUNTER_TB)

    put("p06_adder.json", ADDER_JSON)
    put("p06_adder_responses.json", [_fenced(ADDER_V)])
    put("p06_adder_tb.v", ADDER_TB)

    put("p07_shift.md", SHIFT_MD)
    put("p07_shift_responses.json", [_fenced(SHIFT_V)])
    put("p07_shift_tb.v", SHIFT_TB)

    put("p08_mux.json", MUX_JSON)
    put("p08_mux_responses.json", [_fenced(MUX_V)])
    put("p08_mux_tb.v", MUX_TB)

    put("p09_gray.json", GRAY_JSON)
    put("p09_gray_responses.json", [_fenced(GRAY_V)])
    put("p09_gray_tb.v", GRAY_TB)

    put("p10_decoder.json", DEC_JSON)
    put("p10_decoder_responses.json", [_fenced(DEC_V), _fenced(DEC_TB_RESPONSE, "The harness:")])

    return {
        "symbolic": SYMBOLIC_NAMES,
        "hierarchical": HIERARCHICAL_NAMES,
        "general": GENERAL_NAMES,
    }
