"""Extraction of K-map grids and truth tables from specification prose.

Accepted K-map shape (pipes optional, prose above/below ignored):

            ab
    cd      00  01  11  10
    00      0   1   1   0
    01      1   0   0   1
    11      x   0   0   x
    10      0   1   1   0

Row and column labels must each be a complete Gray-adjacent sequence of
equal-width binary strings. The variable order of the parsed function is
row group then column group, so the cell at (r, c) is minterm (r << w) | c.

Accepted truth-table shapes: whitespace columns with an optional single
'|' separating inputs from outputs (the only layout that can declare
multiple outputs), or fully piped markdown rows where the last column is
the output. A leading identifier row of matching shape names the columns.
Missing input rows become don't-cares; conflicting duplicates are errors.
"""

from __future__ import annotations

import re
from typing import Optional, Sequence

from .model import MAX_VARS, CellValue, TruthFunction, gray_sequence, is_gray_sequence

_CELL_SYMBOLS = {"0", "1", "x", "X", "d", "D", "-"}
_BINARY_RE = re.compile(r"^[01]+$")
_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_MD_SEPARATOR_RE = re.compile(r"^:?-{2,}:?$")
_DEFAULT_NAMES = "abcdef"


class ParseError(Exception):
    """Unparseable or inconsistent table text; carries the offending line."""

    def __init__(self, message: str, line: Optional[str] = None):
        self.line = line
        super().__init__(message if line is None else f"{message} (line: {line.strip()!r})")


def _tokens(line: str) -> list[str]:
    return line.replace("|", " ").split()


def _is_label_run(tokens: Sequence[str]) -> bool:
    if len(tokens) < 2:
        return False
    width = len(tokens[0])
    if width == 0 or any(len(t) != width or not _BINARY_RE.match(t) for t in tokens):
        return False
    return len(tokens) == 1 << width


def _group_names(token: Optional[str], count: int, taken: set[str]) -> list[str]:
    """Variable names for one axis group; falls back to unused defaults."""
    if token:
        if "," in token:
            parts = [p.strip() for p in token.split(",") if p.strip()]
        elif len(token) == count and token.isalpha():
            parts = list(token)
        elif count == 1 and _IDENT_RE.match(token):
            parts = [token]
        else:
            parts = []
        if len(parts) == count and all(_IDENT_RE.match(p) for p in parts):
            return parts
    names = []
    pool = [c for c in _DEFAULT_NAMES if c not in taken]
    for _ in range(count):
        names.append(pool.pop(0))
    return names


def parse_kmap(text: str) -> TruthFunction:
    """Parse the first K-map grid found in the text."""
    lines = [(ln, _tokens(ln)) for ln in text.splitlines() if ln.strip()]

    header_idx = None
    designator = None
    col_labels: list[str] = []
    for idx, (ln, toks) in enumerate(lines):
        for lead in (0, 1):
            run = toks[lead:]
            if len(toks) > lead and _is_label_run(run):
                if lead == 1 and _BINARY_RE.match(toks[0]):
                    continue  # looks like a data row, not a header
                header_idx = idx
                designator = toks[0] if lead == 1 else None
                col_labels = list(run)
                break
        if header_idx is not None:
            break
    if header_idx is None:
        raise ParseError("no K-map column header found")

    col_width = len(col_labels[0])
    col_values = [int(t, 2) for t in col_labels]
    if sorted(col_values) != list(range(1 << col_width)):
        raise ParseError("column labels do not cover all combinations", lines[header_idx][0])
    if not is_gray_sequence(col_values):
        raise ParseError("column labels are not a Gray sequence", lines[header_idx][0])

    rows: list[tuple[int, list[str]]] = []
    row_width = None
    for ln, toks in lines[header_idx + 1:]:
        if len(toks) != 1 + len(col_labels) or not _BINARY_RE.match(toks[0]):
            break
        label, cells = toks[0], toks[1:]
        if row_width is None:
            row_width = len(label)
        if len(label) != row_width:
            raise ParseError("row label width changed mid-grid", ln)
        bad = [c for c in cells if c not in _CELL_SYMBOLS]
        if bad:
            raise ParseError(f"unrecognized cell symbol {bad[0]!r}", ln)
        rows.append((int(label, 2), cells))
        if len(rows) == (1 << row_width):
            break
    if not rows or row_width is None:
        raise ParseError("no K-map data rows under the column header")
    row_values = [r for r, _ in rows]
    if sorted(row_values) != list(range(1 << row_width)):
        raise ParseError("row labels do not cover all combinations")
    if not is_gray_sequence(row_values):
        raise ParseError("row labels are not a Gray sequence")

    num_vars = row_width + col_width
    if num_vars > MAX_VARS:
        raise ParseError(f"grid implies {num_vars} variables; limit is {MAX_VARS}")

    row_token = col_token = None
    if designator and ("\\" in designator or "/" in designator):
        sep = "\\" if "\\" in designator else "/"
        row_token, col_token = designator.split(sep, 1)
    else:
        row_token = designator
        if header_idx > 0:
            above = lines[header_idx - 1][1]
            if len(above) == 1 and not _BINARY_RE.match(above[0]):
                col_token = above[0]

    row_names = _group_names(row_token, row_width, set())
    col_names = _group_names(col_token, col_width, set(row_names))
    var_names = tuple(row_names + col_names)

    values: list[CellValue] = [CellValue.ZERO] * (1 << num_vars)
    for row_value, cells in rows:
        for col_value, cell in zip(col_values, cells):
            values[(row_value << col_width) | col_value] = CellValue.from_symbol(cell)
    return TruthFunction(var_names=var_names, values=tuple(values))


def render_kmap(tf: TruthFunction) -> str:
    """Grid text that parse_kmap maps back to the identical function."""
    n = tf.num_vars
    if n < 2:
        raise ValueError("K-map rendering needs at least 2 variables")
    row_width = n // 2
    col_width = n - row_width
    row_names = tf.var_names[:row_width]
    col_names = tf.var_names[row_width:]

    def group(names: Sequence[str]) -> str:
        return "".join(names) if all(len(x) == 1 for x in names) else ",".join(names)

    col_lbls = [format(g, f"0{col_width}b") for g in gray_sequence(col_width)]
    row_lbls = [format(g, f"0{row_width}b") for g in gray_sequence(row_width)]
    lead = max(len(group(row_names)), row_width) + 2
    out = [" " * lead + group(col_names)]
    out.append(group(row_names).ljust(lead) + "  ".join(col_lbls))
    for lbl in row_lbls:
        r = int(lbl, 2)
        cells = [
            tf.values[(r << col_width) | int(c, 2)].value.ljust(col_width)
            for c in col_lbls
        ]
        out.append(lbl.ljust(lead) + "  ".join(cells).rstrip())
    return "\n".join(out) + "\n"


# per-line classification for truth-table scanning
_SEPARATOR = "separator"
_DATA = "data"


def _classify_line(line: str):
    """('data', fields, split) | ('separator',) | None."""
    stripped = line.strip()
    if not stripped:
        return None
    if stripped.startswith("|"):
        stripped = stripped[1:]
    if stripped.endswith("|"):
        stripped = stripped[:-1]
    if "|" in stripped:
        parts = [p.strip() for p in stripped.split("|")]
        if any(not p for p in parts):
            return None
        if len(parts) == 2:
            left, right = parts[0].split(), parts[1].split()
            fields, split = left + right, len(left)
        else:
            fields = [f for p in parts for f in p.split()]
            split = None
    else:
        fields, split = stripped.split(), None
    if not fields:
        return None
    if all(_MD_SEPARATOR_RE.match(f) for f in fields):
        return (_SEPARATOR,)
    return (_DATA, fields, split)


def _is_data_fields(fields: list[str], split: Optional[int]) -> bool:
    n_in = split if split is not None else len(fields) - 1
    if n_in < 1 or n_in > len(fields) - 1:
        return False
    ins, outs = fields[:n_in], fields[n_in:]
    return all(f in ("0", "1") for f in ins) and all(f in _CELL_SYMBOLS for f in outs)


def parse_truth_table_multi(text: str) -> list[TruthFunction]:
    """Parse the longest truth-table block; one function per output column."""
    lines = text.splitlines()
    classified = [_classify_line(ln) for ln in lines]

    def is_data(entry) -> bool:
        return entry is not None and entry[0] == _DATA and _is_data_fields(entry[1], entry[2])

    # longest run of shape-consistent data rows, separators allowed inside
    best = None  # (length, start, end, width, split)
    i = 0
    while i < len(lines):
        entry = classified[i]
        if not is_data(entry):
            i += 1
            continue
        width, split = len(entry[1]), entry[2]
        j, count = i, 0
        while j < len(lines):
            nxt = classified[j]
            if nxt is not None and nxt[0] == _SEPARATOR:
                j += 1
                continue
            if is_data(nxt) and len(nxt[1]) == width and nxt[2] == split:
                count += 1
                j += 1
                continue
            break
        if best is None or count > best[0]:
            best = (count, i, j, width, split)
        i = j
    if best is None:
        raise ParseError("no truth-table rows found")
    _, start, end, width, split = best

    n_in = split if split is not None else width - 1
    n_out = width - n_in
    if not 1 <= n_in <= MAX_VARS:
        raise ParseError(f"truth table has {n_in} input columns; limit is {MAX_VARS}")

    var_names = list(_DEFAULT_NAMES[:n_in])
    out_names = ["f"] if n_out == 1 else [f"f{j}" for j in range(n_out)]
    k = start - 1
    while k >= 0 and classified[k] is not None and classified[k][0] == _SEPARATOR:
        k -= 1
    if k >= 0 and classified[k] is not None and classified[k][0] == _DATA:
        fields, hsplit = classified[k][1], classified[k][2]
        if (
            len(fields) == width
            and (hsplit == split or hsplit is None or split is None)
            and all(_IDENT_RE.match(f) for f in fields)
        ):
            var_names = fields[:n_in]
            out_names = fields[n_in:]

    size = 1 << n_in
    columns: list[dict[int, CellValue]] = [dict() for _ in range(n_out)]
    for idx in range(start, end):
        entry = classified[idx]
        if entry is None or entry[0] != _DATA:
            continue
        fields = entry[1]
        minterm = int("".join(fields[:n_in]), 2)
        for j in range(n_out):
            val = CellValue.from_symbol(fields[n_in + j])
            prev = columns[j].get(minterm)
            if prev is not None and prev is not val:
                raise ParseError(
                    f"conflicting outputs for input row {fields[:n_in]}", lines[idx]
                )
            columns[j][minterm] = val

    result = []
    for j in range(n_out):
        values = tuple(columns[j].get(m, CellValue.DONT_CARE) for m in range(size))
        result.append(
            TruthFunction(
                var_names=tuple(var_names), values=values, output_name=out_names[j]
            )
        )
    return result


def parse_truth_table(text: str) -> TruthFunction:
    """Single-output convenience wrapper; errors when several outputs exist."""
    funcs = parse_truth_table_multi(text)
    if len(funcs) != 1:
        raise ParseError(f"expected one output column, found {len(funcs)}")
    return funcs[0]
