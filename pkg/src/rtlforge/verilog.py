"""Verilog source text utilities: module discovery, headers, dedup.

Text-level parsing only; no elaboration. Comments and strings are blanked
(offsets preserved) before scanning so `module` inside a comment never
confuses the walker. Both ANSI (directions in the port list) and non-ANSI
(directions declared in the body) styles are understood.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

_MODULE_KW_RE = re.compile(r"\bmodule\s+([A-Za-z_][A-Za-z0-9_$]*)")
_ENDMODULE_RE = re.compile(r"\bendmodule\b")
_DIRECTION_RE = re.compile(r"^(input|output|inout)\b")
_BODY_DECL_RE = re.compile(
    r"\b(input|output|inout)\b([^;]*);", re.DOTALL
)
_DECL_ONLY_RE = re.compile(
    r"\b(?:input|output|inout|parameter|localparam|wire|reg|logic)\b[^;]*;"
)
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_$]*")


@dataclass(frozen=True)
class ModulePort:
    name: str
    direction: str  # input | output | inout
    width: str = ""  # e.g. "[7:0]"; empty for scalars


@dataclass(frozen=True)
class ModuleDecl:
    name: str
    ports: tuple[ModulePort, ...]
    header_text: str  # verbatim source from 'module' through the header ';'
    span: tuple[int, int]  # [start, end) offsets of the whole definition
    is_stub: bool  # header with no behavioral body


def blank_comments(source: str) -> str:
    """Same length as source with comments and string bodies spaced out."""
    out = list(source)
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        if c == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                out[i] = " "
                i += 1
        elif c == "/" and i + 1 < n and source[i + 1] == "*":
            out[i] = out[i + 1] = " "
            i += 2
            while i + 1 < n and not (source[i] == "*" and source[i + 1] == "/"):
                if source[i] != "\n":
                    out[i] = " "
                i += 1
            if i + 1 < n:
                out[i] = out[i + 1] = " "
                i += 2
        elif c == '"':
            i += 1
            while i < n and source[i] != '"':
                if source[i] == "\\":
                    out[i] = " "
                    i += 1
                    if i < n and source[i] != "\n":
                        out[i] = " "
                    i += 1
                    continue
                if source[i] != "\n":
                    out[i] = " "
                i += 1
            i += 1
        else:
            i += 1
    return "".join(out)


def _balanced_span(text: str, start: int) -> Optional[int]:
    """End offset (exclusive) of the paren group opening at ``start``."""
    if start >= len(text) or text[start] != "(":
        return None
    depth = 0
    for i in range(start, len(text)):
        if text[i] == "(":
            depth += 1
        elif text[i] == ")":
            depth -= 1
            if depth == 0:
                return i + 1
    return None


def _split_top_commas(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur:
        parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def _parse_ansi_ports(port_text: str) -> list[ModulePort]:
    ports: list[ModulePort] = []
    direction = None
    width = ""
    for entry in _split_top_commas(port_text):
        m = _DIRECTION_RE.match(entry)
        if m:
            direction = m.group(1)
            entry = entry[m.end():].strip()
            width = ""
        # drop net/type keywords, capture trailing [range] groups
        entry = re.sub(r"\b(?:wire|reg|logic|signed|unsigned|var|bit)\b", " ", entry)
        ranges = re.findall(r"\[[^\]]*\]", entry)
        entry = re.sub(r"\[[^\]]*\]", " ", entry)
        names = _NAME_RE.findall(entry)
        if not names:
            continue
        if ranges:
            width = ranges[0]
        if direction is None:
            return []  # bare identifiers: non-ANSI list
        ports.append(ModulePort(name=names[-1], direction=direction, width=width))
    return ports


def _parse_nonansi_ports(port_text: str, body: str) -> list[ModulePort]:
    order = _NAME_RE.findall(port_text)
    directions: dict[str, tuple[str, str]] = {}
    for m in _BODY_DECL_RE.finditer(body):
        direction, rest = m.group(1), m.group(2)
        ranges = re.findall(r"\[[^\]]*\]", rest)
        rest = re.sub(r"\[[^\]]*\]", " ", rest)
        rest = re.sub(r"\b(?:wire|reg|logic|signed|unsigned)\b", " ", rest)
        width = ranges[0] if ranges else ""
        for name in _NAME_RE.findall(rest):
            directions[name] = (direction, width)
    ports = []
    for name in order:
        if name in directions:
            direction, width = directions[name]
            ports.append(ModulePort(name=name, direction=direction, width=width))
    return ports


def find_modules(source: str) -> list[ModuleDecl]:
    """Every module definition in the text, in order of appearance."""
    shadow = blank_comments(source)
    modules: list[ModuleDecl] = []
    pos = 0
    while True:
        m = _MODULE_KW_RE.search(shadow, pos)
        if not m:
            break
        name = m.group(1)
        i = m.end()
        while i < len(shadow) and shadow[i].isspace():
            i += 1
        if i < len(shadow) and shadow[i] == "#":
            j = i + 1
            while j < len(shadow) and shadow[j].isspace():
                j += 1
            end = _balanced_span(shadow, j)
            if end is None:
                pos = m.end()
                continue
            i = end
            while i < len(shadow) and shadow[i].isspace():
                i += 1
        port_text = ""
        if i < len(shadow) and shadow[i] == "(":
            end = _balanced_span(shadow, i)
            if end is None:
                pos = m.end()
                continue
            port_text = shadow[i + 1:end - 1]
            i = end
        semi = shadow.find(";", i)
        if semi < 0:
            break
        header_end = semi + 1
        em = _ENDMODULE_RE.search(shadow, header_end)
        if not em:
            break
        body = shadow[header_end:em.start()]

        ports = _parse_ansi_ports(port_text) if port_text else []
        if port_text and not ports:
            ports = _parse_nonansi_ports(port_text, body)
        stripped_body = _DECL_ONLY_RE.sub(" ", body)
        is_stub = not stripped_body.strip()
        modules.append(
            ModuleDecl(
                name=name,
                ports=tuple(ports),
                header_text=source[m.start():header_end],
                span=(m.start(), em.end()),
                is_stub=is_stub,
            )
        )
        pos = em.end()
    return modules


def extract_header(module_source: str) -> str:
    """Instantiation-ready headers for every module in the text.

    Each header keeps its parameter and port declarations verbatim and is
    closed with a bare ``endmodule`` so downstream lint accepts the stub.
    Non-ANSI modules get their direction declarations pulled up into the
    stub body.
    """
    decls = find_modules(module_source)
    if not decls:
        raise ValueError("no module definition found")
    stubs = []
    for decl in decls:
        lines = [decl.header_text]
        if decl.ports and not re.search(
            r"\b(input|output|inout)\b", blank_comments(decl.header_text)
        ):
            for p in decl.ports:
                width = f" {p.width}" if p.width else ""
                lines.append(f"    {p.direction}{width} {p.name};")
        lines.append("endmodule")
        stubs.append("\n".join(lines))
    return "\n\n".join(stubs) + "\n"


def dedupe_modules(source: str) -> str:
    """Remove repeated definitions of the same module name.

    The first full (non-stub) definition of each name survives; stubs are
    dropped whenever any full definition exists anywhere in the text. If a
    name only ever appears as a stub, the first stub survives. Text outside
    module definitions is preserved.
    """
    decls = find_modules(source)
    full_seen: set[str] = set()
    has_full = {d.name for d in decls if not d.is_stub}
    stub_kept: set[str] = set()
    drop_spans: list[tuple[int, int]] = []
    for d in decls:
        if d.is_stub:
            if d.name in has_full or d.name in stub_kept:
                drop_spans.append(d.span)
            else:
                stub_kept.add(d.name)
        else:
            if d.name in full_seen:
                drop_spans.append(d.span)
            else:
                full_seen.add(d.name)

    out = []
    last = 0
    for start, end in sorted(drop_spans):
        out.append(source[last:start])
        last = end
    out.append(source[last:])
    text = "".join(out)
    return re.sub(r"\n{3,}", "\n\n", text)
