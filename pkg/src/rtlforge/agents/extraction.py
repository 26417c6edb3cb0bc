"""Pull Verilog source out of a model response.

Responses mix prose, markdown fences, and code. Extraction prefers fenced
blocks (the format every prompt requests), falls back to parsed module spans,
and finally to the raw first-module/last-endmodule span. Internal formatting
of whatever is extracted is preserved byte for byte.
"""

from __future__ import annotations

import re

from ..verilog import find_modules

_FENCE_RE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)
_MODULE_WORD_RE = re.compile(r"\bmodule\b")
_ENDMODULE_WORD_RE = re.compile(r"\bendmodule\b")


class ExtractionFailed(Exception):
    """Response contains no recognizable module definition."""


def extract_code(response_text: str) -> str:
    """Return the Verilog portion of a model response.

    Fenced code blocks containing a module definition win; multiple such
    blocks are concatenated in order of appearance (multi-module designs are
    often split across fences). Without fences, the span covering all parsed
    modules is used, then a crude keyword span as a last resort.
    """
    fenced = [
        block.strip("\n")
        for block in _FENCE_RE.findall(response_text)
        if _MODULE_WORD_RE.search(block) and _ENDMODULE_WORD_RE.search(block)
    ]
    if fenced:
        return "\n\n".join(fenced)

    modules = find_modules(response_text)
    if modules:
        start = min(decl.span[0] for decl in modules)
        end = max(decl.span[1] for decl in modules)
        return response_text[start:end]

    # Malformed but plausibly salvageable output: hand the simulator the
    # widest keyword span and let lint produce a real diagnostic.
    first = _MODULE_WORD_RE.search(response_text)
    last = None
    for last in _ENDMODULE_WORD_RE.finditer(response_text):
        pass
    if first and last and first.start() < last.end():
        return response_text[first.start() : last.end()]

    raise ExtractionFailed("no module...endmodule span in response")
