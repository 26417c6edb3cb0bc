"""Hardware specification model and three-tier routing.

A Spec is a natural-language description of a module plus optional context.
Routing decides which generation strategy handles it:

* Symbolic: the description contains a K-map or truth table; solved
  deterministically with zero LLM calls.
* WaveformSpecialist: waveform reverse-engineering language; handled by the
  dedicated waveform agent.
* General: everything else, driven by the learned orchestrator.

A spec naming three or more distinct architectural components is flagged
hierarchical (unless it routed Symbolic) and goes through decomposition.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional, Sequence

SYMBOLIC_TRIGGERS = ("karnaugh map", "k-map", "truth table")
WAVEFORM_TRIGGERS = ("waveform", "timing diagram", "determine what the circuit does")
HIERARCHICAL_COMPONENT_THRESHOLD = 3


class Tier(str, Enum):
    SYMBOLIC = "symbolic"
    WAVEFORM_SPECIALIST = "waveform_specialist"
    GENERAL = "general"


class DesignCategory(str, Enum):
    COMBINATIONAL = "combinational"
    SEQUENTIAL = "sequential"
    FSM = "fsm"
    MEMORY = "memory"
    BUS = "bus"
    PROCESSOR = "processor"
    UNKNOWN = "unknown"


class SpecError(Exception):
    pass


@dataclass(frozen=True)
class Spec:
    """One generation problem. ``interface_header`` is kept verbatim when set."""

    name: str
    description: str
    category: Optional[DesignCategory] = None
    context_rtl: Optional[str] = None
    interface_header: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.name.strip():
            raise SpecError("spec name must be non-empty")
        if not self.description.strip():
            raise SpecError(f"spec {self.name!r} has an empty description")


@dataclass(frozen=True)
class RoutingDecision:
    tier: Tier
    hierarchical: bool
    component_keywords: frozenset[str]
    matched_triggers: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.tier is Tier.SYMBOLIC and self.hierarchical:
            raise SpecError("symbolic routing is never hierarchical")


def _phrase_pattern(phrase: str) -> re.Pattern:
    # whole-word boundaries at both ends; interior whitespace matches any
    # run; the final word tolerates a plural 's'
    parts = [re.escape(p) for p in phrase.split()]
    parts[-1] += "s?"
    return re.compile(r"\b" + r"\s+".join(parts) + r"\b", re.IGNORECASE)


_TRIGGER_PATTERNS = {
    phrase: _phrase_pattern(phrase)
    for phrase in (*SYMBOLIC_TRIGGERS, *WAVEFORM_TRIGGERS)
}


def phrase_found(text: str, phrase: str) -> bool:
    pattern = _TRIGGER_PATTERNS.get(phrase) or _phrase_pattern(phrase)
    return pattern.search(text) is not None


def load_component_dictionary(path: Optional[str] = None) -> dict[str, list[str]]:
    """Canonical component name -> alias phrases. Ships with a default set."""
    if path is None:
        raw = resources.files("rtlforge.data").joinpath("component_keywords.json").read_text()
    else:
        raw = Path(path).read_text()
    data = json.loads(raw)
    if not isinstance(data, dict) or not all(
        isinstance(k, str) and isinstance(v, list) for k, v in data.items()
    ):
        raise SpecError("component dictionary must map names to alias lists")
    return data


_DEFAULT_DICTIONARY: Optional[dict[str, list[str]]] = None


def _default_dictionary() -> dict[str, list[str]]:
    global _DEFAULT_DICTIONARY
    if _DEFAULT_DICTIONARY is None:
        _DEFAULT_DICTIONARY = load_component_dictionary()
    return _DEFAULT_DICTIONARY


def find_components(
    text: str, dictionary: Optional[Mapping[str, Sequence[str]]] = None
) -> frozenset[str]:
    """Canonical names of components mentioned in the text.

    Single-word aliases match on word boundaries; multi-word aliases match
    as whole phrases. Repeated mentions collapse to one canonical name.
    """
    dictionary = dictionary if dictionary is not None else _default_dictionary()
    found = set()
    for canonical, aliases in dictionary.items():
        for alias in aliases:
            if phrase_found(text, alias):
                found.add(canonical)
                break
    return frozenset(found)


def route(
    spec: Spec, dictionary: Optional[Mapping[str, Sequence[str]]] = None
) -> RoutingDecision:
    """Tier plus hierarchical flag. Symbolic beats Waveform beats General."""
    text = spec.description
    symbolic = tuple(p for p in SYMBOLIC_TRIGGERS if phrase_found(text, p))
    waveform = tuple(p for p in WAVEFORM_TRIGGERS if phrase_found(text, p))
    components = find_components(text, dictionary)

    if symbolic:
        tier, matched = Tier.SYMBOLIC, symbolic
    elif waveform:
        tier, matched = Tier.WAVEFORM_SPECIALIST, waveform
    else:
        tier, matched = Tier.GENERAL, ()

    hierarchical = (
        tier is not Tier.SYMBOLIC
        and len(components) >= HIERARCHICAL_COMPONENT_THRESHOLD
    )
    return RoutingDecision(
        tier=tier,
        hierarchical=hierarchical,
        component_keywords=components,
        matched_triggers=matched,
    )


_CATEGORY_KEYWORDS: tuple[tuple[DesignCategory, tuple[str, ...]], ...] = (
    (DesignCategory.PROCESSOR, ("cpu", "processor", "risc-v", "riscv", "pipeline", "datapath")),
    (DesignCategory.BUS, ("bus", "axi", "ahb", "apb", "wishbone", "interconnect", "arbiter")),
    (DesignCategory.MEMORY, ("memory", "ram", "rom", "sram", "fifo", "cache", "register file")),
    (DesignCategory.FSM, ("state machine", "fsm", "moore", "mealy", "sequence detector")),
    (
        DesignCategory.SEQUENTIAL,
        ("counter", "shift register", "flip-flop", "flip flop", "register", "clock", "edge"),
    ),
    (
        DesignCategory.COMBINATIONAL,
        ("combinational", "mux", "multiplexer", "adder", "decoder", "gate", "logic function"),
    ),
)


def infer_category(spec: Spec) -> DesignCategory:
    """Explicit category wins; otherwise first keyword band that matches."""
    if spec.category is not None:
        return spec.category
    for category, keywords in _CATEGORY_KEYWORDS:
        if any(phrase_found(spec.description, k) for k in keywords):
            return category
    return DesignCategory.UNKNOWN


def spec_from_json(data: dict) -> Spec:
    if "name" not in data or "description" not in data:
        raise SpecError("spec JSON needs at least 'name' and 'description'")
    unknown = set(data) - {"name", "description", "category", "context_rtl", "interface_header"}
    if unknown:
        raise SpecError(f"unknown spec fields: {sorted(unknown)}")
    category = data.get("category")
    if category is not None:
        try:
            category = DesignCategory(category)
        except ValueError:
            raise SpecError(f"unknown design category {category!r}") from None
    return Spec(
        name=data["name"],
        description=data["description"],
        category=category,
        context_rtl=data.get("context_rtl"),
        interface_header=data.get("interface_header"),
    )


def spec_from_text(text: str) -> Spec:
    """Plain-text form: first non-blank line is the name, the rest describes."""
    lines = text.splitlines()
    idx = next((i for i, ln in enumerate(lines) if ln.strip()), None)
    if idx is None:
        raise SpecError("empty spec text")
    name = lines[idx].strip()
    description = "\n".join(lines[idx + 1:]).strip()
    if not description:
        raise SpecError("plain-text spec needs a description after the name line")
    return Spec(name=name, description=description)


def load_spec(path: str | Path) -> Spec:
    path = Path(path)
    raw = path.read_text()
    if path.suffix == ".json" or raw.lstrip().startswith("{"):
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}: invalid JSON: {exc}") from exc
        return spec_from_json(data)
    return spec_from_text(raw)
