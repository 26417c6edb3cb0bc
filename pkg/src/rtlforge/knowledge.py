"""Keyword-scored retrieval over the curated corpus and reference library.

Scoring is a fixed-weight sum of per-field term overlaps:

    score = 0.4*title + 0.2*description + 0.3*keywords + 0.1*template

Title and description brackets are the fraction of stop-word-filtered query
words (length >= 3) present in the field; the keyword bracket is the
fraction of the entry's keywords found in the query; the template bracket
is 1.0 when the entry carries a template AND any other bracket is nonzero.
Every bracket lives in [0, 1], so a full match scores exactly 1.0.

Focus strategies change the candidate pool and ranking, never the base
scores: PatternFocused restricts to pattern entries; SynthesisFocused and
ArchitectureFocused boost their category by 1.5x for ranking;
ErrorFocused folds error text into the query; Comprehensive mixes the
reference library into the pool. Ranking is stable: score descending,
then entry id ascending.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from .verilog import find_modules

TITLE_WEIGHT = 0.4
DESCRIPTION_WEIGHT = 0.2
KEYWORD_WEIGHT = 0.3
TEMPLATE_WEIGHT = 0.1
FOCUS_BOOST = 1.5
MIN_RAG_K = 3
MAX_RAG_K = 20

STOP_WORDS = frozenset(
    """
    the and for with that this from are was were has have had its all can
    will would should could must when where which while then than each
    into out not you your use used using one two any very also may might
    implement implements design designed module modules should be is a an
    of to in on at by it as or if do does
    """.split()
)

REFERENCE_DOMAINS = (
    "cpu",
    "datapath",
    "protocol",
    "network",
    "peripheral",
    "dsp",
    "flow_control",
    "memory",
    "crypto",
    "system",
    "clock_reset",
    "serdes",
    "arbitration",
    "ecc",
)

_WORD_RE = re.compile(r"[a-z0-9_]+")


class KbCategory(str, Enum):
    PATTERN = "pattern"
    ARCHITECTURE = "architecture"
    OPTIMIZATION = "optimization"


class FocusStrategy(str, Enum):
    COMPREHENSIVE = "comprehensive"
    PATTERN_FOCUSED = "pattern_focused"
    ERROR_FOCUSED = "error_focused"
    SYNTHESIS_FOCUSED = "synthesis_focused"
    ARCHITECTURE_FOCUSED = "architecture_focused"


class EmptyKnowledgeBase(Exception):
    pass


@dataclass(frozen=True)
class KnowledgeEntry:
    id: str
    title: str
    description: str
    category: KbCategory
    keywords: tuple[str, ...] = ()
    template: Optional[str] = None


@dataclass(frozen=True)
class RetrievalQuery:
    spec_text: str
    focus: FocusStrategy = FocusStrategy.COMPREHENSIVE
    k: int = 8
    error_context: Optional[str] = None

    def __post_init__(self) -> None:
        if not MIN_RAG_K <= self.k <= MAX_RAG_K:
            raise ValueError(f"k must be in [{MIN_RAG_K}, {MAX_RAG_K}], got {self.k}")


@dataclass(frozen=True)
class ReferenceModule:
    id: str
    name: str
    domain: str
    source: str  # attribution: where the file came from
    synopsis: str
    ports: tuple[str, ...]
    body: str
    line_count: int


def content_words(text: str) -> frozenset[str]:
    """Lowercased alphanumeric tokens, length >= 3, stop words removed."""
    return frozenset(
        w for w in _WORD_RE.findall(text.lower()) if len(w) >= 3 and w not in STOP_WORDS
    )


def _overlap(query_words: frozenset[str], field_words: frozenset[str]) -> float:
    if not query_words:
        return 0.0
    return len(query_words & field_words) / len(query_words)


def score_entry(entry: KnowledgeEntry, query_words: frozenset[str]) -> float:
    """Relevance in [0, 1] under the fixed field weights."""
    title = _overlap(query_words, content_words(entry.title))
    description = _overlap(query_words, content_words(entry.description))
    if entry.keywords:
        matched = sum(
            1 for kw in entry.keywords if content_words(kw) <= query_words and content_words(kw)
        )
        keyword = matched / len(entry.keywords)
    else:
        keyword = 0.0
    any_overlap = title > 0 or description > 0 or keyword > 0
    template = 1.0 if entry.template and any_overlap else 0.0
    return (
        TITLE_WEIGHT * title
        + DESCRIPTION_WEIGHT * description
        + KEYWORD_WEIGHT * keyword
        + TEMPLATE_WEIGHT * template
    )


def entry_from_reference(mod: ReferenceModule) -> KnowledgeEntry:
    return KnowledgeEntry(
        id=f"ref:{mod.id}",
        title=mod.name.replace("_", " "),
        description=mod.synopsis,
        category=KbCategory.PATTERN,
        keywords=(mod.domain, *mod.ports[:6]),
        template=mod.body,
    )


def retrieve(
    entries: Sequence[KnowledgeEntry],
    query: RetrievalQuery,
    reference_modules: Sequence[ReferenceModule] = (),
) -> list[KnowledgeEntry]:
    """Top-k entries for the query under its focus strategy.

    Zero-score entries never appear, so fewer than k results is normal.
    The ranked list is a prefix-stable ordering: retrieve(k) is a prefix
    of retrieve(k') for k < k'.
    """
    if not entries:
        raise EmptyKnowledgeBase("knowledge base has no entries")

    text = query.spec_text
    if query.focus is FocusStrategy.ERROR_FOCUSED and query.error_context:
        text = f"{text}\n{query.error_context}"
    query_words = content_words(text)

    pool: list[KnowledgeEntry] = list(entries)
    if query.focus is FocusStrategy.PATTERN_FOCUSED:
        pool = [e for e in pool if e.category is KbCategory.PATTERN]
    elif query.focus is FocusStrategy.COMPREHENSIVE:
        pool.extend(entry_from_reference(m) for m in reference_modules)

    ranked = []
    for entry in pool:
        score = score_entry(entry, query_words)
        if score <= 0.0:
            continue
        weight = score
        if query.focus is FocusStrategy.SYNTHESIS_FOCUSED and entry.category is KbCategory.OPTIMIZATION:
            weight *= FOCUS_BOOST
        elif query.focus is FocusStrategy.ARCHITECTURE_FOCUSED and entry.category is KbCategory.ARCHITECTURE:
            weight *= FOCUS_BOOST
        ranked.append((weight, entry))

    ranked.sort(key=lambda pair: (-pair[0], pair[1].id))
    return [entry for _, entry in ranked[: query.k]]


def format_context(entries: Sequence[KnowledgeEntry]) -> str:
    """Prompt-ready reference section, in rank order."""
    blocks = []
    for e in entries:
        lines = [f"### {e.title} [{e.category.value}]", e.description.strip()]
        if e.template:
            lines.append("```verilog\n" + e.template.strip() + "\n```")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks)


def load_knowledge_base(path: Optional[str] = None) -> list[KnowledgeEntry]:
    if path is None:
        raw = resources.files("rtlforge.data").joinpath("knowledge_base.json").read_text()
    else:
        raw = Path(path).read_text()
    data = json.loads(raw)
    entries = []
    seen_ids = set()
    for item in data:
        entry = KnowledgeEntry(
            id=item["id"],
            title=item["title"],
            description=item["description"],
            category=KbCategory(item["category"]),
            keywords=tuple(item.get("keywords", ())),
            template=item.get("template"),
        )
        if entry.id in seen_ids:
            raise ValueError(f"duplicate knowledge entry id {entry.id!r}")
        seen_ids.add(entry.id)
        entries.append(entry)
    return entries


@dataclass(frozen=True)
class IndexResult:
    modules: tuple[ReferenceModule, ...]
    rejected: tuple[tuple[str, str], ...]  # (relative path, reason)


def _leading_comment(source: str) -> str:
    lines = []
    for ln in source.splitlines():
        s = ln.strip()
        if s.startswith("//"):
            lines.append(s.lstrip("/ ").strip())
        elif s.startswith("/*") or s.startswith("*"):
            lines.append(s.strip("/* ").strip())
        elif not s:
            continue
        else:
            break
    return " ".join(x for x in lines if x)


def index_reference_library(
    source_dir: str | Path,
    linter: Optional[Callable[[str], bool]] = None,
    max_lines: int = 2000,
) -> IndexResult:
    """Build the reference library from a directory of .v/.sv files.

    Domain attribution comes from an ``attribution.json`` manifest
    ({relative_path: {"source": ..., "domain": ...}}) or, failing that,
    from a parent directory named after a known domain. Files that are
    oversized, unparseable, unattributed, or fail the supplied linter are
    rejected with a reason.
    """
    source_dir = Path(source_dir)
    manifest: dict[str, dict] = {}
    manifest_path = source_dir / "attribution.json"
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text())

    modules: list[ReferenceModule] = []
    rejected: list[tuple[str, str]] = []
    files = sorted(
        p for p in source_dir.rglob("*") if p.suffix in (".v", ".sv") and p.is_file()
    )
    for path in files:
        rel = path.relative_to(source_dir).as_posix()
        text = path.read_text(errors="replace")
        line_count = text.count("\n") + 1
        if line_count > max_lines:
            rejected.append((rel, "size"))
            continue
        decls = find_modules(text)
        if not decls:
            rejected.append((rel, "parse"))
            continue
        meta = manifest.get(rel, {})
        domain = meta.get("domain")
        if domain is None:
            for part in path.relative_to(source_dir).parts[:-1]:
                if part in REFERENCE_DOMAINS:
                    domain = part
                    break
        if domain not in REFERENCE_DOMAINS:
            rejected.append((rel, "attribution"))
            continue
        if linter is not None and not linter(text):
            rejected.append((rel, "lint"))
            continue
        top = decls[0]
        synopsis = _leading_comment(text) or f"{top.name} reference module"
        modules.append(
            ReferenceModule(
                id=rel,
                name=top.name,
                domain=domain,
                source=meta.get("source", "local"),
                synopsis=synopsis,
                ports=tuple(p.name for p in top.ports),
                body=text,
                line_count=line_count,
            )
        )
    return IndexResult(modules=tuple(modules), rejected=tuple(rejected))


def save_library(modules: Iterable[ReferenceModule], path: str | Path) -> None:
    with open(path, "w") as fh:
        for m in modules:
            fh.write(json.dumps({
                "id": m.id,
                "name": m.name,
                "domain": m.domain,
                "source": m.source,
                "synopsis": m.synopsis,
                "ports": list(m.ports),
                "body": m.body,
                "line_count": m.line_count,
            }) + "\n")


def load_library(path: str | Path) -> list[ReferenceModule]:
    modules = []
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            d = json.loads(line)
            modules.append(ReferenceModule(
                id=d["id"],
                name=d["name"],
                domain=d["domain"],
                source=d["source"],
                synopsis=d["synopsis"],
                ports=tuple(d["ports"]),
                body=d["body"],
                line_count=d["line_count"],
            ))
    return modules
