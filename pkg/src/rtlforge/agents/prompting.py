"""Prompt assembly and the generation round trip.

Every completion request is built from scratch out of the current spec,
retrieval context, and validation feedback. Nothing from previous turns is
carried over: agents work from an independent context each time, because
mixing earlier conversation state into a request degrades both RTL and
testbench output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ..specs import Spec
from ..validation import CategorizedError
from .backends import DEFAULT_MAX_TOKENS, CompletionRequest, CompletionResult
from .extraction import ExtractionFailed, extract_code
from .profiles import AgentProfile

TASK_MARKER = "### Task"
INTERFACE_MARKER = "### Interface"
CONTEXT_MARKER = "### Context modules"
RAG_MARKER = "### Retrieved patterns"
FEEDBACK_MARKER = "### Validation feedback"


@dataclass(frozen=True)
class GenerationResult:
    """One agent turn: extracted source plus accounting."""

    source: str
    raw_response: str
    tokens_in: int
    tokens_out: int
    agent: str
    extraction_failed: bool = False

    def __post_init__(self) -> None:
        if not self.extraction_failed and not self.source.strip():
            raise ValueError("source empty but extraction_failed not set")


def format_error_feedback(errors: Sequence[CategorizedError]) -> str:
    """Render categorized errors the way the debug prompt expects them.

    Each block names the category and message, points at file:line when
    known, and indents the captured source context so the model can see the
    exact neighborhood the tool complained about.
    """
    blocks: list[str] = []
    for err in errors:
        location = ""
        if err.file:
            location = f" ({err.file}:{err.line})" if err.line else f" ({err.file})"
        elif err.line:
            location = f" (line {err.line})"
        lines = [f"[{err.category.value}] {err.message}{location}"]
        if err.context:
            lines.extend(f"    {ctx}" for ctx in err.context.splitlines())
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks)


def build_prompt(
    profile: AgentProfile,
    spec: Spec,
    rag_context: str = "",
    errors: Sequence[CategorizedError] = (),
    temperature: Optional[float] = None,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> CompletionRequest:
    """Assemble a self-contained request for one generation step.

    The system prompt is the profile's template verbatim. The user prompt
    carries only the sections that exist, each under a fixed marker, in a
    fixed order, so identical inputs produce a byte-identical request.
    """
    sections: list[str] = [f"{TASK_MARKER}\n{spec.name}: {spec.description}"]
    if spec.interface_header:
        sections.append(f"{INTERFACE_MARKER}\n{spec.interface_header}")
    if spec.context_rtl:
        sections.append(f"{CONTEXT_MARKER}\n{spec.context_rtl}")
    if rag_context:
        sections.append(f"{RAG_MARKER}\n{rag_context}")
    if errors:
        sections.append(f"{FEEDBACK_MARKER}\n{format_error_feedback(errors)}")
    return CompletionRequest(
        system_prompt=profile.system_prompt_template,
        user_prompt="\n\n".join(sections),
        temperature=profile.default_temperature if temperature is None else temperature,
        max_tokens=max_tokens,
    )


def run_generation(
    backend,
    profile: AgentProfile,
    spec: Spec,
    rag_context: str = "",
    errors: Iterable[CategorizedError] = (),
    temperature: Optional[float] = None,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> GenerationResult:
    """Build the prompt, call the backend, extract code from the reply."""
    request = build_prompt(
        profile,
        spec,
        rag_context=rag_context,
        errors=tuple(errors),
        temperature=temperature,
        max_tokens=max_tokens,
    )
    result: CompletionResult = backend.complete(request)
    try:
        source = extract_code(result.text)
        failed = False
    except ExtractionFailed:
        source = ""
        failed = True
    return GenerationResult(
        source=source,
        raw_response=result.text,
        tokens_in=result.input_tokens,
        tokens_out=result.output_tokens,
        agent=profile.name.value,
        extraction_failed=failed,
    )
