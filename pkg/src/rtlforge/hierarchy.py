"""Hierarchical decomposition: plan complex designs, build them leaf-first.

A complex spec is decomposed (by the backend, at low temperature) into 4 to 8
sub-module specs with interfaces and dependencies. Sub-modules are generated
in dependency order, each prompt carrying the headers of everything already
built, each result linted individually; the deduplicated combination is
linted as a whole at the end. Failed sub-modules are reported, not fatal:
later modules link against the planned interface stub instead.
"""

from __future__ import annotations

import heapq
import json
import re
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .agents import CompletionRequest, load_profiles, run_generation
from .agents.profiles import AgentName, AgentProfile
from .specs import Spec
from .validation import CategorizedError, ErrorCategory, lint
from .verilog import dedupe_modules, extract_header

_IDENT_RE = re.compile(r"^[A-Za-z_]\w*$")
_DIRECTIONS = ("input", "output", "inout")

DECOMPOSE_TEMPERATURE = 0.2

Emit = Optional[Callable[[str, str], None]]


class DecompositionMalformed(Exception):
    """Backend's plan JSON is unusable even after the retry."""


class CycleError(DecompositionMalformed):
    """Dependency graph contains a cycle; message names it."""


@dataclass(frozen=True)
class PortDecl:
    name: str
    dir: str
    width: str = ""  # "[7:0]" style; empty for scalars

    def __post_init__(self) -> None:
        if not _IDENT_RE.match(self.name):
            raise DecompositionMalformed(f"bad port name {self.name!r}")
        if self.dir not in _DIRECTIONS:
            raise DecompositionMalformed(f"bad port direction {self.dir!r}")

    @classmethod
    def from_json(cls, data: dict) -> "PortDecl":
        width = data.get("width", "")
        if isinstance(width, int):
            width = f"[{width - 1}:0]" if width > 1 else ""
        return cls(
            name=str(data.get("name", "")),
            dir=str(data.get("dir", "")),
            width=str(width).strip(),
        )

    def to_json(self) -> dict:
        return {"name": self.name, "dir": self.dir, "width": self.width}


@dataclass(frozen=True)
class SubmoduleSpec:
    name: str
    description: str
    interface: tuple[PortDecl, ...]
    dependencies: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not _IDENT_RE.match(self.name):
            raise DecompositionMalformed(f"bad module name {self.name!r}")
        if not self.description.strip():
            raise DecompositionMalformed(f"module {self.name}: empty description")

    def header(self) -> str:
        """ANSI-style declaration closed as a stub, for linking and prompts."""
        if self.interface:
            ports = ",\n".join(
                f"    {p.dir} {p.width + ' ' if p.width else ''}{p.name}"
                for p in self.interface
            )
            return f"module {self.name} (\n{ports}\n);\nendmodule\n"
        return f"module {self.name};\nendmodule\n"


@dataclass(frozen=True)
class DecompositionPlan:
    submodules: tuple[SubmoduleSpec, ...]
    top_name: str

    def __post_init__(self) -> None:
        names = [s.name for s in self.submodules]
        if not 4 <= len(names) <= 8:
            raise DecompositionMalformed(
                f"expected 4-8 submodules, got {len(names)}"
            )
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise DecompositionMalformed(f"duplicate module names: {dupes}")
        known = set(names)
        for sub in self.submodules:
            for dep in sub.dependencies:
                if dep not in known:
                    raise DecompositionMalformed(
                        f"module {sub.name} depends on unknown {dep!r}"
                    )
                if dep == sub.name:
                    raise CycleError(f"dependency cycle: {sub.name} -> {sub.name}")
        if self.top_name not in known:
            raise DecompositionMalformed(
                f"top module {self.top_name!r} not in the plan"
            )
        _assert_acyclic(self.submodules)
        if names[-1] != self.top_name and not self._top_reaches_all():
            raise DecompositionMalformed(
                f"top module {self.top_name!r} neither depends on all "
                "submodules nor is listed last"
            )

    def _top_reaches_all(self) -> bool:
        deps = {s.name: set(s.dependencies) for s in self.submodules}
        seen: set[str] = set()
        frontier = [self.top_name]
        while frontier:
            node = frontier.pop()
            if node in seen:
                continue
            seen.add(node)
            frontier.extend(deps[node])
        return seen == set(deps)

    def to_json(self) -> dict:
        return {
            "submodules": [
                {
                    "name": s.name,
                    "description": s.description,
                    "interface": [p.to_json() for p in s.interface],
                    "dependencies": list(s.dependencies),
                }
                for s in self.submodules
            ],
            "top": self.top_name,
        }


def _assert_acyclic(submodules: Sequence[SubmoduleSpec]) -> None:
    deps = {s.name: list(s.dependencies) for s in submodules}
    state: dict[str, int] = {}  # 0 visiting, 1 done

    def visit(node: str, path: list[str]) -> None:
        mark = state.get(node)
        if mark == 1:
            return
        if mark == 0:
            cycle = path[path.index(node) :] + [node]
            raise CycleError("dependency cycle: " + " -> ".join(cycle))
        state[node] = 0
        for dep in deps[node]:
            visit(dep, path + [node])
        state[node] = 1

    for name in deps:
        visit(name, [])


def plan_from_json(data: dict) -> DecompositionPlan:
    """Validate the documented plan schema into a DecompositionPlan."""
    if not isinstance(data, dict):
        raise DecompositionMalformed("plan must be a JSON object")
    raw_subs = data.get("submodules")
    if not isinstance(raw_subs, list):
        raise DecompositionMalformed('plan lacks a "submodules" array')
    subs = []
    for entry in raw_subs:
        if not isinstance(entry, dict):
            raise DecompositionMalformed("submodule entries must be objects")
        interface = entry.get("interface", [])
        if not isinstance(interface, list):
            raise DecompositionMalformed(
                f"module {entry.get('name')!r}: interface must be an array"
            )
        deps = list(dict.fromkeys(str(d) for d in entry.get("dependencies", [])))
        subs.append(
            SubmoduleSpec(
                name=str(entry.get("name", "")),
                description=str(entry.get("description", "")),
                interface=tuple(PortDecl.from_json(p) for p in interface),
                dependencies=tuple(deps),
            )
        )
    top = data.get("top")
    if not isinstance(top, str):
        raise DecompositionMalformed('plan lacks a "top" module name')
    return DecompositionPlan(submodules=tuple(subs), top_name=top)


def topo_order(plan: DecompositionPlan) -> list[SubmoduleSpec]:
    """Leaves first, dependents after, name-ascending among ready modules."""
    by_name = {s.name: s for s in plan.submodules}
    remaining = {s.name: set(s.dependencies) for s in plan.submodules}
    dependents: dict[str, list[str]] = {name: [] for name in by_name}
    for sub in plan.submodules:
        for dep in set(sub.dependencies):
            dependents[dep].append(sub.name)

    ready = [name for name, deps in remaining.items() if not deps]
    heapq.heapify(ready)
    order: list[SubmoduleSpec] = []
    while ready:
        name = heapq.heappop(ready)
        order.append(by_name[name])
        for dependent in dependents[name]:
            remaining[dependent].discard(name)
            if not remaining[dependent]:
                heapq.heappush(ready, dependent)
    if len(order) != len(by_name):
        _assert_acyclic(plan.submodules)  # raises CycleError naming it
        raise CycleError("dependency cycle")  # pragma: no cover
    return order


_DECOMPOSE_SYSTEM = """\
You are a hardware architect. Decompose the requested design into between 4 \
and 8 sub-modules with clean interfaces.

Respond with a single JSON object and nothing else, in exactly this shape:
{
  "submodules": [
    {
      "name": "identifier",
      "description": "one or two sentences of behavior",
      "interface": [{"name": "port", "dir": "input|output|inout", "width": "[7:0] or empty"}],
      "dependencies": ["names", "of", "instantiated", "submodules"]
    }
  ],
  "top": "name_of_top_module"
}

Rules:
- Between 4 and 8 submodules, the top module included.
- Dependencies may only name submodules from this plan, and must be acyclic.
- The top module instantiates the others (directly or transitively).
- Every port needs a direction; width is a Verilog range like [7:0], empty for 1-bit.
"""


def _extract_json(text: str) -> dict:
    for block in re.findall(r"```[^\n`]*\n(.*?)```", text, re.DOTALL):
        if "{" in block:
            try:
                return json.loads(block)
            except json.JSONDecodeError:
                continue
    start, end = text.find("{"), text.rfind("}")
    if start != -1 and end > start:
        try:
            return json.loads(text[start : end + 1])
        except json.JSONDecodeError as exc:
            raise DecompositionMalformed(f"plan JSON does not parse: {exc}") from exc
    raise DecompositionMalformed("no JSON object in decomposition response")


def decompose(
    spec: Spec,
    backend,
    temperature: float = DECOMPOSE_TEMPERATURE,
    max_tokens: int = 4096,
    emit: Emit = None,
) -> DecompositionPlan:
    """Ask the backend for a structured plan; one re-prompt on bad output."""
    user = f"### Task\n{spec.name}: {spec.description}"
    if spec.interface_header:
        user += f"\n\n### Top-level interface\n{spec.interface_header}"
    request = CompletionRequest(
        system_prompt=_DECOMPOSE_SYSTEM,
        user_prompt=user,
        temperature=temperature,
        max_tokens=max_tokens,
    )
    try:
        plan = plan_from_json(_extract_json(backend.complete(request).text))
    except DecompositionMalformed as first_error:
        if emit:
            emit("Error", f"decomposition rejected: {first_error}")
        retry = CompletionRequest(
            system_prompt=request.system_prompt,
            user_prompt=(
                f"{request.user_prompt}\n\n### Previous attempt rejected\n"
                f"{first_error}\nRespond again with corrected JSON only."
            ),
            temperature=temperature,
            max_tokens=max_tokens,
        )
        plan = plan_from_json(_extract_json(backend.complete(retry).text))
    if emit:
        emit(
            "Analysis",
            f"decomposed into {len(plan.submodules)} submodules, "
            f"top {plan.top_name}",
        )
    return plan


@dataclass(frozen=True)
class ModuleOutcome:
    name: str
    source: str
    lint_passed: bool
    iterations_used: int
    loc: int
    errors: tuple[CategorizedError, ...] = ()


@dataclass(frozen=True)
class HierarchicalResult:
    plan: DecompositionPlan
    order: tuple[str, ...]
    modules: tuple[ModuleOutcome, ...]
    combined_source: str
    combined_lint_passed: bool
    combined_errors: tuple[CategorizedError, ...]
    backend_calls: int
    tokens_in: int
    tokens_out: int

    @property
    def modules_passed(self) -> int:
        return sum(1 for m in self.modules if m.lint_passed)


class _CountingBackend:
    """Pass-through wrapper summing token usage across calls."""

    def __init__(self, inner):
        self.inner = inner
        self.calls = 0
        self.tokens_in = 0
        self.tokens_out = 0

    def complete(self, request):
        result = self.inner.complete(request)
        self.calls += 1
        self.tokens_in += result.input_tokens
        self.tokens_out += result.output_tokens
        return result


def _loc(source: str) -> int:
    return sum(1 for line in source.splitlines() if line.strip())


def generate_hierarchical(
    spec: Spec,
    backend,
    runner,
    plan: Optional[DecompositionPlan] = None,
    profile: Optional[AgentProfile] = None,
    max_iterations: int = 5,
    emit: Emit = None,
) -> HierarchicalResult:
    """Build every sub-module in dependency order and lint the combination.

    Each sub-module gets up to max_iterations generate+lint rounds with lint
    feedback threaded back into the prompt (SystemVerilog accepted at this
    level). A sub-module that never passes is recorded as failed and its
    planned interface stub stands in for linking, so the rest of the plan
    still builds.
    """
    counting = _CountingBackend(backend)
    if plan is None:
        plan = decompose(spec, counting, emit=emit)
    if profile is None:
        profile = load_profiles()[AgentName.GENIUS]

    order = topo_order(plan)
    headers: list[str] = []
    outcomes: list[ModuleOutcome] = []

    for sub in order:
        sub_spec = Spec(
            name=sub.name,
            description=sub.description,
            interface_header=sub.header(),
            context_rtl="\n\n".join(headers) if headers else None,
        )
        source = ""
        errors: tuple[CategorizedError, ...] = ()
        passed = False
        iterations = 0
        for iterations in range(1, max_iterations + 1):
            gen = run_generation(counting, profile, sub_spec, errors=errors)
            if gen.extraction_failed:
                errors = (
                    CategorizedError(
                        category=ErrorCategory.OTHER,
                        message="response contained no Verilog module",
                    ),
                )
                if emit:
                    emit("Error", f"{sub.name}: no code in response")
                continue
            source = gen.source
            lint_text = source
            if headers:
                lint_text = dedupe_modules(
                    source.rstrip() + "\n\n" + "\n\n".join(headers)
                )
            result = lint(lint_text, runner, mode="systemverilog")
            errors = result.errors
            if emit:
                emit(
                    "Validation",
                    f"{sub.name}: lint {'pass' if result.passed else 'fail'} "
                    f"(iteration {iterations})",
                )
            if result.passed:
                passed = True
                break
        outcomes.append(
            ModuleOutcome(
                name=sub.name,
                source=source,
                lint_passed=passed,
                iterations_used=iterations,
                loc=_loc(source),
                errors=() if passed else errors,
            )
        )
        if passed:
            headers.append(extract_header(source))
        else:
            # later modules still need the interface to link against
            headers.append(sub.header())
            if emit:
                emit("Error", f"{sub.name}: failed lint after {iterations} iterations")

    combined = dedupe_modules(
        "\n\n".join(o.source for o in outcomes if o.source).strip() + "\n"
    )
    combined_result = lint(combined, runner, mode="systemverilog")
    if emit:
        emit(
            "Progress",
            f"combined lint {'pass' if combined_result.passed else 'fail'}: "
            f"{sum(o.lint_passed for o in outcomes)}/{len(outcomes)} modules, "
            f"{_loc(combined)} LOC",
        )
    return HierarchicalResult(
        plan=plan,
        order=tuple(s.name for s in order),
        modules=tuple(outcomes),
        combined_source=combined,
        combined_lint_passed=combined_result.passed,
        combined_errors=combined_result.errors,
        backend_calls=counting.calls,
        tokens_in=counting.tokens_in,
        tokens_out=counting.tokens_out,
    )
