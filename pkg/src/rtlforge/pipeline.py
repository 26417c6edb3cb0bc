"""Top-level generation pipeline.

Wires routing, retrieval, agent selection, generation, and validation into
one run per spec: symbolic specs go to the table solver (zero backend calls),
multi-component specs go through hierarchical decomposition, and everything
else enters the iterative refinement loop under a hard iteration cap.

Every run produces a RunRecord (JSON-serializable, reproducible modulo wall
times) and a thought trace; run_benchmark fans runs out over a directory of
problems and aggregates pass@1.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .agents import (
    AgentName,
    ExtractionFailed,
    HttpBackend,
    MockBackend,
    PortMismatch,
    ScriptExhausted,
    TestbenchNonCompliant,
    TransportError,
    adapt_testbench,
    format_error_feedback,
    generate_testbench,
    load_profiles,
    run_generation,
)
from .guidance import enrich_spec, load_registry
from .hierarchy import generate_hierarchical
from .kmap import SolveError, solve_text
from .knowledge import (
    EmptyKnowledgeBase,
    RetrievalQuery,
    format_context,
    load_knowledge_base,
    load_library,
    retrieve,
)
from .orchestrator import (
    PolicyNetwork,
    Transition,
    TransitionBuffer,
    WorldModel,
    action_log_prob,
    compute_reward,
    encode_state,
    heuristic_policy,
    load_rules,
    map_action,
    mpc_plan,
    sample_action,
)
from .specs import Spec, Tier, infer_category, load_spec, route
from .thoughts import ThoughtCategory, ThoughtStream
from .validation import (
    CategorizedError,
    ErrorCategory,
    FixtureRunner,
    SubprocessRunner,
    ValidationReport,
    ValidationStage,
    run_validation,
)
from .verilog import extract_header, find_modules


class PipelineError(Exception):
    """Configuration problem that makes a run impossible; raised before work starts."""


class Planner(str, Enum):
    HEURISTIC = "heuristic"
    PPO = "ppo"
    MPC = "mpc"


class RunOutcome(str, Enum):
    SOLVED = "solved"
    EXHAUSTED = "exhausted"
    ERROR = "error"


_VALIDATION_MODES = ("auto", "subprocess", "fixture")


@dataclass
class PipelineConfig:
    """Run-time knobs for generate_module and run_benchmark.

    ``validation`` picks the tool runner: "subprocess" shells out to the real
    EDA tools, "fixture" uses the canned always-passing runner, and "auto"
    uses subprocess when a simulator is on PATH and the fixture otherwise.
    """

    max_iterations: int = 5
    planner: Planner = Planner.HEURISTIC
    backend_url: Optional[str] = None
    backend_key: Optional[str] = None
    model_map: Optional[dict] = None
    tool_paths: Optional[dict] = None
    kb_path: Optional[str] = None
    library_path: Optional[str] = None
    registry_path: Optional[str] = None
    rules_path: Optional[str] = None
    policy_checkpoint: Optional[str] = None
    world_model_checkpoint: Optional[str] = None
    token_budget: Optional[int] = None
    wall_clock_s: Optional[float] = None
    run_synth: bool = True
    make_testbench: bool = True
    validation: str = "auto"
    price_table: Optional[dict] = None
    seed: int = 0
    trace_path: Optional[str] = None
    transitions_path: Optional[str] = None

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise PipelineError(f"max_iterations must be >= 1, got {self.max_iterations}")
        self.planner = Planner(self.planner)
        if self.validation not in _VALIDATION_MODES:
            raise PipelineError(
                f"validation must be one of {_VALIDATION_MODES}, got {self.validation!r}"
            )
        if self.planner is Planner.MPC and not self.world_model_checkpoint:
            raise PipelineError("mpc planner requires world_model_checkpoint")

    @classmethod
    def from_json(cls, data: dict) -> "PipelineConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise PipelineError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> dict:
        out = dataclasses.asdict(self)
        out["planner"] = self.planner.value
        return out


@dataclass(frozen=True)
class IterationRecord:
    """One refinement iteration: the chosen action, its cost, and the verdict."""

    index: int
    agent: str
    planner_agent: int
    focus: str
    temperature: float
    max_tokens: int
    rag_k: int
    retries_allowed: int
    attempts: int
    model_id: str
    tokens_in: int
    tokens_out: int
    extraction_failed: bool
    backend_error: Optional[str]
    reward: dict
    report: dict

    def to_json(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class RunRecord:
    spec_name: str
    tier: str
    hierarchical: bool
    solve_kind: str
    outcome: RunOutcome
    required_stage: str
    final_stage: Optional[str]
    iterations_used: int
    backend_calls: int
    testbench_origin: Optional[str]
    seed: int
    token_usage: tuple = ()
    iterations: tuple = ()
    hierarchical_summary: Optional[dict] = None
    final_source: str = ""
    error: Optional[str] = None
    wall_time_s: float = 0.0

    @property
    def solved(self) -> bool:
        return self.outcome is RunOutcome.SOLVED

    @property
    def tokens_in(self) -> int:
        return sum(t[1] for t in self.token_usage)

    @property
    def tokens_out(self) -> int:
        return sum(t[2] for t in self.token_usage)

    def to_json(self, include_timing: bool = True) -> dict:
        out = {
            "spec_name": self.spec_name,
            "tier": self.tier,
            "hierarchical": self.hierarchical,
            "solve_kind": self.solve_kind,
            "outcome": self.outcome.value,
            "required_stage": self.required_stage,
            "final_stage": self.final_stage,
            "iterations_used": self.iterations_used,
            "backend_calls": self.backend_calls,
            "testbench_origin": self.testbench_origin,
            "seed": self.seed,
            "tokens_in": self.tokens_in,
            "tokens_out": self.tokens_out,
            "token_usage": [list(t) for t in self.token_usage],
            "iterations": [it.to_json() for it in self.iterations],
            "hierarchical_summary": self.hierarchical_summary,
            "final_source": self.final_source,
            "error": self.error,
            "wall_time_s": self.wall_time_s,
        }
        if not include_timing:
            out = _without_timing(out)
        return out


def _without_timing(obj):
    """Strip wall-clock fields recursively so records can be compared across runs."""
    if isinstance(obj, dict):
        return {
            k: _without_timing(v)
            for k, v in obj.items()
            if k not in ("wall_time_s", "timestamp")
        }
    if isinstance(obj, list):
        return [_without_timing(v) for v in obj]
    return obj


def estimate_cost(record: RunRecord, price_table: dict) -> float:
    """Dollar cost of a run from per-model token prices (input, output) per token."""
    total = 0.0
    for model_id, tokens_in, tokens_out in record.token_usage:
        if model_id not in price_table:
            raise ValueError(f"unpriced model: {model_id}")
        price_in, price_out = price_table[model_id]
        total += tokens_in * price_in + tokens_out * price_out
    return total


class _BackendPool:
    """Lazily builds one HTTP backend per model id; a shared backend overrides."""

    def __init__(self, config: PipelineConfig, shared=None):
        self._config = config
        self._shared = shared
        self._backends: dict = {}

    @property
    def configured(self) -> bool:
        return self._shared is not None or self._config.backend_url is not None

    def for_model(self, model_id: str):
        if self._shared is not None:
            return self._shared
        if self._config.backend_url is None:
            raise PipelineError(
                "no LLM backend configured: set backend_url or pass a scripted backend"
            )
        if model_id not in self._backends:
            self._backends[model_id] = HttpBackend(
                url=self._config.backend_url,
                api_key=self._config.backend_key,
                model_id=model_id,
            )
        return self._backends[model_id]


class _CountingBackend:
    """Pass-through that tallies calls and token usage."""

    def __init__(self, inner):
        self._inner = inner
        self.calls = 0
        self.tokens_in = 0
        self.tokens_out = 0

    def complete(self, request):
        self.calls += 1
        result = self._inner.complete(request)
        self.tokens_in += result.input_tokens
        self.tokens_out += result.output_tokens
        return result


def _runner_for(config: PipelineConfig):
    if config.validation == "fixture":
        return FixtureRunner.passing()
    runner = SubprocessRunner(config.tool_paths)
    if config.validation == "subprocess":
        return runner
    if runner.available("iverilog") or runner.available("verilator"):
        return runner
    return FixtureRunner.passing()


def _required_stage(has_testbench: bool, run_synth: bool, runner) -> ValidationStage:
    # degrade to the highest stage the installed tools can actually reach
    if has_testbench:
        if runner.available("iverilog") and runner.available("vvp"):
            return ValidationStage.SIM_PASSED
        return ValidationStage.LINT_PASSED
    if run_synth and runner.available("yosys"):
        return ValidationStage.SYNTH_PASSED
    return ValidationStage.LINT_PASSED


def _failed_report(message: str) -> ValidationReport:
    return ValidationReport(
        stage_reached=ValidationStage.NONE,
        lint_passed=False,
        sim_passed=None,
        synth_passed=None,
        errors=(CategorizedError(ErrorCategory.OTHER, message),),
        sim_scan=None,
        synth_metrics=None,
        skipped=(),
        tool_logs=(),
        wall_time_s=0.0,
    )


def _logit(values: np.ndarray) -> np.ndarray:
    clipped = np.clip(np.asarray(values, dtype=float), 1e-6, 1.0 - 1e-6)
    return np.log(clipped / (1.0 - clipped))


def _interface_module_name(spec: Spec) -> Optional[str]:
    if not spec.interface_header:
        return None
    modules = find_modules(spec.interface_header)
    return modules[0].name if modules else None


def _reward_json(breakdown) -> dict:
    return {
        "term": breakdown.term,
        "eff": breakdown.eff,
        "qual": breakdown.qual,
        "prog": breakdown.prog,
        "total": breakdown.total,
    }


def _stage_name(report: Optional[ValidationReport]) -> Optional[str]:
    return report.stage_reached.name if report is not None else None


class _Planner:
    """Maps an encoded state to an action under the configured planning mode."""

    def __init__(self, config: PipelineConfig, policy: PolicyNetwork):
        self._mode = config.planner
        self._policy = policy
        self._rng = np.random.default_rng(config.seed)
        self._rules = load_rules(config.rules_path) if config.rules_path else None
        self._world_model = None
        if self._mode is Planner.MPC:
            if not config.world_model_checkpoint:
                raise PipelineError("mpc planner requires world_model_checkpoint")
            self._world_model = WorldModel()
            self._world_model.load(config.world_model_checkpoint)

    def plan(self, state: np.ndarray):
        """Returns (action, pre_sigmoid, log_prob, value)."""
        outputs = self._policy.forward(state)
        if self._mode is Planner.PPO:
            sampled = sample_action(outputs, 0.0, self._rng)
            return sampled.action, sampled.pre_sigmoid, sampled.log_prob, outputs.value
        if self._mode is Planner.MPC:
            action = mpc_plan(state, self._world_model.predict, rng=self._rng)
        else:
            action = heuristic_policy(state, rules=self._rules)
        pre_sigmoid = _logit(action.continuous)
        log_prob = action_log_prob(outputs, action.agent, action.focus, pre_sigmoid)
        return action, pre_sigmoid, log_prob, outputs.value


def generate_module(
    spec: Spec,
    config: Optional[PipelineConfig] = None,
    backend=None,
    runner=None,
    testbench_source: Optional[str] = None,
    stream: Optional[ThoughtStream] = None,
    buffer: Optional[TransitionBuffer] = None,
) -> RunRecord:
    """Run the full pipeline on one spec and return its record.

    ``backend`` overrides the configured HTTP endpoint (scripted runs);
    ``runner`` overrides tool selection; ``stream`` collects thought events
    (one is created, writing to config.trace_path when set, if omitted).
    """
    config = config if config is not None else PipelineConfig()
    started = time.monotonic()
    sink = None
    if stream is None:
        if config.trace_path:
            sink = open(config.trace_path, "w", encoding="utf-8")
        stream = ThoughtStream(sink)
    if runner is None:
        runner = _runner_for(config)
    try:
        record = _run(spec, config, backend, runner, testbench_source, stream, buffer)
    finally:
        if sink is not None:
            sink.close()
    return dataclasses.replace(record, wall_time_s=time.monotonic() - started)


def _run(spec, config, backend, runner, testbench_source, stream, buffer) -> RunRecord:
    registry = load_registry(config.registry_path)
    enriched = enrich_spec(spec, registry)
    if enriched.fired:
        stream.emit(
            ThoughtCategory.ANALYSIS,
            f"guidance attached for: {', '.join(enriched.fired)}",
            evidence=tuple(enriched.fired),
        )
    else:
        stream.emit(ThoughtCategory.ANALYSIS, "no guidance detectors fired", confidence=0.8)

    routing = route(enriched.spec)
    stream.emit(
        ThoughtCategory.DECISION,
        f"routing: tier={routing.tier.value}, hierarchical={routing.hierarchical}",
        evidence=tuple(routing.matched_triggers) + tuple(routing.component_keywords),
    )

    if routing.tier is Tier.SYMBOLIC:
        record = _run_symbolic(spec, config, runner, testbench_source, stream)
        if record is not None:
            return record
        stream.emit(
            ThoughtCategory.ERROR,
            "symbolic solve failed; falling back to iterative generation",
            confidence=0.9,
        )

    pool = _BackendPool(config, shared=backend)
    if not pool.configured:
        raise PipelineError(
            "no LLM backend configured: set backend_url or pass a scripted backend"
        )

    if routing.hierarchical:
        return _run_hierarchical(enriched.spec, config, pool, runner, routing, stream)
    return _run_iterative(
        enriched.spec, spec, config, pool, runner, routing, testbench_source, stream, buffer
    )


def _run_symbolic(spec, config, runner, testbench_source, stream) -> Optional[RunRecord]:
    module_name = _interface_module_name(spec) or "top_module"
    try:
        # solve from the raw description: guidance prose is not part of the table
        result = solve_text(
            spec.description,
            module_name=module_name,
            interface_header=spec.interface_header,
        )
    except SolveError:
        return None
    stream.emit(
        ThoughtCategory.GENERATION,
        f"table solved symbolically ({result.table_kind}); emitted {len(result.functions)} output(s)",
        evidence=tuple(result.expressions),
    )
    report = run_validation(
        result.source,
        runner,
        testbench_source=testbench_source,
        design_language="verilog2001",
        run_synth=config.run_synth,
    )
    required = _required_stage(testbench_source is not None, config.run_synth, runner)
    solved = report.stage_reached >= required
    stream.emit(
        ThoughtCategory.VALIDATION,
        f"validation reached {report.stage_reached.name}",
        evidence=tuple(e.message for e in report.errors[:5]),
    )
    stream.emit(
        ThoughtCategory.PROGRESS,
        f"symbolic run {'solved' if solved else 'failed validation'} with 0 backend calls",
    )
    return RunRecord(
        spec_name=spec.name,
        tier=Tier.SYMBOLIC.value,
        hierarchical=False,
        solve_kind="symbolic",
        outcome=RunOutcome.SOLVED if solved else RunOutcome.EXHAUSTED,
        required_stage=required.name,
        final_stage=report.stage_reached.name,
        iterations_used=0,
        backend_calls=0,
        testbench_origin="provided" if testbench_source is not None else None,
        seed=config.seed,
        final_source=result.source,
    )


def _run_hierarchical(spec, config, pool, runner, routing, stream) -> RunRecord:
    profiles = load_profiles(config.model_map)
    profile = profiles[AgentName.GENIUS]
    counting = _CountingBackend(pool.for_model(profile.model_id))
    result = generate_hierarchical(
        spec,
        counting,
        runner,
        profile=profile,
        max_iterations=config.max_iterations,
        emit=stream.emitter(),
    )
    total = len(result.order)
    solved = result.modules_passed == total and result.combined_lint_passed
    summary = {
        "top": result.plan.top_name,
        "order": [s.name for s in result.order],
        "modules": [
            {
                "name": m.name,
                "lint_passed": m.lint_passed,
                "iterations_used": m.iterations_used,
                "loc": m.loc,
                "errors": len(m.errors),
            }
            for m in result.modules
        ],
        "modules_passed": result.modules_passed,
        "combined_lint_passed": result.combined_lint_passed,
    }
    return RunRecord(
        spec_name=spec.name,
        tier=routing.tier.value,
        hierarchical=True,
        solve_kind="hierarchical",
        outcome=RunOutcome.SOLVED if solved else RunOutcome.EXHAUSTED,
        required_stage=ValidationStage.LINT_PASSED.name,
        final_stage=ValidationStage.LINT_PASSED.name if result.combined_lint_passed else ValidationStage.NONE.name,
        iterations_used=max((m.iterations_used for m in result.modules), default=0),
        backend_calls=result.backend_calls,
        testbench_origin=None,
        seed=config.seed,
        token_usage=((profile.model_id, result.tokens_in, result.tokens_out),),
        hierarchical_summary=summary,
        final_source=result.combined_source,
    )


def _run_iterative(
    spec, original_spec, config, pool, runner, routing, testbench_source, stream, buffer
) -> RunRecord:
    profiles = load_profiles(config.model_map)
    entries = load_knowledge_base(config.kb_path)
    reference = load_library(config.library_path) if config.library_path else ()
    policy = PolicyNetwork()
    if config.policy_checkpoint:
        policy.load(config.policy_checkpoint)
    planner = _Planner(config, policy)
    transitions_sink = None
    if config.transitions_path:
        transitions_sink = open(config.transitions_path, "w", encoding="utf-8")

    testbench = testbench_source
    tb_origin = "provided" if testbench is not None else None
    tb_attempted = False
    expected_top = _interface_module_name(original_spec)

    usage: list = []
    iteration_records: list = []
    reports: list = []
    errors: tuple = ()
    previous_source: Optional[str] = None
    agent_counts = [0, 0, 0, 0]
    last_agent: Optional[int] = None
    backend_calls = 0
    solved = False
    final_source = ""
    started = time.monotonic()
    required = _required_stage(testbench is not None, config.run_synth, runner)

    try:
        for i in range(config.max_iterations):
            spent = sum(u[1] + u[2] for u in usage)
            if config.token_budget is not None and spent >= config.token_budget:
                stream.emit(
                    ThoughtCategory.BOTTLENECK,
                    f"token budget exhausted ({spent}/{config.token_budget})",
                )
                break
            if config.wall_clock_s is not None and time.monotonic() - started > config.wall_clock_s:
                stream.emit(ThoughtCategory.BOTTLENECK, "wall-clock budget exhausted")
                break

            latest = reports[-1] if reports else None
            previous = reports[-2] if len(reports) > 1 else None
            state = encode_state(
                spec,
                i,
                latest_report=latest,
                previous_report=previous,
                agent_counts=tuple(agent_counts),
                last_agent=last_agent,
                source=previous_source,
            )
            action, pre_sigmoid, log_prob, value = planner.plan(state)
            gen_config = map_action(action)
            stream.emit(
                ThoughtCategory.PROPOSAL,
                f"planner proposed agent={gen_config.agent_name}, focus={gen_config.focus.value}, "
                f"T={gen_config.temperature:.2f}, k={gen_config.rag_k}",
                evidence=(config.planner.value,),
            )

            profile = profiles[AgentName(gen_config.agent_name)]
            temperature = gen_config.temperature
            rag_k = gen_config.rag_k
            if routing.tier is Tier.WAVEFORM_SPECIALIST and i == 0:
                # keyword rule: waveform specs start with the methodology agent
                profile = profiles[AgentName.WAVEFORM]
                temperature = profile.default_temperature
                rag_k = profile.default_rag_k
            stream.emit(
                ThoughtCategory.DECISION,
                f"iteration {i}: agent={profile.name.value}, focus={gen_config.focus.value}, "
                f"T={temperature:.2f}, k={rag_k}, retries={gen_config.retries}",
            )

            error_context = format_error_feedback(errors) if errors else None
            query = RetrievalQuery(
                spec_text=spec.description,
                focus=gen_config.focus,
                k=rag_k,
                error_context=error_context,
            )
            try:
                hits = retrieve(entries, query, reference_modules=reference)
                rag_context = format_context(hits)
                stream.emit(
                    ThoughtCategory.RETRIEVAL,
                    f"retrieved {len(hits)} knowledge entries",
                    evidence=tuple(h.title for h in hits[:5]),
                )
            except EmptyKnowledgeBase:
                rag_context = ""
                stream.emit(
                    ThoughtCategory.BOTTLENECK,
                    "knowledge base is empty; generating without retrieved context",
                )

            agent_backend = _CountingBackend(pool.for_model(profile.model_id))
            attempt_errors = list(errors)
            generation = None
            backend_error = None
            extraction_failed = False
            attempts = 0
            for _ in range(gen_config.retries):
                attempts += 1
                try:
                    generation = run_generation(
                        agent_backend,
                        profile,
                        spec,
                        rag_context=rag_context,
                        errors=tuple(attempt_errors),
                        temperature=temperature,
                        max_tokens=gen_config.max_tokens,
                    )
                except (TransportError, ScriptExhausted) as exc:
                    backend_error = str(exc)
                    stream.emit(ThoughtCategory.ERROR, f"backend failure: {exc}")
                    generation = None
                    continue
                backend_error = None
                if generation.extraction_failed:
                    extraction_failed = True
                    stream.emit(
                        ThoughtCategory.ERROR,
                        "response contained no Verilog module",
                    )
                    attempt_errors.append(
                        CategorizedError(
                            ErrorCategory.OTHER, "response contained no Verilog module"
                        )
                    )
                    continue
                extraction_failed = False
                break
            backend_calls += agent_backend.calls
            gen_usage = (profile.model_id, agent_backend.tokens_in, agent_backend.tokens_out)
            usage.append(gen_usage)

            source = generation.source if generation is not None else ""
            if source:
                loc = sum(1 for line in source.splitlines() if line.strip())
                stream.emit(
                    ThoughtCategory.GENERATION,
                    f"candidate design extracted ({loc} non-blank lines)",
                )
                if testbench is None and config.make_testbench and not tb_attempted:
                    tb_attempted = True
                    testbench, tb_calls, tb_usage = _acquire_testbench(
                        original_spec, source, profiles, pool, stream
                    )
                    backend_calls += tb_calls
                    if tb_usage is not None:
                        usage.append(tb_usage)
                    if testbench is not None:
                        tb_origin = "generated"
                validate_source = source
                if testbench is not None and tb_origin == "provided" and expected_top:
                    try:
                        validate_source = adapt_testbench(source, testbench, expected_top)
                    except PortMismatch as exc:
                        stream.emit(
                            ThoughtCategory.BOTTLENECK,
                            f"testbench interface mismatch: {exc}",
                        )
                required = _required_stage(testbench is not None, config.run_synth, runner)
                report = run_validation(
                    validate_source,
                    runner,
                    testbench_source=testbench,
                    design_language="verilog2001",
                    run_synth=config.run_synth,
                )
                stream.emit(
                    ThoughtCategory.VALIDATION,
                    f"validation reached {report.stage_reached.name} "
                    f"({len(report.errors)} error(s))",
                    evidence=tuple(e.message for e in report.errors[:5]),
                )
                errors = tuple(report.errors)
                previous_source = source
            else:
                stream.emit(
                    ThoughtCategory.GENERATION, "iteration produced no usable design"
                )
                validate_source = ""
                report = _failed_report(backend_error or "response contained no Verilog module")

            breakdown = compute_reward(
                report,
                gen_usage[1] + gen_usage[2],
                i,
                first_attempt=(i == 0 and attempts == 1),
                previous_report=latest,
            )
            success = report.stage_reached >= required
            done = success or i == config.max_iterations - 1
            transition = Transition(
                state=state,
                agent=action.agent,
                focus=action.focus,
                pre_sigmoid=np.asarray(pre_sigmoid, dtype=float),
                log_prob=float(log_prob),
                reward=breakdown.total,
                value=float(value),
                done=done,
            )
            if buffer is not None:
                buffer.add(transition)
            if transitions_sink is not None:
                transitions_sink.write(
                    json.dumps(
                        {
                            "state": [round(float(x), 9) for x in state],
                            "agent": action.agent,
                            "focus": action.focus,
                            "pre_sigmoid": [float(x) for x in transition.pre_sigmoid],
                            "log_prob": transition.log_prob,
                            "reward": _reward_json(breakdown),
                            "done": done,
                        }
                    )
                    + "\n"
                )
                transitions_sink.flush()

            iteration_records.append(
                IterationRecord(
                    index=i,
                    agent=profile.name.value,
                    planner_agent=action.agent,
                    focus=gen_config.focus.value,
                    temperature=round(temperature, 6),
                    max_tokens=gen_config.max_tokens,
                    rag_k=rag_k,
                    retries_allowed=gen_config.retries,
                    attempts=attempts,
                    model_id=profile.model_id,
                    tokens_in=gen_usage[1],
                    tokens_out=gen_usage[2],
                    extraction_failed=extraction_failed,
                    backend_error=backend_error,
                    reward=_reward_json(breakdown),
                    report=report.to_json(),
                )
            )
            reports.append(report)
            agent_counts[action.agent] += 1
            last_agent = action.agent
            stream.emit(
                ThoughtCategory.PROGRESS,
                f"iteration {i}: reward {breakdown.total:+.1f}, stage {report.stage_reached.name}",
            )
            if success:
                solved = True
                final_source = validate_source
                break
            if source:
                final_source = validate_source
    finally:
        if transitions_sink is not None:
            transitions_sink.close()

    final_report = reports[-1] if reports else None
    return RunRecord(
        spec_name=spec.name,
        tier=routing.tier.value,
        hierarchical=False,
        solve_kind="iterative",
        outcome=RunOutcome.SOLVED if solved else RunOutcome.EXHAUSTED,
        required_stage=required.name,
        final_stage=_stage_name(final_report),
        iterations_used=len(iteration_records),
        backend_calls=backend_calls,
        testbench_origin=tb_origin,
        seed=config.seed,
        token_usage=tuple(usage),
        iterations=tuple(iteration_records),
        final_source=final_source,
    )


def _acquire_testbench(spec, source, profiles, pool, stream):
    """Single per-run attempt at generating a self-checking harness.

    Returns (testbench or None, backend calls, usage triple or None).
    """
    profile = profiles[AgentName.TESTBENCH]
    counting = _CountingBackend(pool.for_model(profile.model_id))
    try:
        header = extract_header(source)
        testbench = generate_testbench(counting, spec, header, profile=profile)
    except (TestbenchNonCompliant, ExtractionFailed, TransportError, ScriptExhausted, ValueError) as exc:
        stream.emit(
            ThoughtCategory.BOTTLENECK,
            f"testbench generation failed ({type(exc).__name__}); proceeding without simulation",
        )
        usage = (profile.model_id, counting.tokens_in, counting.tokens_out)
        return None, counting.calls, usage if counting.calls else None
    stream.emit(ThoughtCategory.GENERATION, "self-checking testbench generated")
    return testbench, counting.calls, (profile.model_id, counting.tokens_in, counting.tokens_out)


@dataclass(frozen=True)
class BenchmarkSummary:
    total: int
    solved: int
    pass_at_1: float
    mean_iterations_solved: float
    failed: tuple
    tokens_in: int
    tokens_out: int
    backend_calls: int
    per_category: dict
    cost_usd: Optional[float]
    records: tuple = ()

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "solved": self.solved,
            "pass_at_1": self.pass_at_1,
            "mean_iterations_solved": self.mean_iterations_solved,
            "failed": list(self.failed),
            "tokens_in": self.tokens_in,
            "tokens_out": self.tokens_out,
            "backend_calls": self.backend_calls,
            "per_category": self.per_category,
            "cost_usd": self.cost_usd,
        }


def _problem_seed(base_seed: int, name: str) -> int:
    digest = hashlib.sha256(f"{base_seed}:{name}".encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


def _discover_problems(problem_dir: Path) -> list:
    skip_suffixes = ("_responses.json", "_record.json", "_plan.json")
    problems = []
    for path in sorted(problem_dir.iterdir()):
        if not path.is_file() or path.suffix not in (".json", ".txt", ".md"):
            continue
        if path.name == "summary.json" or path.name.endswith(skip_suffixes):
            continue
        problems.append(path)
    return problems


def _run_problem(path: Path, config: PipelineConfig, out_dir: Optional[Path]):
    spec = load_spec(path)
    stem = path.stem
    responses_path = path.with_name(f"{stem}_responses.json")
    backend = None
    if responses_path.exists():
        script = json.loads(responses_path.read_text(encoding="utf-8"))
        backend = MockBackend(script)
    tb_path = path.with_name(f"{stem}_tb.v")
    testbench = tb_path.read_text(encoding="utf-8") if tb_path.exists() else None
    run_config = dataclasses.replace(
        config,
        seed=_problem_seed(config.seed, spec.name),
        trace_path=str(out_dir / f"{stem}_trace.jsonl") if out_dir else None,
        transitions_path=None,
    )
    try:
        record = generate_module(spec, run_config, backend=backend, testbench_source=testbench)
    except Exception as exc:  # one bad problem must not sink the suite
        record = RunRecord(
            spec_name=spec.name,
            tier="unknown",
            hierarchical=False,
            solve_kind="error",
            outcome=RunOutcome.ERROR,
            required_stage=ValidationStage.NONE.name,
            final_stage=None,
            iterations_used=0,
            backend_calls=0,
            testbench_origin=None,
            seed=run_config.seed,
            error=f"{type(exc).__name__}: {exc}",
        )
    return spec, stem, record


def run_benchmark(
    problem_dir: Union[str, Path],
    config: Optional[PipelineConfig] = None,
    parallelism: int = 4,
    out_dir: Optional[Union[str, Path]] = None,
) -> BenchmarkSummary:
    """Run every problem in a directory and aggregate pass@1.

    A problem is any ``*.json`` (structured spec), ``*.txt``, or ``*.md``
    file. Sidecars are matched by stem: ``<stem>_responses.json`` (a JSON
    list of canned completions) runs the problem against a scripted backend,
    ``<stem>_tb.v`` supplies a testbench. Records and traces are written to
    ``out_dir`` when given.
    """
    config = config if config is not None else PipelineConfig()
    problem_dir = Path(problem_dir)
    problems = _discover_problems(problem_dir)
    if not problems:
        raise ValueError(f"no problems found in {problem_dir}")
    out_path = Path(out_dir) if out_dir is not None else None
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)

    workers = max(1, min(parallelism, len(problems)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda p: _run_problem(p, config, out_path), problems))

    records = []
    per_category: dict = {}
    failed = []
    for spec, stem, record in sorted(results, key=lambda r: r[1]):
        records.append(record)
        category = infer_category(spec).value
        bucket = per_category.setdefault(category, {"total": 0, "solved": 0})
        bucket["total"] += 1
        bucket["solved"] += int(record.solved)
        if not record.solved:
            failed.append(record.spec_name)
        if out_path is not None:
            out_file = out_path / f"{stem}_record.json"
            out_file.write_text(
                json.dumps(record.to_json(), indent=2) + "\n", encoding="utf-8"
            )

    solved = sum(1 for r in records if r.solved)
    solved_iters = [r.iterations_used for r in records if r.solved]
    cost = None
    if config.price_table is not None:
        cost = sum(estimate_cost(r, config.price_table) for r in records)
    summary = BenchmarkSummary(
        total=len(records),
        solved=solved,
        pass_at_1=solved / len(records),
        mean_iterations_solved=(
            sum(solved_iters) / len(solved_iters) if solved_iters else 0.0
        ),
        failed=tuple(failed),
        tokens_in=sum(r.tokens_in for r in records),
        tokens_out=sum(r.tokens_out for r in records),
        backend_calls=sum(r.backend_calls for r in records),
        per_category=per_category,
        cost_usd=cost,
        records=tuple(records),
    )
    if out_path is not None:
        (out_path / "summary.json").write_text(
            json.dumps(summary.to_json(), indent=2) + "\n", encoding="utf-8"
        )
    return summary
