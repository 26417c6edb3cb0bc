"""Command-line entry points.

Subcommands cover the full surface: spec-to-RTL generation, benchmark
sweeps, policy training, reference-library indexing, direct table solving,
and standalone validation runs against the installed EDA tools.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from .agents import MockBackend
from .kmap import SolveError, solve_text
from .knowledge import index_reference_library, save_library
from .nnet import Adam
from .orchestrator import (
    PolicyNetwork,
    PpoHyperparameters,
    Transition,
    TransitionBuffer,
    epsilon_schedule,
    ppo_update,
    sample_action,
)
from .pipeline import (
    PipelineConfig,
    PipelineError,
    Planner,
    run_benchmark,
    generate_module,
)
from .specs import SpecError, load_spec
from .validation import SubprocessRunner, run_validation


def _build_config(config_path, planner, backend_url, seed, trace_out) -> PipelineConfig:
    if config_path:
        data = json.loads(Path(config_path).read_text(encoding="utf-8"))
        config = PipelineConfig.from_json(data)
    else:
        config = PipelineConfig()
    if planner is not None:
        config.planner = Planner(planner)
    if backend_url is not None:
        config.backend_url = backend_url
    if seed is not None:
        config.seed = seed
    if trace_out is not None:
        config.trace_path = trace_out
    return config


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON file of pipeline settings.")
@click.option("--planner", type=click.Choice([p.value for p in Planner]), default=None,
              help="Planning mode for the refinement loop.")
@click.option("--backend", "backend_url", default=None, help="LLM endpoint URL.")
@click.option("--seed", type=int, default=None, help="Base RNG seed.")
@click.option("--trace-out", default=None, help="Write the thought trace to this JSONL file.")
@click.pass_context
def main(ctx, config_path, planner, backend_url, seed, trace_out):
    """Spec-to-RTL generation pipeline."""
    try:
        ctx.obj = _build_config(config_path, planner, backend_url, seed, trace_out)
    except (PipelineError, json.JSONDecodeError) as exc:
        raise click.ClickException(str(exc))


@main.command()
@click.argument("specfile", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out", type=click.Path(dir_okay=False), default=None,
              help="Write the final Verilog here.")
@click.option("--testbench", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Self-checking testbench to simulate against.")
@click.option("--responses", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON list of canned completions (scripted backend).")
@click.option("--record", "record_path", type=click.Path(dir_okay=False), default=None,
              help="Write the run record JSON here.")
@click.pass_obj
def generate(config, specfile, out, testbench, responses, record_path):
    """Generate RTL for one spec file (.json, .txt, or .md). Exit 0 iff solved."""
    try:
        spec = load_spec(Path(specfile))
    except (SpecError, json.JSONDecodeError, ValueError) as exc:
        raise click.ClickException(f"bad spec file: {exc}")
    backend = None
    if responses:
        backend = MockBackend(json.loads(Path(responses).read_text(encoding="utf-8")))
    tb = Path(testbench).read_text(encoding="utf-8") if testbench else None
    try:
        record = generate_module(spec, config, backend=backend, testbench_source=tb)
    except PipelineError as exc:
        raise click.ClickException(str(exc))
    click.echo(
        f"{record.spec_name}: {record.outcome.value} "
        f"(tier={record.tier}, iterations={record.iterations_used}, "
        f"backend_calls={record.backend_calls}, stage={record.final_stage})"
    )
    if out and record.final_source:
        Path(out).write_text(record.final_source, encoding="utf-8")
        click.echo(f"wrote {out}")
    if record_path:
        Path(record_path).write_text(
            json.dumps(record.to_json(), indent=2) + "\n", encoding="utf-8"
        )
    if not record.solved:
        sys.exit(1)


@main.command()
@click.argument("problem_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help="Directory for records, traces, and summary.json.")
@click.option("--min-pass", type=float, default=None,
              help="Exit nonzero when pass@1 falls below this fraction.")
@click.option("--parallelism", type=int, default=4, show_default=True)
@click.pass_obj
def benchmark(config, problem_dir, out_dir, min_pass, parallelism):
    """Run every problem in a directory and report pass@1."""
    try:
        summary = run_benchmark(problem_dir, config, parallelism=parallelism, out_dir=out_dir)
    except (ValueError, PipelineError) as exc:
        raise click.ClickException(str(exc))
    click.echo(f"pass@1: {summary.pass_at_1:.3f} ({summary.solved}/{summary.total})")
    click.echo(f"mean iterations over solved: {summary.mean_iterations_solved:.2f}")
    click.echo(f"tokens: {summary.tokens_in} in / {summary.tokens_out} out "
               f"({summary.backend_calls} backend calls)")
    if summary.cost_usd is not None:
        click.echo(f"estimated cost: ${summary.cost_usd:.4f}")
    for category, counts in sorted(summary.per_category.items()):
        click.echo(f"  {category}: {counts['solved']}/{counts['total']}")
    if summary.failed:
        click.echo("failed: " + ", ".join(summary.failed))
    if min_pass is not None and summary.pass_at_1 < min_pass:
        sys.exit(1)


@main.command("train-policy")
@click.option("--episodes", type=int, default=500, show_default=True)
@click.option("--checkpoint", type=click.Path(dir_okay=False), default=None,
              help="Save the trained policy here (.npz).")
@click.pass_obj
def train_policy(config, episodes, checkpoint):
    """Train the agent-selection policy on the synthetic reward environment.

    A smoke trainer: random states, reward +100 when the Debug agent is
    chosen and -50 otherwise, epsilon-greedy exploration with PPO updates
    every four episodes. Prints the greedy selection rate when done.
    """
    rng = np.random.default_rng(config.seed)
    policy = PolicyNetwork(np.random.default_rng(config.seed + 1))
    hyper = PpoHyperparameters()
    buffer = TransitionBuffer()
    optimizer = Adam(policy.params(), lr=hyper.learning_rate)
    for episode in range(episodes):
        state = rng.uniform(0, 1, 168)
        outputs = policy.forward(state)
        sampled = sample_action(outputs, epsilon_schedule(episode), rng)
        reward = 100.0 if sampled.action.agent == 2 else -50.0
        buffer.add(Transition(state, sampled.action.agent, sampled.action.focus,
                              sampled.pre_sigmoid, sampled.log_prob, reward,
                              outputs.value, True))
        if (episode + 1) % 4 == 0:
            ppo_update(policy, buffer, hyper, optimizer=optimizer, seed=episode)
    eval_rng = np.random.default_rng(99)
    greedy = sum(
        int(np.argmax(policy.forward(eval_rng.uniform(0, 1, 168)).agent_logits) == 2)
        for _ in range(100)
    )
    click.echo(f"greedy target-agent rate after {episodes} episodes: {greedy}/100")
    if checkpoint:
        policy.save(checkpoint, meta={"episodes": episodes, "seed": config.seed})
        click.echo(f"saved policy to {checkpoint}")


@main.command("index-library")
@click.argument("source_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default="library.json",
              show_default=True, help="Where to write the indexed library.")
def index_library(source_dir, out):
    """Index a directory of reference Verilog modules for retrieval."""
    result = index_reference_library(source_dir)
    save_library(result.modules, out)
    click.echo(f"indexed {len(result.modules)} modules "
               f"({len(result.rejected)} rejected) -> {out}")
    for name, reason in result.rejected:
        click.echo(f"  rejected {name}: {reason}")


@main.command("solve-kmap")
@click.argument("table_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--module-name", default="top_module", show_default=True)
@click.option("-o", "--out", type=click.Path(dir_okay=False), default=None,
              help="Write the Verilog here instead of stdout.")
def solve_kmap(table_file, module_name, out):
    """Solve a K-map or truth-table file directly to minimal Verilog."""
    text = Path(table_file).read_text(encoding="utf-8")
    try:
        result = solve_text(text, module_name=module_name)
    except SolveError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"// solved {result.table_kind} with {len(result.functions)} output(s)", err=True)
    if out:
        Path(out).write_text(result.source, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(result.source)


@main.command()
@click.argument("design", type=click.Path(exists=True, dir_okay=False))
@click.option("--testbench", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--sv", is_flag=True, help="Lint as SystemVerilog instead of Verilog-2001.")
@click.option("--no-synth", is_flag=True, help="Skip the synthesis stage.")
@click.pass_obj
def validate(config, design, testbench, sv, no_synth):
    """Lint, simulate, and synthesize a design with the installed tools."""
    source = Path(design).read_text(encoding="utf-8")
    tb = Path(testbench).read_text(encoding="utf-8") if testbench else None
    runner = SubprocessRunner(config.tool_paths)
    report = run_validation(
        source,
        runner,
        testbench_source=tb,
        design_language="systemverilog" if sv else "verilog2001",
        run_synth=not no_synth,
    )
    click.echo(json.dumps(report.to_json(), indent=2))
    failed = (
        report.lint_passed is False
        or report.sim_passed is False
        or report.synth_passed is False
    )
    if failed:
        sys.exit(1)


if __name__ == "__main__":
    main()
