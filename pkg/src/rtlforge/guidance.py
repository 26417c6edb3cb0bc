"""Spec-guidance registry and the learned configuration gate.

Detectors are phrase-trigger rules over the problem description. Each one
that fires appends a technical brief to the description; evaluation order
is ascending priority and matching always runs against the ORIGINAL
description, so appended guidance can never trigger further detectors.

The gate is a separate, coarser mechanism: a small network mapping 20
spec-level features to success probabilities for six prompt
configurations. Registry enrichment is unconditional; the gate only
selects which configuration the prompt assembler uses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .nnet import Affine, Chain, Relu, Sigmoid, zero_grads
from .specs import (
    DesignCategory,
    RoutingDecision,
    Spec,
    SYMBOLIC_TRIGGERS,
    WAVEFORM_TRIGGERS,
    infer_category,
    phrase_found,
)

GATE_INPUT_DIM = 20
GATE_HIDDEN = (64, 32)
GUIDANCE_SEPARATOR = "--- guidance: {id} ---"


class RegistryError(Exception):
    pass


class DetectorKind(str, Enum):
    SEMANTIC = "semantic"
    FIXTURE_GROUNDED = "fixture_grounded"


@dataclass(frozen=True)
class Detector:
    id: str
    priority: int
    kind: DetectorKind
    trigger: dict
    guidance: str
    band: str = ""

    def matches(self, description: str) -> bool:
        return _eval_trigger(self.trigger, description)


def _eval_trigger(node: dict, description: str) -> bool:
    if not isinstance(node, dict) or len(node) != 1:
        raise RegistryError(f"malformed trigger node: {node!r}")
    key, value = next(iter(node.items()))
    if key == "phrase":
        return phrase_found(description, value)
    if key == "all":
        return all(_eval_trigger(child, description) for child in value)
    if key == "any":
        return any(_eval_trigger(child, description) for child in value)
    raise RegistryError(f"unknown trigger operator {key!r}")


def load_registry(path: Optional[str] = None) -> tuple[Detector, ...]:
    if path is None:
        raw = resources.files("rtlforge.data").joinpath("guidance_registry.json").read_text()
    else:
        raw = Path(path).read_text()
    data = json.loads(raw)
    detectors = []
    priorities = set()
    for item in data:
        guidance = item["guidance"]
        if isinstance(guidance, list):
            guidance = "\n".join(guidance)
        if not guidance.strip():
            raise RegistryError(f"detector {item['id']!r} has empty guidance")
        if item["priority"] in priorities:
            raise RegistryError(f"duplicate priority {item['priority']}")
        priorities.add(item["priority"])
        detectors.append(Detector(
            id=item["id"],
            priority=item["priority"],
            kind=DetectorKind(item["kind"]),
            trigger=item["trigger"],
            guidance=guidance,
            band=item.get("band", ""),
        ))
    detectors.sort(key=lambda d: d.priority)
    return tuple(detectors)


@dataclass(frozen=True)
class EnrichedSpec:
    spec: Spec
    fired: tuple[str, ...]


def enrich_spec(spec: Spec, registry: Sequence[Detector]) -> EnrichedSpec:
    """Append the brief of every matching detector, in priority order."""
    original = spec.description
    fired = [d for d in sorted(registry, key=lambda d: d.priority) if d.matches(original)]
    if not fired:
        return EnrichedSpec(spec=spec, fired=())
    parts = [original]
    for d in fired:
        parts.append("")
        parts.append(GUIDANCE_SEPARATOR.format(id=d.id))
        parts.append(d.guidance)
    enriched = replace(spec, description="\n".join(parts))
    return EnrichedSpec(spec=enriched, fired=tuple(d.id for d in fired))


class GateConfig(Enum):
    MINIMAL = "minimal"
    FSM_ONLY = "fsm_only"
    PROTOCOL_FOCUSED = "protocol_focused"
    MEMORY_FOCUSED = "memory_focused"
    DETERMINISTIC_KMAP = "deterministic_kmap"
    FULL_STACK = "full_stack"


GATE_CONFIGS = tuple(GateConfig)

# feature vector layout; indexes are load-bearing for tests and training
_CATEGORY_ORDER = (
    DesignCategory.COMBINATIONAL,
    DesignCategory.SEQUENTIAL,
    DesignCategory.FSM,
    DesignCategory.MEMORY,
    DesignCategory.BUS,
    DesignCategory.PROCESSOR,
    DesignCategory.UNKNOWN,
)
_FLAG_PHRASES = {
    7: SYMBOLIC_TRIGGERS,                                    # k-map / truth table
    8: WAVEFORM_TRIGGERS,                                    # waveform reading
    9: ("fsm", "state machine", "states"),                   # fsm language
    10: ("apb", "axi", "uart", "spi", "i2c", "wishbone"),    # protocol names
    11: ("ram", "fifo", "cache", "memory", "buffer"),        # storage
    12: ("adder", "multiplier", "alu", "arithmetic", "add"),  # arithmetic
    13: ("pipeline", "pipelined", "stage"),                  # pipelining
    14: ("reset", "asynchronous reset", "active-low"),       # reset discipline
}


class PassRateHistory:
    """Exponentially-weighted pass rate per design category, decay 0.9."""

    def __init__(self, decay: float = 0.9):
        self.decay = decay
        self._rates: dict[DesignCategory, float] = {}

    def rate(self, category: DesignCategory) -> float:
        return self._rates.get(category, 0.5)

    def update(self, category: DesignCategory, passed: bool) -> None:
        prev = self.rate(category)
        self._rates[category] = self.decay * prev + (1.0 - self.decay) * (1.0 if passed else 0.0)


def gate_features(
    spec: Spec,
    routing: RoutingDecision,
    fired: Sequence[str] = (),
    pass_rate: float = 0.5,
) -> np.ndarray:
    """20 features in [0,1]: category one-hot, keyword flags, size, history."""
    v = np.zeros(GATE_INPUT_DIM)
    category = infer_category(spec)
    v[_CATEGORY_ORDER.index(category)] = 1.0
    text = spec.description
    for idx, phrases in _FLAG_PHRASES.items():
        if any(phrase_found(text, p) for p in phrases):
            v[idx] = 1.0
    words = len(text.split())
    lines = text.count("\n") + 1
    v[15] = min(words / 200.0, 1.0)
    v[16] = min(lines / 50.0, 1.0)
    v[17] = min(len(routing.component_keywords) / 5.0, 1.0)
    v[18] = min(len(fired) / 4.0, 1.0)
    v[19] = pass_rate
    return v


def build_gate(rng: Optional[np.random.Generator] = None) -> Chain:
    return Chain([
        Affine(GATE_INPUT_DIM, GATE_HIDDEN[0], rng),
        Relu(),
        Affine(GATE_HIDDEN[0], GATE_HIDDEN[1], rng),
        Relu(),
        Affine(GATE_HIDDEN[1], len(GATE_CONFIGS), rng),
        Sigmoid(),
    ])


def gate_forward(features: np.ndarray, gate: Chain) -> np.ndarray:
    features = np.asarray(features, dtype=np.float64)
    if features.shape != (GATE_INPUT_DIM,):
        raise ValueError(f"gate expects {GATE_INPUT_DIM} features, got shape {features.shape}")
    return gate.forward(features[None, :])[0]


def select_config(probs: Sequence[float], symbolic: bool = False) -> GateConfig:
    if symbolic:
        return GateConfig.DETERMINISTIC_KMAP
    probs = np.asarray(probs)
    return GATE_CONFIGS[int(np.argmax(probs))]  # argmax takes first max: enum-order ties


def gate_loss(gate: Chain, features: np.ndarray, labels: np.ndarray) -> float:
    """Mean binary cross-entropy over samples and the six outputs."""
    p = np.clip(gate.forward(features), 1e-9, 1.0 - 1e-9)
    return float(-np.mean(labels * np.log(p) + (1.0 - labels) * np.log(1.0 - p)))


def gate_train(
    dataset: Sequence[tuple[np.ndarray, np.ndarray]],
    lr: float = 1e-3,
    epochs: int = 200,
    batch_size: int = 16,
    seed: int = 0,
    gate: Optional[Chain] = None,
) -> tuple[Chain, list[float]]:
    """Mini-batch gradient descent on per-output binary cross-entropy.

    Returns the trained gate and per-epoch mean losses; the final loss is
    asserted lower than the first by callers that care.
    """
    if not dataset:
        raise ValueError("gate training needs a non-empty dataset")
    rng = np.random.default_rng(seed)
    if gate is None:
        gate = build_gate(rng)
    x = np.stack([np.asarray(f, dtype=np.float64) for f, _ in dataset])
    y = np.stack([np.asarray(l, dtype=np.float64) for _, l in dataset])
    n = len(dataset)
    params = gate.params()
    losses = []
    for _ in range(epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, batch_size):
            idx = order[start:start + batch_size]
            xb, yb = x[idx], y[idx]
            zero_grads(params)
            p = gate.forward(xb)
            p_safe = np.clip(p, 1e-9, 1.0 - 1e-9)
            loss = -np.mean(yb * np.log(p_safe) + (1.0 - yb) * np.log(1.0 - p_safe))
            epoch_loss += loss * len(idx)
            # d(mean BCE)/d(sigmoid output); Sigmoid layer maps it back to pre-activation
            dout = (p_safe - yb) / (p_safe * (1.0 - p_safe)) / yb.size
            gate.backward(dout)
            for param in params:
                param.value -= lr * param.grad
        losses.append(epoch_loss / n)
    return gate, losses


def make_synthetic_gate_dataset(
    n: int, rng: np.random.Generator
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rule-generated warm-start labels: one obviously-right config per cluster."""
    dataset = []
    for _ in range(n):
        cfg_idx = int(rng.integers(len(GATE_CONFIGS)))
        v = rng.uniform(0.0, 0.1, size=GATE_INPUT_DIM)
        v[19] = rng.uniform(0.3, 0.7)
        cfg = GATE_CONFIGS[cfg_idx]
        if cfg is GateConfig.FSM_ONLY:
            v[2] = 1.0
            v[9] = 1.0
        elif cfg is GateConfig.PROTOCOL_FOCUSED:
            v[4] = 1.0
            v[10] = 1.0
        elif cfg is GateConfig.MEMORY_FOCUSED:
            v[3] = 1.0
            v[11] = 1.0
        elif cfg is GateConfig.DETERMINISTIC_KMAP:
            v[0] = 1.0
            v[7] = 1.0
        elif cfg is GateConfig.FULL_STACK:
            v[15] = rng.uniform(0.8, 1.0)
            v[16] = rng.uniform(0.8, 1.0)
            v[17] = rng.uniform(0.8, 1.0)
        else:  # Minimal: small combinational task, nothing special
            v[0] = 1.0
        label = np.zeros(len(GATE_CONFIGS))
        label[cfg_idx] = 1.0
        dataset.append((v, label))
    return dataset
