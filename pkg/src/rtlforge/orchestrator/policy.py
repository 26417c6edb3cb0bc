"""Actor-critic network: shared trunk, discrete/continuous/value heads.

The trunk is two affine layers (168 -> 256 -> 256), each followed by layer
normalization and ReLU. One affine head emits all nine discrete logits
(four agent + five focus), one emits the four continuous pre-sigmoid
outputs, one the scalar value. Zero-initialized parameters give zero
logits, 0.5 means, and zero value, which is the documented cold start.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..nnet import Affine, Chain, LayerNorm, Param, Relu, load_tensors, save_tensors, sigmoid

STATE_DIM = 168
TRUNK_WIDTH = 256
NUM_AGENT = 4
NUM_FOCUS = 5
NUM_CONT = 4


@dataclass(frozen=True)
class PolicyOutputs:
    agent_logits: np.ndarray   # (4,)
    focus_logits: np.ndarray   # (5,)
    cont_pre: np.ndarray       # (4,) pre-sigmoid
    cont_means: np.ndarray     # (4,) sigmoid-bounded
    value: float


@dataclass(frozen=True)
class PolicyBatchOutputs:
    agent_logits: np.ndarray   # (n, 4)
    focus_logits: np.ndarray   # (n, 5)
    cont_pre: np.ndarray       # (n, 4)
    value: np.ndarray          # (n,)


class PolicyNetwork:
    def __init__(self, rng: Optional[np.random.Generator] = None):
        self.trunk = Chain([
            Affine(STATE_DIM, TRUNK_WIDTH, rng),
            LayerNorm(TRUNK_WIDTH),
            Relu(),
            Affine(TRUNK_WIDTH, TRUNK_WIDTH, rng),
            LayerNorm(TRUNK_WIDTH),
            Relu(),
        ])
        self.discrete_head = Affine(TRUNK_WIDTH, NUM_AGENT + NUM_FOCUS, rng)
        self.continuous_head = Affine(TRUNK_WIDTH, NUM_CONT, rng)
        self.value_head = Affine(TRUNK_WIDTH, 1, rng)

    def params(self) -> list[Param]:
        return (
            self.trunk.params()
            + self.discrete_head.params()
            + self.continuous_head.params()
            + self.value_head.params()
        )

    def forward_batch(self, states: np.ndarray) -> PolicyBatchOutputs:
        states = np.asarray(states, dtype=np.float64)
        if states.ndim != 2 or states.shape[1] != STATE_DIM:
            raise ValueError(f"expected (n, {STATE_DIM}) states, got {states.shape}")
        features = self.trunk.forward(states)
        disc = self.discrete_head.forward(features)
        cont = self.continuous_head.forward(features)
        value = self.value_head.forward(features)[:, 0]
        return PolicyBatchOutputs(
            agent_logits=disc[:, :NUM_AGENT],
            focus_logits=disc[:, NUM_AGENT:],
            cont_pre=cont,
            value=value,
        )

    def forward(self, state: np.ndarray) -> PolicyOutputs:
        state = np.asarray(state, dtype=np.float64)
        if state.shape != (STATE_DIM,):
            raise ValueError(f"expected a {STATE_DIM}-dim state, got {state.shape}")
        out = self.forward_batch(state[None, :])
        pre = out.cont_pre[0]
        return PolicyOutputs(
            agent_logits=out.agent_logits[0],
            focus_logits=out.focus_logits[0],
            cont_pre=pre,
            cont_means=sigmoid(pre),
            value=float(out.value[0]),
        )

    def backward_batch(
        self,
        d_agent: np.ndarray,
        d_focus: np.ndarray,
        d_cont_pre: np.ndarray,
        d_value: np.ndarray,
    ) -> None:
        """Accumulate parameter gradients for the last forward_batch call."""
        d_disc = np.concatenate([d_agent, d_focus], axis=1)
        d_features = self.discrete_head.backward(d_disc)
        d_features = d_features + self.continuous_head.backward(d_cont_pre)
        d_features = d_features + self.value_head.backward(d_value[:, None])
        self.trunk.backward(d_features)

    # checkpoint format: named tensors, shapes declared in the file
    def _named(self) -> dict[str, Param]:
        names = {}
        trunk_layers = [l for l in self.trunk.layers if l.params()]
        for i, layer in enumerate(trunk_layers):
            kind = "affine" if isinstance(layer, Affine) else "norm"
            a, b = layer.params()
            names[f"trunk.{i}.{kind}.a"] = a
            names[f"trunk.{i}.{kind}.b"] = b
        names["discrete.w"], names["discrete.b"] = self.discrete_head.params()
        names["continuous.w"], names["continuous.b"] = self.continuous_head.params()
        names["value.w"], names["value.b"] = self.value_head.params()
        return names

    def save(self, path: str | Path, meta: Optional[dict] = None) -> None:
        save_tensors(path, {k: p.value for k, p in self._named().items()}, meta)

    def load(self, path: str | Path) -> dict:
        tensors, meta = load_tensors(path)
        named = self._named()
        missing = set(named) - set(tensors)
        if missing:
            raise ValueError(f"checkpoint missing tensors: {sorted(missing)}")
        for name, param in named.items():
            incoming = tensors[name]
            if incoming.shape != param.value.shape:
                raise ValueError(
                    f"tensor {name}: shape {incoming.shape} != {param.value.shape}"
                )
            param.value[...] = incoming
        return meta
