"""Small regressor predicting per-step outcomes for the MPC planner.

Input is the 168-d state concatenated with a 13-d action encoding (agent
one-hot, focus one-hot, four continuous values); outputs are predicted
stage delta, error-count delta, token cost, and reward. A zero-initialized
model predicts zeros everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ..nnet import Affine, Chain, Relu, load_tensors, save_tensors, zero_grads
from .actions import OrchestrationAction
from .policy import STATE_DIM

ACTION_DIM = 13  # 4 agent one-hot + 5 focus one-hot + 4 continuous
OUTPUT_DIM = 4   # stage delta, error delta, token cost, reward
HIDDEN = 64


def encode_action(action: OrchestrationAction) -> np.ndarray:
    v = np.zeros(ACTION_DIM)
    v[action.agent] = 1.0
    v[4 + action.focus] = 1.0
    v[9:13] = action.continuous
    return v


class WorldModel:
    def __init__(self, rng: Optional[np.random.Generator] = None):
        self.net = Chain([
            Affine(STATE_DIM + ACTION_DIM, HIDDEN, rng),
            Relu(),
            Affine(HIDDEN, OUTPUT_DIM, rng),
        ])

    def predict(self, state: np.ndarray, action: OrchestrationAction) -> np.ndarray:
        x = np.concatenate([np.asarray(state, dtype=np.float64), encode_action(action)])
        return self.net.forward(x[None, :])[0]

    def params(self):
        return self.net.params()

    def save(self, path: str | Path, meta: Optional[dict] = None) -> None:
        named = self._named()
        save_tensors(path, {k: p.value for k, p in named.items()}, meta)

    def load(self, path: str | Path) -> dict:
        tensors, meta = load_tensors(path)
        for name, param in self._named().items():
            if name not in tensors:
                raise ValueError(f"checkpoint missing tensor {name}")
            param.value[...] = tensors[name].reshape(param.value.shape)
        return meta

    def _named(self):
        a, b = self.net.layers[0].params()
        c, d = self.net.layers[2].params()
        return {"l0.w": a, "l0.b": b, "l1.w": c, "l1.b": d}


@dataclass(frozen=True)
class WorldModelSample:
    state: np.ndarray
    action: OrchestrationAction
    targets: np.ndarray  # (4,): stage delta, error delta, token cost, reward


def world_model_train(
    samples: Sequence[WorldModelSample],
    model: Optional[WorldModel] = None,
    lr: float = 1e-3,
    epochs: int = 200,
    seed: int = 0,
) -> tuple[WorldModel, list[float]]:
    """Full-batch squared-error gradient descent; returns per-epoch MSE."""
    if not samples:
        raise ValueError("world model training needs samples")
    rng = np.random.default_rng(seed)
    if model is None:
        model = WorldModel(rng)
    x = np.stack([
        np.concatenate([s.state, encode_action(s.action)]) for s in samples
    ])
    y = np.stack([s.targets for s in samples])
    params = model.params()
    losses = []
    for _ in range(epochs):
        zero_grads(params)
        pred = model.net.forward(x)
        err = pred - y
        losses.append(float(np.mean(err ** 2)))
        model.net.backward(2.0 * err / err.size)
        for p in params:
            p.value -= lr * p.grad
    return model, losses
