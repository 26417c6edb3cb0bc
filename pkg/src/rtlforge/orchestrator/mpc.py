"""Sampling-based planner: 64 random action sequences, horizon 3.

The planner is model-agnostic: it takes any ``predict(state, action)``
callable returning the four world-model outputs and scores sequences by
the cumulative predicted reward (output index 3). Exactly
``candidates * horizon`` model calls are made; ties keep the
lowest-indexed sequence.
"""

from __future__ import annotations

from typing import Callable, Union

import numpy as np

from .actions import OrchestrationAction

DEFAULT_CANDIDATES = 64
DEFAULT_HORIZON = 3

PredictFn = Callable[[np.ndarray, OrchestrationAction], np.ndarray]


class WorldModelMissing(Exception):
    pass


def _random_action(rng: np.random.Generator) -> OrchestrationAction:
    return OrchestrationAction(
        agent=int(rng.integers(4)),
        focus=int(rng.integers(5)),
        temperature=float(rng.uniform()),
        token_budget=float(rng.uniform()),
        rag_depth=float(rng.uniform()),
        retry_budget=float(rng.uniform()),
    )


def mpc_plan(
    state: np.ndarray,
    predict: PredictFn,
    candidates: int = DEFAULT_CANDIDATES,
    horizon: int = DEFAULT_HORIZON,
    rng: Union[int, np.random.Generator] = 0,
) -> OrchestrationAction:
    if predict is None:
        raise WorldModelMissing("mpc_plan needs a world model or predict callable")
    if candidates < 1 or horizon < 1:
        raise ValueError("candidates and horizon must be positive")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)

    best_return = -np.inf
    best_action = None
    for _ in range(candidates):
        sequence = [_random_action(rng) for _ in range(horizon)]
        total = 0.0
        for action in sequence:
            total += float(predict(state, action)[3])
        if total > best_return:  # strict: ties keep the earlier sequence
            best_return = total
            best_action = sequence[0]
    return best_action
