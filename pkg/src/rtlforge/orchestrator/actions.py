"""Action space: hybrid discrete/continuous, its sampling law, and the
mapping from normalized action components to concrete generation knobs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from ..knowledge import FocusStrategy

AGENT_ORDER = ("genius", "fast", "debug", "optimize")
FOCUS_ORDER = (
    FocusStrategy.COMPREHENSIVE,        # 0: full
    FocusStrategy.PATTERN_FOCUSED,      # 1: minimal
    FocusStrategy.ERROR_FOCUSED,        # 2: error
    FocusStrategy.SYNTHESIS_FOCUSED,    # 3: synthesis
    FocusStrategy.ARCHITECTURE_FOCUSED, # 4: architecture
)

EPSILON0 = 0.3
EPSILON_DECAY = 0.995
NOISE_SIGMA_SCALE = 0.1  # exploration noise sigma = 0.1 * epsilon, pre-sigmoid
DENSITY_SIGMA = 0.1      # constant sigma for the Gaussian log-density


@dataclass(frozen=True)
class OrchestrationAction:
    agent: int
    focus: int
    temperature: float
    token_budget: float
    rag_depth: float
    retry_budget: float

    def __post_init__(self):
        if not 0 <= self.agent <= 3:
            raise ValueError(f"agent index out of range: {self.agent}")
        if not 0 <= self.focus <= 4:
            raise ValueError(f"focus index out of range: {self.focus}")
        for name in ("temperature", "token_budget", "rag_depth", "retry_budget"):
            x = getattr(self, name)
            if not 0.0 <= x <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {x}")

    @property
    def continuous(self) -> np.ndarray:
        return np.array([self.temperature, self.token_budget, self.rag_depth, self.retry_budget])


def epsilon_schedule(episode_index: int) -> float:
    if episode_index < 0:
        raise ValueError("episode index must be >= 0")
    return EPSILON0 * EPSILON_DECAY ** episode_index


@dataclass(frozen=True)
class SampledAction:
    action: OrchestrationAction
    pre_sigmoid: np.ndarray  # the 4 continuous draws before sigmoid bounding
    log_prob: float          # joint log-density under the network's own policy


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -60, 60)))


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max()
    return z - np.log(np.exp(z).sum())


def action_log_prob(outputs, agent: int, focus: int, pre_sigmoid: np.ndarray) -> float:
    """log pi(a|s): categorical for the discrete parts, Gaussian with a
    constant sigma in pre-sigmoid space for the continuous parts."""
    lp = _log_softmax(outputs.agent_logits)[agent]
    lp += _log_softmax(outputs.focus_logits)[focus]
    diff = pre_sigmoid - outputs.cont_pre
    lp += float(np.sum(
        -0.5 * (diff / DENSITY_SIGMA) ** 2
        - np.log(DENSITY_SIGMA * np.sqrt(2.0 * np.pi))
    ))
    return float(lp)


def sample_action(
    outputs,
    epsilon: float,
    rng: Union[int, np.random.Generator],
) -> SampledAction:
    """Epsilon-greedy over the discrete heads, noisy means for the rest.

    Draw order on the rng stream (fixed, so seeded runs replay exactly):
    one uniform for the exploration coin; on the uniform branch two
    integers (agent, then focus); then four normals for the continuous
    noise. Noise is added pre-sigmoid with sigma = 0.1*epsilon, clipped to
    three sigma; epsilon = 0 therefore returns argmax and exact means.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0,1]")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)

    uniform_branch = rng.uniform() < epsilon
    if uniform_branch:
        agent = int(rng.integers(4))
        focus = int(rng.integers(5))
    else:
        agent = int(np.argmax(outputs.agent_logits))
        focus = int(np.argmax(outputs.focus_logits))

    sigma = NOISE_SIGMA_SCALE * epsilon
    noise = rng.normal(0.0, 1.0, size=4) * sigma
    if sigma > 0:
        noise = np.clip(noise, -3.0 * sigma, 3.0 * sigma)
    pre = outputs.cont_pre + noise
    cont = np.clip(_sigmoid(pre), 0.0, 1.0)

    action = OrchestrationAction(
        agent=agent,
        focus=focus,
        temperature=float(cont[0]),
        token_budget=float(cont[1]),
        rag_depth=float(cont[2]),
        retry_budget=float(cont[3]),
    )
    return SampledAction(
        action=action,
        pre_sigmoid=pre,
        log_prob=action_log_prob(outputs, agent, focus, pre),
    )


@dataclass(frozen=True)
class GenerationConfig:
    agent_name: str
    focus: FocusStrategy
    temperature: float
    max_tokens: int
    rag_k: int
    retries: int


def map_action(action: OrchestrationAction) -> GenerationConfig:
    """Normalized action -> concrete generation knobs.

    rag k spans [3, 20], max_tokens [256, 4096], retries [1, 5]; all
    linear with round-half-even endpoints hit exactly at 0 and 1.
    """
    return GenerationConfig(
        agent_name=AGENT_ORDER[action.agent],
        focus=FOCUS_ORDER[action.focus],
        temperature=action.temperature,
        max_tokens=round(256 + 3840 * action.token_budget),
        rag_k=round(3 + 17 * action.rag_depth),
        retries=round(1 + 4 * action.retry_budget),
    )
