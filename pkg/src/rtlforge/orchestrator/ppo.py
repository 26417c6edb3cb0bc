"""PPO with GAE over refinement-run episodes.

Discrete components (agent, focus) use categorical log-probabilities;
continuous components use a Gaussian log-density with constant sigma in
pre-sigmoid space, matching the sampling law. The entropy bonus covers
the discrete heads only (the continuous entropy is constant under fixed
sigma, so it cannot shape the policy).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..nnet import Adam, zero_grads
from .actions import DENSITY_SIGMA
from .policy import PolicyNetwork

ADV_STD_FLOOR = 1e-8


@dataclass(frozen=True)
class Transition:
    state: np.ndarray
    agent: int
    focus: int
    pre_sigmoid: np.ndarray
    log_prob: float
    reward: float
    value: float
    done: bool


@dataclass(frozen=True)
class PpoHyperparameters:
    gamma: float = 0.99
    gae_lambda: float = 0.95
    clip_ratio: float = 0.2
    epsilon0: float = 0.3
    epsilon_decay: float = 0.995
    warm_start_episodes: int = 20
    learning_rate: float = 3e-4
    epochs: int = 4
    minibatch: int = 32
    value_coef: float = 0.5
    entropy_coef: float = 0.01


class TransitionBuffer:
    """Completed episodes, oldest evicted past the replay window."""

    def __init__(self, max_episodes: int = 64):
        self._episodes: deque[list[Transition]] = deque(maxlen=max_episodes)
        self._current: list[Transition] = []

    def add(self, transition: Transition) -> None:
        self._current.append(transition)
        if transition.done:
            self.end_episode()

    def end_episode(self) -> None:
        if self._current:
            self._episodes.append(self._current)
            self._current = []

    def episodes(self) -> list[list[Transition]]:
        return list(self._episodes)

    def __len__(self) -> int:
        return sum(len(ep) for ep in self._episodes)

    def clear(self) -> None:
        self._episodes.clear()
        self._current = []


def gae_advantages(
    rewards: np.ndarray, values: np.ndarray, gamma: float, lam: float
) -> tuple[np.ndarray, np.ndarray]:
    """Advantages and returns for one complete episode (terminal value 0)."""
    n = len(rewards)
    adv = np.zeros(n)
    last = 0.0
    for t in reversed(range(n)):
        next_value = values[t + 1] if t + 1 < n else 0.0
        delta = rewards[t] + gamma * next_value - values[t]
        last = delta + gamma * lam * last
        adv[t] = last
    return adv, adv + values


@dataclass
class PpoBatch:
    states: np.ndarray        # (n, 168)
    agents: np.ndarray        # (n,) int
    focuses: np.ndarray       # (n,) int
    pre_sigmoid: np.ndarray   # (n, 4)
    old_log_probs: np.ndarray # (n,)
    advantages: np.ndarray    # (n,)
    returns: np.ndarray       # (n,)

    def subset(self, idx: np.ndarray) -> "PpoBatch":
        return PpoBatch(
            self.states[idx], self.agents[idx], self.focuses[idx],
            self.pre_sigmoid[idx], self.old_log_probs[idx],
            self.advantages[idx], self.returns[idx],
        )

    def __len__(self) -> int:
        return len(self.states)


def batch_from_buffer(buffer: TransitionBuffer, hyper: PpoHyperparameters) -> PpoBatch:
    episodes = buffer.episodes()
    if not episodes:
        raise ValueError("transition buffer holds no completed episodes")
    advs, rets = [], []
    for ep in episodes:
        rewards = np.array([t.reward for t in ep])
        values = np.array([t.value for t in ep])
        a, r = gae_advantages(rewards, values, hyper.gamma, hyper.gae_lambda)
        advs.append(a)
        rets.append(r)
    flat = [t for ep in episodes for t in ep]
    adv = np.concatenate(advs)
    # normalize unless the batch is degenerate (constant advantages keep
    # their exact values, so zero advantages stay exactly zero)
    std = adv.std()
    if std > ADV_STD_FLOOR:
        adv = (adv - adv.mean()) / (std + ADV_STD_FLOOR)
    return PpoBatch(
        states=np.stack([t.state for t in flat]),
        agents=np.array([t.agent for t in flat], dtype=int),
        focuses=np.array([t.focus for t in flat], dtype=int),
        pre_sigmoid=np.stack([t.pre_sigmoid for t in flat]),
        old_log_probs=np.array([t.log_prob for t in flat]),
        advantages=adv,
        returns=np.concatenate(rets),
    )


@dataclass(frozen=True)
class PpoLossStats:
    policy_loss: float
    value_loss: float
    entropy: float
    entropy_weighted: float = 0.0

    @property
    def total(self) -> float:
        return self.policy_loss + self.value_loss - self.entropy_weighted


def _log_softmax_rows(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=1, keepdims=True))


def ppo_loss(
    policy: PolicyNetwork,
    batch: PpoBatch,
    hyper: PpoHyperparameters,
    with_grads: bool = False,
) -> PpoLossStats:
    """Clipped-surrogate + value + entropy loss over one minibatch.

    With ``with_grads`` the exact analytic gradient of the total loss is
    accumulated into the policy parameters (callers zero them first).
    """
    n = len(batch)
    out = policy.forward_batch(batch.states)

    ls_agent = _log_softmax_rows(out.agent_logits)
    ls_focus = _log_softmax_rows(out.focus_logits)
    p_agent = np.exp(ls_agent)
    p_focus = np.exp(ls_focus)
    rows = np.arange(n)

    diff = batch.pre_sigmoid - out.cont_pre
    cont_logp = (
        -0.5 * (diff / DENSITY_SIGMA) ** 2
        - np.log(DENSITY_SIGMA * np.sqrt(2.0 * np.pi))
    ).sum(axis=1)
    new_logp = ls_agent[rows, batch.agents] + ls_focus[rows, batch.focuses] + cont_logp

    ratio = np.exp(np.clip(new_logp - batch.old_log_probs, -30.0, 30.0))
    lo, hi = 1.0 - hyper.clip_ratio, 1.0 + hyper.clip_ratio
    unclipped = ratio * batch.advantages
    clipped = np.clip(ratio, lo, hi) * batch.advantages
    surrogate = np.minimum(unclipped, clipped)
    policy_loss = -float(surrogate.mean())

    value_err = out.value - batch.returns
    value_loss = hyper.value_coef * float(np.mean(value_err ** 2))

    h_agent = -(p_agent * ls_agent).sum(axis=1)
    h_focus = -(p_focus * ls_focus).sum(axis=1)
    entropy = float((h_agent + h_focus).mean())

    if with_grads:
        # surrogate gradient flows only where the unclipped branch is active
        active = unclipped <= clipped
        coeff = np.where(active, -batch.advantages * ratio / n, 0.0)

        onehot_agent = np.zeros_like(p_agent)
        onehot_agent[rows, batch.agents] = 1.0
        onehot_focus = np.zeros_like(p_focus)
        onehot_focus[rows, batch.focuses] = 1.0

        d_agent = coeff[:, None] * (onehot_agent - p_agent)
        d_focus = coeff[:, None] * (onehot_focus - p_focus)
        d_cont = coeff[:, None] * (diff / DENSITY_SIGMA ** 2)

        if hyper.entropy_coef:
            # d(-c*mean(H))/d logits = (c/n) * p * (log p + H)
            scale = hyper.entropy_coef / n
            d_agent += scale * p_agent * (ls_agent + h_agent[:, None])
            d_focus += scale * p_focus * (ls_focus + h_focus[:, None])

        d_value = hyper.value_coef * 2.0 * value_err / n

        policy.backward_batch(d_agent, d_focus, d_cont, d_value)

    return PpoLossStats(
        policy_loss=policy_loss,
        value_loss=value_loss,
        entropy=entropy,
        entropy_weighted=hyper.entropy_coef * entropy,
    )


@dataclass(frozen=True)
class PpoUpdateStats:
    policy_loss: float
    value_loss: float
    entropy: float
    minibatches: int


def ppo_update(
    policy: PolicyNetwork,
    buffer: TransitionBuffer,
    hyper: PpoHyperparameters = PpoHyperparameters(),
    optimizer: Optional[Adam] = None,
    seed: int = 0,
) -> PpoUpdateStats:
    """Run the configured epochs of clipped-surrogate updates in place."""
    batch = batch_from_buffer(buffer, hyper)
    if optimizer is None:
        optimizer = Adam(policy.params(), lr=hyper.learning_rate)
    rng = np.random.default_rng(seed)
    params = policy.params()

    totals = np.zeros(3)
    count = 0
    for _ in range(hyper.epochs):
        order = rng.permutation(len(batch))
        for start in range(0, len(batch), hyper.minibatch):
            mb = batch.subset(order[start:start + hyper.minibatch])
            zero_grads(params)
            stats = ppo_loss(policy, mb, hyper, with_grads=True)
            optimizer.step()
            totals += (stats.policy_loss, stats.value_loss, stats.entropy)
            count += 1
    return PpoUpdateStats(
        policy_loss=totals[0] / count,
        value_loss=totals[1] / count,
        entropy=totals[2] / count,
        minibatches=count,
    )
