from .actions import (
    AGENT_ORDER,
    FOCUS_ORDER,
    GenerationConfig,
    OrchestrationAction,
    SampledAction,
    action_log_prob,
    epsilon_schedule,
    map_action,
    sample_action,
)
from .heuristic import heuristic_policy, load_rules
from .mpc import WorldModelMissing, mpc_plan
from .policy import PolicyNetwork, PolicyOutputs
from .ppo import (
    PpoHyperparameters,
    PpoUpdateStats,
    Transition,
    TransitionBuffer,
    batch_from_buffer,
    gae_advantages,
    ppo_loss,
    ppo_update,
)
from .reward import RewardBreakdown, compute_reward
from .state import (
    IDENTIFIER_DIM,
    STATE_DIM,
    STRUCTURAL_DIM,
    STRUCTURAL_LAYOUT,
    encode_state,
    feature_index,
    spec_identifier,
)
from .world_model import WorldModel, WorldModelSample, encode_action, world_model_train

__all__ = [
    "AGENT_ORDER",
    "FOCUS_ORDER",
    "GenerationConfig",
    "OrchestrationAction",
    "SampledAction",
    "action_log_prob",
    "epsilon_schedule",
    "map_action",
    "sample_action",
    "heuristic_policy",
    "load_rules",
    "WorldModelMissing",
    "mpc_plan",
    "PolicyNetwork",
    "PolicyOutputs",
    "PpoHyperparameters",
    "PpoUpdateStats",
    "Transition",
    "TransitionBuffer",
    "batch_from_buffer",
    "gae_advantages",
    "ppo_loss",
    "ppo_update",
    "RewardBreakdown",
    "compute_reward",
    "IDENTIFIER_DIM",
    "STATE_DIM",
    "STRUCTURAL_DIM",
    "STRUCTURAL_LAYOUT",
    "encode_state",
    "feature_index",
    "spec_identifier",
    "WorldModel",
    "WorldModelSample",
    "encode_action",
    "world_model_train",
]
