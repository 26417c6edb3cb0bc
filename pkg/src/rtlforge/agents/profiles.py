"""Agent profiles: who generates, at what temperature, with how much context.

Six profiles ship with the package. Four general-purpose agents (genius,
fast, debug, optimize) are picked by the learned orchestrator; the waveform
agent is keyword-routed and the testbench agent is invoked explicitly by the
pipeline. Each profile carries a role-specific system prompt stored as an
editable text file under ``rtlforge/data/prompts/``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path


class AgentName(str, enum.Enum):
    GENIUS = "genius"
    FAST = "fast"
    DEBUG = "debug"
    OPTIMIZE = "optimize"
    WAVEFORM = "waveform"
    TESTBENCH = "testbench"


class SelectionMode(str, enum.Enum):
    """How an agent gets chosen for a generation step."""

    RL_POLICY = "rl_policy"
    KEYWORD_RULE = "keyword_rule"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class AgentProfile:
    """Immutable configuration for one generation agent."""

    name: AgentName
    model_id: str
    default_temperature: float
    default_rag_k: int
    selection: SelectionMode
    system_prompt_template: str

    def __post_init__(self) -> None:
        if not 0.0 <= self.default_temperature <= 1.0:
            raise ValueError(
                f"default_temperature must be in [0, 1], got {self.default_temperature}"
            )
        if self.default_rag_k < 0:
            raise ValueError(f"default_rag_k must be >= 0, got {self.default_rag_k}")
        if not self.model_id:
            raise ValueError("model_id must be non-empty")
        if not self.system_prompt_template.strip():
            raise ValueError("system_prompt_template must be non-empty")

    def to_json(self) -> dict:
        """Serializable view; the prompt template travels with the profile."""
        return {
            "name": self.name.value,
            "model_id": self.model_id,
            "default_temperature": self.default_temperature,
            "default_rag_k": self.default_rag_k,
            "selection": self.selection.value,
            "system_prompt_template": self.system_prompt_template,
        }

    @classmethod
    def from_json(cls, data: dict) -> "AgentProfile":
        return cls(
            name=AgentName(data["name"]),
            model_id=data["model_id"],
            default_temperature=data["default_temperature"],
            default_rag_k=data["default_rag_k"],
            selection=SelectionMode(data["selection"]),
            system_prompt_template=data["system_prompt_template"],
        )


# (model tier, temperature, rag_k, selection) per shipped agent. Model ids are
# deployment placeholders: "large" marks the capable/expensive tier, "small"
# the quick/cheap one. Deployments remap them via load_profiles(model_map=...).
_PROFILE_TABLE: tuple[tuple[AgentName, str, float, int, SelectionMode], ...] = (
    (AgentName.GENIUS, "large", 0.7, 15, SelectionMode.RL_POLICY),
    (AgentName.FAST, "small", 0.5, 3, SelectionMode.RL_POLICY),
    (AgentName.DEBUG, "large", 0.3, 5, SelectionMode.RL_POLICY),
    (AgentName.OPTIMIZE, "small", 0.4, 4, SelectionMode.RL_POLICY),
    (AgentName.WAVEFORM, "large", 0.4, 15, SelectionMode.KEYWORD_RULE),
    (AgentName.TESTBENCH, "large", 0.6, 4, SelectionMode.EXPLICIT),
)


def _load_template(name: AgentName) -> str:
    ref = resources.files("rtlforge.data.prompts") / f"{name.value}.txt"
    return ref.read_text(encoding="utf-8")


def load_profiles(
    model_map: dict[str, str] | None = None,
    prompt_dir: str | Path | None = None,
) -> dict[AgentName, AgentProfile]:
    """Build the six shipped profiles.

    model_map remaps the tier placeholders (keys "large"/"small" or a specific
    agent name, which wins) to concrete backend model identifiers. prompt_dir
    overrides the packaged prompt templates with files named <agent>.txt.
    """
    model_map = model_map or {}
    profiles: dict[AgentName, AgentProfile] = {}
    for name, tier, temperature, rag_k, selection in _PROFILE_TABLE:
        model_id = model_map.get(name.value, model_map.get(tier, tier))
        if prompt_dir is not None:
            template = (Path(prompt_dir) / f"{name.value}.txt").read_text(
                encoding="utf-8"
            )
        else:
            template = _load_template(name)
        profiles[name] = AgentProfile(
            name=name,
            model_id=model_id,
            default_temperature=temperature,
            default_rag_k=rag_k,
            selection=selection,
            system_prompt_template=template,
        )
    return profiles


def save_profiles(profiles: dict[AgentName, AgentProfile], path: str | Path) -> None:
    """Round-trippable JSON dump, keyed by agent name."""
    payload = {name.value: profile.to_json() for name, profile in profiles.items()}
    Path(path).write_text(json.dumps(payload, indent=2), encoding="utf-8")


def load_profiles_json(path: str | Path) -> dict[AgentName, AgentProfile]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return {AgentName(key): AgentProfile.from_json(val) for key, val in payload.items()}


def with_model(profile: AgentProfile, model_id: str) -> AgentProfile:
    return replace(profile, model_id=model_id)
