"""Generation agents: profiles, prompts, backends, extraction, testbenches."""

from .backends import (
    DEFAULT_MAX_TOKENS,
    ENV_KEY,
    ENV_URL,
    CompletionRequest,
    CompletionResult,
    HttpBackend,
    MockBackend,
    ScriptExhausted,
    TransportError,
    estimate_tokens,
)
from .extraction import ExtractionFailed, extract_code
from .profiles import (
    AgentName,
    AgentProfile,
    SelectionMode,
    load_profiles,
    load_profiles_json,
    save_profiles,
    with_model,
)
from .prompting import (
    GenerationResult,
    build_prompt,
    format_error_feedback,
    run_generation,
)
from .testbench import (
    PortMismatch,
    TestbenchNonCompliant,
    adapt_testbench,
    check_testbench,
    generate_testbench,
)

__all__ = [
    "DEFAULT_MAX_TOKENS",
    "ENV_KEY",
    "ENV_URL",
    "AgentName",
    "AgentProfile",
    "CompletionRequest",
    "CompletionResult",
    "ExtractionFailed",
    "GenerationResult",
    "HttpBackend",
    "MockBackend",
    "PortMismatch",
    "ScriptExhausted",
    "SelectionMode",
    "TestbenchNonCompliant",
    "TransportError",
    "adapt_testbench",
    "build_prompt",
    "check_testbench",
    "estimate_tokens",
    "extract_code",
    "format_error_feedback",
    "generate_testbench",
    "load_profiles",
    "load_profiles_json",
    "run_generation",
    "save_profiles",
    "with_model",
]
