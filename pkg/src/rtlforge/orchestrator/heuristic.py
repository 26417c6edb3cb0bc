"""Rule-based fallback policy, used for warm-start and as a planner option.

The rule table ships as data (``data/heuristic_rules.json``): an ordered
list of (predicate, action) pairs, first match wins. Predicates are
implemented here by name and read the encoded state vector through the
published layout, so the heuristic sees exactly what the network sees.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .actions import OrchestrationAction
from .state import feature_index

_ERROR_SLICE = slice(feature_index("errors_syntax"), feature_index("errors_other") + 1)


def _has_report(v: np.ndarray) -> bool:
    base = feature_index("stage_none")
    return bool(np.any(v[base:base + 4] > 0))


def _stage(v: np.ndarray) -> int:
    base = feature_index("stage_none")
    hot = v[base:base + 4]
    return int(np.argmax(hot)) if np.any(hot > 0) else 0


def _predicate(name: str, v: np.ndarray, params: dict) -> bool:
    if name == "has_errors":
        return float(np.sum(v[_ERROR_SLICE])) > 0 and _stage(v) < 1
    if name == "sim_failing":
        return _stage(v) == 1 and v[feature_index("sim_passed")] == 0
    if name == "synth_warnings":
        return _stage(v) >= 2 and (
            v[feature_index("errors_inferred_latch")] > 0
            or v[feature_index("errors_other")] > 0
        )
    if name == "first_iteration_complex":
        return (
            v[feature_index("iteration")] == 0
            and not _has_report(v)
            and v[feature_index("complexity")] >= params.get("min_complexity", 0.5)
        )
    if name == "first_iteration_simple":
        return v[feature_index("iteration")] == 0 and not _has_report(v)
    if name == "default":
        return True
    raise ValueError(f"unknown heuristic predicate {name!r}")


@lru_cache(maxsize=4)
def load_rules(path: Optional[str] = None) -> tuple[dict, ...]:
    if path is None:
        raw = resources.files("rtlforge.data").joinpath("heuristic_rules.json").read_text()
    else:
        raw = Path(path).read_text()
    rules = tuple(json.loads(raw))
    if not rules or rules[-1]["predicate"] != "default":
        raise ValueError("heuristic rule table must end with the default rule")
    return rules


def heuristic_policy(state: np.ndarray, rules: Optional[tuple[dict, ...]] = None) -> OrchestrationAction:
    state = np.asarray(state)
    if rules is None:
        rules = load_rules()
    for rule in rules:
        if _predicate(rule["predicate"], state, rule.get("params", {})):
            a = rule["action"]
            return OrchestrationAction(
                agent=a["agent"],
                focus=a["focus"],
                temperature=a["temperature"],
                token_budget=a["token_budget"],
                rag_depth=a["rag_depth"],
                retry_budget=a["retry_budget"],
            )
    raise AssertionError("unreachable: default rule always matches")
