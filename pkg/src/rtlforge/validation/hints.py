"""Fix-hint lookup keyed by (design category, error category).

The shipped database covers the recurring failure modes per design family;
anything unkeyed falls back to the generic hints for the error category.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional

from ..specs import DesignCategory
from .report import ErrorCategory


@lru_cache(maxsize=4)
def load_hint_database(path: Optional[str] = None) -> dict[str, tuple[str, ...]]:
    if path is None:
        raw = resources.files("rtlforge.data").joinpath("fix_hints.json").read_text()
    else:
        raw = Path(path).read_text()
    data = json.loads(raw)
    db = {}
    for key, hints in data.items():
        design, _, error = key.partition(":")
        DesignCategory(design)  # validates the key halves
        ErrorCategory(error)
        db[key] = tuple(hints)
    return db


def fix_hints(
    design_category: DesignCategory,
    error_category: ErrorCategory,
    db_path: Optional[str] = None,
) -> tuple[str, ...]:
    """Hints for the pair; falls back to (unknown, error_category)."""
    db = load_hint_database(db_path)
    exact = db.get(f"{design_category.value}:{error_category.value}")
    if exact:
        return exact
    return db.get(f"{DesignCategory.UNKNOWN.value}:{error_category.value}", ())
