"""Canonical JSON rendering: sorted keys, two-space indent, LF, trailing newline.

Every persisted document and every API response body goes through this one
function so byte-level comparisons (store round-trips, CLI/API agreement)
are meaningful. Floats rely on Python's shortest round-trip repr.
"""

from __future__ import annotations

import json


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
