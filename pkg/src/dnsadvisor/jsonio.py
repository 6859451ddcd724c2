"""Canonical JSON output: sorted keys, two-space indent, trailing newline.

Every exported artifact goes through here so repeated runs over the same
corpus produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path


def canonical_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(path: str | Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_dumps(obj), encoding="utf-8")
    return path
