"""Canonical JSON artifacts: stable serialization plus a config fingerprint.

Every artifact the command line writes carries the seed it was produced
with and a sha256 hash of its own configuration block, and contains no
timestamps, so re-running a command reproduces byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path


def _plain(obj):
    """Recursively convert numpy scalars/arrays and tuples to JSON-native types."""
    if hasattr(obj, "item") and not hasattr(obj, "__len__"):
        return obj.item()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def canonical_json(doc) -> str:
    return json.dumps(_plain(doc), sort_keys=True, separators=(",", ":"))


def config_hash(config) -> str:
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


def write_artifact(path, body: dict, config: dict, seed: int) -> None:
    """Write a JSON artifact stamped with its seed and configuration hash."""
    doc = dict(_plain(body))
    doc["seed"] = int(seed)
    doc["config_hash"] = config_hash(config)
    Path(path).write_text(canonical_json(doc) + "\n", encoding="utf-8")
