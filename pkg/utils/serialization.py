"""
Model: N/A (plumbing).
Purpose: Canonical JSON (sorted keys, fixed separators) and sha256 digests so that reports and
         manifests are byte-identical for identical inputs.
Dependencies: json, hashlib, numpy.
Ext Hooks: N/A.
"""

import hashlib
import json
from typing import Any

import numpy as np


def to_plain(value: Any) -> Any:
    """numpy scalars/arrays and tuples to JSON-native types, recursively."""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return {'re': value.real, 'im': value.imag}
    return value


def canonical_json(value: Any) -> str:
    return json.dumps(to_plain(value), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def pretty_json(value: Any) -> str:
    return json.dumps(to_plain(value), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def stable_hash(value: Any) -> str:
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()
