"""JSON report envelope shared by every CLI subcommand."""

from __future__ import annotations

import math

SCHEMA_ID = "hypersparse/1"

_num = {"type": ["number", "null"]}
_int = {"type": "integer"}

SPARSIFY_RESULT = {
    "type": "object",
    "required": ["n", "m", "size", "output"],
    "properties": {
        "n": _int,
        "m": _int,
        "size": _int,
        "directed": {"type": "boolean"},
        "levels": {"type": "array"},
        "bands": {"type": "array"},
        "checks": {"type": "object", "additionalProperties": {"type": "boolean"}},
        "output": {"type": ["string", "null"]},
    },
}

QUALITY_RESULT = {
    "type": "object",
    "required": ["epsilon", "size", "parent_size", "violations"],
    "properties": {
        "epsilon": {"type": "number"},
        "size": _int,
        "parent_size": _int,
        "violations": _int,
        "worst_deviation": _num,
        "cut_min_ratio": _num,
        "cut_max_ratio": _num,
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "command", "ok", "seed", "violations", "result"],
    "properties": {
        "schema": {"const": SCHEMA_ID},
        "command": {"type": "string"},
        "ok": {"type": "boolean"},
        "seed": {"type": ["integer", "null"]},
        "params": {"type": "object"},
        "violations": {"type": "array", "items": {"type": "string"}},
        "result": {"type": "object"},
    },
    "allOf": [
        {
            "if": {"properties": {"command": {"const": "sparsify"}}},
            "then": {"properties": {"result": SPARSIFY_RESULT}},
        },
        {
            "if": {"properties": {"command": {"const": "eval"}}},
            "then": {"properties": {"result": QUALITY_RESULT}},
        },
    ],
}


def clean(obj):
    """Make a report JSON-safe: numpy scalars to Python, non-finite floats to None."""
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    return obj


def envelope(command: str, result: dict, seed: int | None, violations=(), params: dict | None = None) -> dict:
    v = [str(x) for x in violations]
    return clean(
        {
            "schema": SCHEMA_ID,
            "command": command,
            "ok": not v,
            "seed": seed,
            "params": params or {},
            "violations": v,
            "result": result,
        }
    )
