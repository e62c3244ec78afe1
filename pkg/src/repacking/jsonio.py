"""JSON encodings for instances, sequences and partitions.

Field order does not matter; unknown fields are rejected.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

from .core import Instance, Move, ReconfigSequence
from .errors import RejectedInstance

PathLike = Union[str, Path]


def _expect_keys(obj: Any, required: set[str], what: str) -> dict:
    if not isinstance(obj, dict):
        raise RejectedInstance(f"{what} must be a JSON object")
    keys = set(obj)
    if keys - required:
        raise RejectedInstance(f"{what} has unknown fields {sorted(keys - required)}")
    if required - keys:
        raise RejectedInstance(f"{what} is missing fields {sorted(required - keys)}")
    return obj


def _int(x: Any, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise RejectedInstance(f"{what} must be an integer")
    return x


def _configuration(x: Any, what: str) -> list[list[int]]:
    if not isinstance(x, list) or not all(isinstance(b, list) for b in x):
        raise RejectedInstance(f"{what} must be a list of lists of integers")
    return [[_int(v, f"{what} item") for v in b] for b in x]


def instance_from_obj(obj: Any) -> Instance:
    obj = _expect_keys(obj, {"capacity", "source", "target"}, "instance")
    return Instance(
        _int(obj["capacity"], "capacity"),
        _configuration(obj["source"], "source"),
        _configuration(obj["target"], "target"),
    )


def instance_to_obj(inst: Instance) -> dict:
    return {
        "capacity": inst.capacity,
        "source": [list(b) for b in inst.source],
        "target": [list(b) for b in inst.target],
    }


def sequence_from_obj(obj: Any) -> ReconfigSequence:
    obj = _expect_keys(obj, {"moves"}, "sequence")
    if not isinstance(obj["moves"], list):
        raise RejectedInstance("moves must be a list")
    moves = []
    for m in obj["moves"]:
        m = _expect_keys(m, {"item", "from", "to"}, "move")
        moves.append(Move(_int(m["item"], "item"), _int(m["from"], "from"), _int(m["to"], "to")))
    return ReconfigSequence(moves)


def sequence_to_obj(seq: ReconfigSequence) -> dict:
    return {"moves": [m.to_json() for m in seq]}


def partition_to_obj(parts) -> dict:
    return {"parts": [{"items": list(items), "bunches": k} for items, k in parts]}


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise RejectedInstance(f"malformed JSON: {e}") from e


def read_instance(path: PathLike) -> Instance:
    return instance_from_obj(loads(Path(path).read_text(encoding="utf-8")))


def read_sequence(path: PathLike) -> ReconfigSequence:
    return sequence_from_obj(loads(Path(path).read_text(encoding="utf-8")))


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True)
