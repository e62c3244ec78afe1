"""Reconfiguring bunches of items under a capacity bound, one item move at a time."""

from .core import (
    Configuration,
    Instance,
    Move,
    ReconfigSequence,
    VerifyReport,
    VerifyStatus,
    apply_move,
    are_adjacent,
    canonicalize,
    verify_sequence,
)
from .oracle import SearchBudget, SearchResult, SearchStatus, bfs_reachable

__all__ = [
    "Configuration",
    "Instance",
    "Move",
    "ReconfigSequence",
    "SearchBudget",
    "SearchResult",
    "SearchStatus",
    "VerifyReport",
    "VerifyStatus",
    "apply_move",
    "are_adjacent",
    "bfs_reachable",
    "canonicalize",
    "verify_sequence",
]
