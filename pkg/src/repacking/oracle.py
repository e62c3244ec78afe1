"""Exhaustive breadth-first search over the configuration graph.

Only usable on small instances, where it is the ground truth every solver
is checked against. States are canonical configurations, so symmetric
arrangements of equal bunches collapse into one state.
"""

from __future__ import annotations

import enum
import os
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .core import (
    Configuration,
    Instance,
    Move,
    ReconfigSequence,
    add_item,
    canonicalize,
    remove_item,
    volume,
)

DEFAULT_MAX_STATES = 2_000_000
DEFAULT_MAX_MOVES_OUT = 1_000_000


@dataclass(frozen=True)
class SearchBudget:
    max_states: int = DEFAULT_MAX_STATES
    max_moves_out: int = DEFAULT_MAX_MOVES_OUT

    def __post_init__(self) -> None:
        if self.max_states < 1 or self.max_moves_out < 1:
            raise ValueError("search budgets must be positive")

    @classmethod
    def from_env(cls, max_states: Optional[int] = None) -> "SearchBudget":
        """Budget from an explicit value, else REPACK_MAX_STATES, else the default."""
        if max_states is None:
            env = os.environ.get("REPACK_MAX_STATES")
            max_states = int(env) if env else DEFAULT_MAX_STATES
        return cls(max_states=max_states)


class SearchStatus(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    BUDGET_EXCEEDED = "unknown-budget"


@dataclass(frozen=True)
class SearchResult:
    status: SearchStatus
    sequence: Optional[ReconfigSequence]
    explored: int

    @property
    def feasible(self) -> bool:
        return self.status is SearchStatus.FEASIBLE


def neighbors(c: Configuration, capacity: int) -> list[tuple[Move, Configuration]]:
    """Distinct configurations one move away from c, each with a witness move.

    Equal bunches are tried once as donor and once as recipient, so the
    witnesses use the lowest canonical index. Moves that canonicalize back
    to c are dropped.
    """
    c = canonicalize(c)
    seen: dict[Configuration, Move] = {}
    first: dict[tuple, int] = {}
    for i, b in enumerate(c):
        first.setdefault(b, i)
    for i, donor in enumerate(c):
        if first[donor] != i:
            continue
        for item in sorted(set(donor), reverse=True):
            smaller = remove_item(donor, item)
            for j, recipient in enumerate(c):
                if j == i:
                    continue
                if first[recipient] != j and not (recipient == donor and j == i + 1):
                    continue
                if volume(recipient) + item > capacity:
                    continue
                out = list(c)
                out[i] = smaller
                out[j] = add_item(recipient, item)
                nxt = canonicalize(out)
                if nxt != c and nxt not in seen:
                    seen[nxt] = Move(item, i, j)
    return [(m, nxt) for nxt, m in seen.items()]


def bfs_reachable(inst: Instance, budget: SearchBudget = SearchBudget()) -> SearchResult:
    """Shortest reconfiguration sequence from source to target, if any."""
    start, goal = inst.source, inst.target
    if start == goal:
        return SearchResult(SearchStatus.FEASIBLE, ReconfigSequence(), 1)
    parent: dict[Configuration, Optional[tuple[Configuration, Move]]] = {start: None}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        nbrs = neighbors(cur, inst.capacity)
        if len(nbrs) > budget.max_moves_out:
            return SearchResult(SearchStatus.BUDGET_EXCEEDED, None, len(parent))
        for m, nxt in nbrs:
            if nxt in parent:
                continue
            parent[nxt] = (cur, m)
            if nxt == goal:
                return SearchResult(SearchStatus.FEASIBLE, _path(parent, goal), len(parent))
            if len(parent) >= budget.max_states:
                return SearchResult(SearchStatus.BUDGET_EXCEEDED, None, len(parent))
            queue.append(nxt)
    return SearchResult(SearchStatus.INFEASIBLE, None, len(parent))


def _path(parent, goal: Configuration) -> ReconfigSequence:
    moves = []
    cur = goal
    while parent[cur] is not None:
        cur, m = parent[cur]
        moves.append(m)
    return ReconfigSequence(reversed(moves))


def reachable_set(
    start: Configuration, capacity: int, budget: SearchBudget = SearchBudget()
) -> Optional[set[Configuration]]:
    """The connected component of start, or None if it exceeds the budget."""
    start = canonicalize(start)
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for _, nxt in neighbors(cur, capacity):
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > budget.max_states:
                    return None
                queue.append(nxt)
    return seen
