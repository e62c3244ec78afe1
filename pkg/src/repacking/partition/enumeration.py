"""Enumeration of bunch types and small subconfigurations."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from ..core import Bunch, Configuration, are_adjacent
from ..errors import ExplosionGuard

SubConfig = Configuration


@dataclass(frozen=True)
class Guards:
    max_bin_types: int = 50_000
    max_subs: int = 200_000
    max_edges: int = 5_000_000


DEFAULT_GUARDS = Guards()


def enum_bin_types(universe: Iterable[int], capacity: int, guards: Guards = DEFAULT_GUARDS) -> list[Bunch]:
    """Every bunch of volume at most κ over the distinct sizes of the universe.

    Multiplicities are not limited by how many copies the universe holds.
    The result is in canonical order, so the empty bunch is last.
    """
    alphabet = sorted(set(universe), reverse=True)
    out: list[Bunch] = []

    def grow(prefix: list[int], start: int, room: int) -> None:
        out.append(tuple(prefix))
        if len(out) > guards.max_bin_types:
            raise ExplosionGuard(f"more than {guards.max_bin_types} bunch types")
        for k in range(start, len(alphabet)):
            x = alphabet[k]
            if x <= room:
                prefix.append(x)
                grow(prefix, k, room - x)
                prefix.pop()

    grow([], 0, capacity)
    return sorted(out, reverse=True)


def enum_beta_subs(
    universe: Iterable[int], capacity: int, beta: int, guards: Guards = DEFAULT_GUARDS
) -> list[SubConfig]:
    """Every multiset of 1..β bunch types whose items fit inside the universe."""
    if beta < 1:
        raise ValueError("beta must be positive")
    avail = Counter(universe)
    types = enum_bin_types(avail.elements(), capacity, guards)
    need = [Counter(t) for t in types]
    out: list[SubConfig] = []

    def grow(prefix: list[Bunch], start: int, left: Counter) -> None:
        if prefix:
            out.append(tuple(prefix))
            if len(out) > guards.max_subs:
                raise ExplosionGuard(f"more than {guards.max_subs} subconfigurations")
        if len(prefix) == beta:
            return
        for k in range(start, len(types)):
            if all(left[x] >= c for x, c in need[k].items()):
                prefix.append(types[k])
                grow(prefix, k, left - need[k])
                prefix.pop()

    grow([], 0, avail)
    return out


def subconfig_adjacent(D: SubConfig, E: SubConfig, capacity: int) -> bool:
    return are_adjacent(D, E, capacity) is not None
