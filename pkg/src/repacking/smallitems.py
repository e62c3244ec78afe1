"""Solver for instances with small items and enough average slack.

If every item is at most κ/α and the average slack is large enough, both
the source and the target can be reconfigured into the First-Fit-Decreasing
(FFD) configuration of the items. The solution is the source-side sequence
followed by the reverse of the target-side one.

Reaching FFD works in stages. Bunches are either FFD bunches, whose
contents are final, or general bunches. Each stage compresses the general
bunches first-fit, which is guaranteed to empty at least one of them. The
empty ones become FFD bunches, and general items are then poured into the
FFD bunches in decreasing order until the largest remaining item fits
nowhere. Across stages this replays a single global FFD run.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .core import (
    Configuration,
    Instance,
    LabeledState,
    ReconfigSequence,
    canonicalize,
    invert,
)
from .errors import DoesNotFit, InternalInvariantViolation, PreconditionViolated


class PreconditionStatus(enum.Enum):
    OK = "Ok"
    VIOLATED_SIZE = "ViolatedSize"
    VIOLATED_SLACK = "ViolatedSlack"


def slack_bound(capacity: int, alpha: int, n_bunches: int) -> Fraction:
    """Minimum average slack per bunch: κ/(α+1) + 3ακ/((α+1)n)."""
    return Fraction(capacity, alpha + 1) + Fraction(3 * alpha * capacity, (alpha + 1) * n_bunches)


def check_preconditions(inst: Instance, alpha: int) -> PreconditionStatus:
    if alpha < 2:
        raise ValueError("alpha must be an integer of at least 2")
    kappa, n = inst.capacity, inst.n_bunches
    if any(x * alpha > kappa for x in inst.universe):
        return PreconditionStatus.VIOLATED_SIZE
    slack_sum = kappa * n - sum(inst.universe)
    if Fraction(slack_sum, n) < slack_bound(kappa, alpha, n):
        return PreconditionStatus.VIOLATED_SLACK
    return PreconditionStatus.OK


def auto_alpha(inst: Instance) -> Optional[int]:
    """The largest integer α ≥ 2 with every item at most κ/α."""
    if not inst.universe:
        return None
    a = inst.capacity // max(inst.universe)
    return a if a >= 2 else None


def build_ffd(items: Iterable[int], capacity: int, n_bunches: int) -> Configuration:
    """First-Fit-Decreasing packing, padded with empty bunches."""
    bins: list[list[int]] = []
    room: list[int] = []
    for x in sorted(items, reverse=True):
        for i, r in enumerate(room):
            if r >= x:
                bins[i].append(x)
                room[i] -= x
                break
        else:
            if x > capacity:
                raise DoesNotFit(f"item {x} exceeds capacity {capacity}")
            bins.append([x])
            room.append(capacity - x)
    if len(bins) > n_bunches:
        raise DoesNotFit(f"FFD needs {len(bins)} bunches but only {n_bunches} exist")
    return canonicalize(bins + [[] for _ in range(n_bunches - len(bins))])


@dataclass
class StageState:
    """Working state of the FFD reconfiguration.

    general and ffd hold bunch labels of current; ffd is in creation order.
    """

    general: list[int]
    ffd: list[int]
    current: LabeledState
    alpha: int
    frozen: dict[int, tuple[int, ...]] = field(default_factory=dict)

    @property
    def log(self) -> ReconfigSequence:
        return self.current.sequence()

    def copy(self) -> "StageState":
        cur = LabeledState([], self.current.capacity)
        cur.bunches = [list(b) for b in self.current.bunches]
        cur.moves = list(self.current.moves)
        cur.raw = list(self.current.raw)
        return StageState(list(self.general), list(self.ffd), cur, self.alpha, dict(self.frozen))


def compression_phase(state: StageState, capacity: int) -> StageState:
    """First-fit each general item into an earlier-processed general bunch."""
    s = state.copy()
    cur = s.current
    order = [l for l in cur.canonical_order() if l in set(s.general)]
    done: list[int] = []
    for l in order:
        for x in sorted(cur.bunches[l], reverse=True):
            for d in done:
                if cur.slack(d) >= x:
                    cur.move(x, l, d)
                    break
        done.append(l)
    loose = [
        l for l in s.general if cur.bunches[l] and cur.slack(l) * (s.alpha + 1) > capacity
    ]
    if len(loose) > 2:
        raise InternalInvariantViolation(
            f"{len(loose)} non-empty general bunches have slack above κ/(α+1) after compression"
        )
    return s


def ffd_retrieval_phase(state: StageState, capacity: int) -> StageState:
    """Turn empty general bunches into FFD bunches and pour items into them."""
    s = state.copy()
    cur = s.current
    empties = [l for l in s.general if not cur.bunches[l]]
    s.general = [l for l in s.general if cur.bunches[l]]
    s.ffd.extend(empties)
    while True:
        holders = [l for l in cur.canonical_order() if l in set(s.general) and cur.bunches[l]]
        if not holders:
            break
        x = max(cur.bunches[l][0] for l in holders)
        src = next(l for l in holders if cur.bunches[l][0] == x)
        dst = next((f for f in s.ffd if cur.slack(f) >= x), None)
        if dst is None:
            break
        cur.move(x, src, dst)
    s.general = [l for l in s.general if cur.bunches[l]] + [l for l in s.general if not cur.bunches[l]]
    return s


@dataclass(frozen=True)
class FfdRun:
    sequence: ReconfigSequence
    stages: int
    final: Configuration


def reconfigure_to_ffd(c: Configuration, capacity: int, alpha: int) -> FfdRun:
    """Move from c to the FFD configuration of its items, stage by stage."""
    c = canonicalize(c)
    n = len(c)
    goal = build_ffd([x for b in c for x in b], capacity, n)
    if c == goal:
        return FfdRun(ReconfigSequence(), 0, c)
    state = StageState(list(range(n)), [], LabeledState(c, capacity), alpha)
    stages = 0
    while any(state.current.bunches[l] for l in state.general):
        stages += 1
        if stages > n:
            raise InternalInvariantViolation("more stages than bunches")
        for l, content in state.frozen.items():
            if Counter(content) - Counter(state.current.bunches[l]):
                raise InternalInvariantViolation(f"an item left FFD bunch {l}")
        state = compression_phase(state, capacity)
        if not any(not state.current.bunches[l] for l in state.general):
            raise InternalInvariantViolation("no empty general bunch after compression")
        before = len(state.ffd)
        state = ffd_retrieval_phase(state, capacity)
        if len(state.ffd) <= before:
            raise InternalInvariantViolation("stage did not create an FFD bunch")
        state.frozen = {l: tuple(state.current.bunches[l]) for l in state.ffd}
    final = state.current.configuration()
    if final != goal:
        raise InternalInvariantViolation("stages did not end in the FFD configuration")
    return FfdRun(state.current.sequence(), stages, final)


def solve_small_items(inst: Instance, alpha: int) -> ReconfigSequence:
    status = check_preconditions(inst, alpha)
    if status is not PreconditionStatus.OK:
        raise PreconditionViolated(f"small-items preconditions fail: {status.value}")
    forward = reconfigure_to_ffd(inst.source, inst.capacity, alpha)
    backward = reconfigure_to_ffd(inst.target, inst.capacity, alpha)
    if forward.final != backward.final:
        raise InternalInvariantViolation("source and target reach different FFD configurations")
    return forward.sequence + invert(list(backward.sequence), inst.target, inst.capacity)
