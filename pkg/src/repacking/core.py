"""Data model for repacking: bunches, configurations, moves and sequences.

A bunch is a multiset of positive integer item sizes and is stored as a
tuple sorted in non-increasing order. A configuration is a multiset of
bunches, stored as a tuple of bunches sorted in non-increasing
lexicographic order. Empty bunches are kept; in this order they sort last.
Two configurations are equal as multisets exactly when their canonical
tuples are equal, so canonical tuples double as hash keys for search.

Bunches are unlabeled, so a move names its donor and recipient by position
in the canonical form of the configuration it is applied to. When several
bunches are equal, the lowest such position is the canonical name of the
donor.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import (
    CapacityExceeded,
    IllegalBunch,
    IndexOutOfRange,
    InternalInvariantViolation,
    ItemNotInBunch,
    RejectedInstance,
)

Bunch = tuple[int, ...]
Configuration = tuple[Bunch, ...]

INT64_MAX = 2**63 - 1


def _check_size(x: object, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise RejectedInstance(f"{what} must be an integer, got {x!r}")
    if x < 1:
        raise RejectedInstance(f"{what} must be positive, got {x}")
    if x > INT64_MAX:
        raise RejectedInstance(f"{what} {x} does not fit in 64 bits")
    return x


def make_bunch(items: Iterable[int]) -> Bunch:
    """Validate item sizes and return them in canonical order."""
    return tuple(sorted((_check_size(x, "item size") for x in items), reverse=True))


def canonicalize(c: Iterable[Iterable[int]]) -> Configuration:
    return tuple(sorted((tuple(sorted(b, reverse=True)) for b in c), reverse=True))


def volume(b: Iterable[int]) -> int:
    return sum(b)


def slack(b: Iterable[int], capacity: int) -> int:
    s = capacity - volume(b)
    if s < 0:
        raise IllegalBunch(f"bunch {tuple(b)} exceeds capacity {capacity}")
    return s


def is_legal(c: Iterable[Iterable[int]], capacity: int) -> bool:
    return all(volume(b) <= capacity for b in c)


def underlying(c: Iterable[Iterable[int]]) -> tuple[int, ...]:
    """The multiset of all items of a configuration, non-increasing."""
    return tuple(sorted((x for b in c for x in b), reverse=True))


def total_slack(c: Configuration, capacity: int) -> int:
    return sum(slack(b, capacity) for b in c)


def remove_item(b: Bunch, item: int) -> Bunch:
    i = b.index(item)
    return b[:i] + b[i + 1 :]


def add_item(b: Bunch, item: int) -> Bunch:
    return tuple(sorted(b + (item,), reverse=True))


@dataclass(frozen=True)
class Move:
    item: int
    from_index: int
    to_index: int

    def to_json(self) -> dict:
        return {"item": self.item, "from": self.from_index, "to": self.to_index}


@dataclass(frozen=True)
class ReconfigSequence:
    moves: tuple[Move, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "moves", tuple(self.moves))

    def __len__(self) -> int:
        return len(self.moves)

    def __iter__(self):
        return iter(self.moves)

    def __add__(self, other: "ReconfigSequence") -> "ReconfigSequence":
        return ReconfigSequence(self.moves + other.moves)


@dataclass(frozen=True)
class Instance:
    """A repacking instance. Construction validates and canonicalizes.

    Any violation raises RejectedInstance: a malformed instance is not a
    no-instance.
    """

    capacity: int
    source: Configuration
    target: Configuration

    def __post_init__(self) -> None:
        cap = _check_size(self.capacity, "capacity")
        src = canonicalize(make_bunch(b) for b in self.source)
        tgt = canonicalize(make_bunch(b) for b in self.target)
        if len(src) != len(tgt):
            raise RejectedInstance(
                f"source has {len(src)} bunches but target has {len(tgt)}"
            )
        if sum(underlying(src)) > INT64_MAX:
            raise RejectedInstance("total volume does not fit in 64 bits")
        for name, conf in (("source", src), ("target", tgt)):
            for b in conf:
                if volume(b) > cap:
                    raise RejectedInstance(
                        f"{name} bunch {list(b)} has volume {volume(b)} > capacity {cap}"
                    )
        if underlying(src) != underlying(tgt):
            raise RejectedInstance("source and target hold different items")
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "target", tgt)

    @property
    def universe(self) -> tuple[int, ...]:
        return underlying(self.source)

    @property
    def n_bunches(self) -> int:
        return len(self.source)


def apply_move(c: Configuration, m: Move, capacity: int) -> Configuration:
    """Apply one move to a canonical configuration; returns the canonical result."""
    n = len(c)
    if not (0 <= m.from_index < n and 0 <= m.to_index < n):
        raise IndexOutOfRange(f"move {m} on a configuration of {n} bunches")
    if m.from_index == m.to_index:
        raise IndexOutOfRange(f"move {m} has equal donor and recipient")
    donor, recipient = c[m.from_index], c[m.to_index]
    if m.item not in donor:
        raise ItemNotInBunch(f"item {m.item} not in bunch {list(donor)}")
    if volume(recipient) + m.item > capacity:
        raise CapacityExceeded(
            f"moving {m.item} into {list(recipient)} exceeds capacity {capacity}"
        )
    out = list(c)
    out[m.from_index] = remove_item(donor, m.item)
    out[m.to_index] = add_item(recipient, m.item)
    return canonicalize(out)


def canonical_move(
    c: Configuration, item: int, donor: Bunch, recipient: Bunch
) -> Move:
    """Name a move by canonical positions, given donor and recipient contents."""
    i = c.index(donor)
    if recipient == donor:
        if i + 1 >= len(c) or c[i + 1] != donor:
            raise ValueError("donor and recipient are the same bunch")
        j = i + 1
    else:
        j = c.index(recipient)
    return Move(item, i, j)


def are_adjacent(
    c1: Configuration, c2: Configuration, capacity: int
) -> Optional[Move]:
    """A witness move turning c1 into c2, or None if they are not adjacent."""
    c1, c2 = canonicalize(c1), canonicalize(c2)
    if len(c1) != len(c2) or c1 == c2:
        return None
    k1, k2 = Counter(c1), Counter(c2)
    old = sorted((k1 - k2).elements(), reverse=True)
    new = sorted((k2 - k1).elements(), reverse=True)
    if len(old) != 2 or len(new) != 2:
        return None
    want = sorted(new, reverse=True)
    for donor, recipient in ((old[0], old[1]), (old[1], old[0])):
        for item in set(donor):
            if volume(recipient) + item > capacity:
                continue
            got = sorted([remove_item(donor, item), add_item(recipient, item)], reverse=True)
            if got == want:
                return canonical_move(c1, item, donor, recipient)
    return None


def replay(
    source: Configuration, seq: Iterable[Move], capacity: int
) -> list[Configuration]:
    """All configurations visited by a sequence, starting with the source."""
    states = [canonicalize(source)]
    for m in seq:
        states.append(apply_move(states[-1], m, capacity))
    return states


def invert(seq: Sequence[Move], source: Configuration, capacity: int) -> ReconfigSequence:
    """The sequence that walks back from the end of seq to source.

    Canonical indices depend on the configuration they are applied to, so
    each inverse is derived from the replayed states rather than by swapping
    indices.
    """
    states = replay(source, seq, capacity)
    back = []
    for before, after in zip(reversed(states[:-1]), reversed(states[1:])):
        m = are_adjacent(after, before, capacity)
        if m is None:
            raise InternalInvariantViolation("a replayed step has no inverse")
        back.append(m)
    return ReconfigSequence(back)


class VerifyStatus(enum.Enum):
    OK = "OK"
    FAIL_ILLEGAL = "FailIllegal"
    FAIL_TARGET_MISMATCH = "FailTargetMismatch"


@dataclass(frozen=True)
class VerifyReport:
    status: VerifyStatus
    step: Optional[int] = None
    reason: str = ""
    final: Configuration = field(default=(), compare=False)

    @property
    def ok(self) -> bool:
        return self.status is VerifyStatus.OK


def verify_sequence(inst: Instance, seq: Iterable[Move]) -> VerifyReport:
    """Replay seq from the source and check every step and the endpoint."""
    cur = inst.source
    for step, m in enumerate(seq):
        try:
            nxt = apply_move(cur, m, inst.capacity)
        except (IndexOutOfRange, ItemNotInBunch, CapacityExceeded) as e:
            return VerifyReport(VerifyStatus.FAIL_ILLEGAL, step, str(e), cur)
        if nxt == cur:
            return VerifyReport(
                VerifyStatus.FAIL_ILLEGAL,
                step,
                "move leaves the configuration unchanged, so it is not a step",
                cur,
            )
        cur = nxt
    if cur != inst.target:
        return VerifyReport(
            VerifyStatus.FAIL_TARGET_MISMATCH, None, "final configuration is not the target", cur
        )
    return VerifyReport(VerifyStatus.OK, None, "", cur)


class LabeledState:
    """Mutable working copy of a configuration whose bunches keep identities.

    Solvers reason about particular bunches across many moves. This class
    lets them address bunches by a stable label while it records each move
    under canonical positions. A move between two bunches whose contents
    make the result equal to the current configuration is applied to the
    labels but not recorded, since it is not a step.
    """

    def __init__(self, bunches: Iterable[Iterable[int]], capacity: int):
        self.capacity = capacity
        self.bunches: list[list[int]] = [sorted(b, reverse=True) for b in bunches]
        self.moves: list[Move] = []
        self.raw: list[tuple[int, int, int]] = []

    def __len__(self) -> int:
        return len(self.bunches)

    def content(self, label: int) -> Bunch:
        return tuple(self.bunches[label])

    def volume(self, label: int) -> int:
        return sum(self.bunches[label])

    def slack(self, label: int) -> int:
        return self.capacity - sum(self.bunches[label])

    def configuration(self) -> Configuration:
        return canonicalize(self.bunches)

    def canonical_order(self) -> list[int]:
        """Labels sorted as their bunches appear in canonical order."""
        return sorted(range(len(self.bunches)), key=lambda i: (tuple(self.bunches[i]), -i), reverse=True)

    def move(self, item: int, src: int, dst: int) -> None:
        if src == dst:
            raise InternalInvariantViolation("move with equal donor and recipient")
        donor, recipient = self.bunches[src], self.bunches[dst]
        if item not in donor:
            raise ItemNotInBunch(f"item {item} not in bunch {donor}")
        if sum(recipient) + item > self.capacity:
            raise CapacityExceeded(f"moving {item} into {recipient} exceeds {self.capacity}")
        before = self.configuration()
        m = canonical_move(before, item, tuple(donor), tuple(recipient))
        donor.remove(item)
        recipient.append(item)
        recipient.sort(reverse=True)
        self.raw.append((item, src, dst))
        if self.configuration() != before:
            self.moves.append(m)

    def sequence(self) -> ReconfigSequence:
        return ReconfigSequence(self.moves)
