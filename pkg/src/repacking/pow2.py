"""Solver for instances whose capacity and item sizes are all powers of two.

In this regime an instance is feasible exactly when the total slack is at
least the largest item size that has to move. The solver settles item
sizes from largest to smallest. For each size it pairs current bunches
with target bunches and fixes the count of that size in each pair, one
transfer at a time.

A transfer that cannot go directly into the deficient bunch first
compresses slack: slack is viewed as a set of slack items (the binary
digits of each bunch's slack), and duplicated small slack items in
different bunches are merged until some bunch has a slack item as large
as the size being settled. That bunch then serves as temporary storage.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import (
    Bunch,
    Configuration,
    Instance,
    LabeledState,
    Move,
    ReconfigSequence,
    canonicalize,
    slack as bunch_slack,
    total_slack,
)
from .errors import InternalInvariantViolation, NotPow2Instance, PreconditionViolated


def is_pow2(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


def log2(x: int) -> int:
    return x.bit_length() - 1


def require_pow2(inst: Instance) -> None:
    if not is_pow2(inst.capacity):
        raise NotPow2Instance(f"capacity {inst.capacity} is not a power of two")
    bad = sorted({x for x in inst.universe if not is_pow2(x)})
    if bad:
        raise NotPow2Instance(f"item sizes {bad} are not powers of two")


def is_pow2_instance(inst: Instance) -> bool:
    try:
        require_pow2(inst)
    except NotPow2Instance:
        return False
    return True


def at_least(b: Sequence[int], s: int) -> tuple[int, ...]:
    return tuple(sorted((x for x in b if x >= s), reverse=True))


def check_settled(
    s: int, C: Sequence[Sequence[int]], T: Sequence[Sequence[int]]
) -> Optional[list[tuple[int, int]]]:
    """A settling bijection for size s, or None if s is not settled.

    The bijection pairs every bunch of C holding an item of size at least s
    with a bunch of T that has the same items of size at least s. Bunches
    with no such item are left out; any pairing of them works. Sizes are
    handled in increasing order, and at size u the unpaired bunches holding
    u are matched by their items of size at least u.
    """
    sizes = sorted({x for b in C for x in b if x >= s} | {x for b in T for x in b if x >= s})
    done_c: set[int] = set()
    done_t: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for u in sizes:
        gc: dict[tuple, list[int]] = defaultdict(list)
        gt: dict[tuple, list[int]] = defaultdict(list)
        for i, b in enumerate(C):
            if i not in done_c and u in b:
                gc[at_least(b, u)].append(i)
        for j, b in enumerate(T):
            if j not in done_t and u in b:
                gt[at_least(b, u)].append(j)
        if set(gc) != set(gt) or any(len(gc[k]) != len(gt[k]) for k in gc):
            return None
        for k in gc:
            pairs.extend(zip(gc[k], gt[k]))
            done_c.update(gc[k])
            done_t.update(gt[k])
    return sorted(pairs)


def largest_unsettled(C: Sequence[Sequence[int]], T: Sequence[Sequence[int]]) -> Optional[int]:
    """The largest item size that is not settled, or None when C equals T."""
    sizes = sorted({x for b in C for x in b} | {x for b in T for x in b}, reverse=True)
    for u in sizes:
        if check_settled(u, C, T) is None:
            return u
    return None


def slack_items(b: Sequence[int], capacity: int) -> list[int]:
    """The binary decomposition of a bunch's slack, largest first."""
    s = bunch_slack(b, capacity)
    return [1 << q for q in range(s.bit_length() - 1, -1, -1) if s >> q & 1]


@dataclass(frozen=True)
class Element:
    size: int
    is_slack: bool

    def __repr__(self) -> str:
        return f"{self.size}{'_' if self.is_slack else ''}"


@dataclass(frozen=True)
class Bundle:
    elements: tuple[Element, ...]

    @property
    def bsum(self) -> int:
        return sum(e.size for e in self.elements)

    @property
    def actual_items(self) -> list[int]:
        return [e.size for e in self.elements if not e.is_slack]

    @property
    def slack_sizes(self) -> list[int]:
        return [e.size for e in self.elements if e.is_slack]


def all_elements(b: Sequence[int], capacity: int) -> list[Element]:
    """Actual and slack items, largest first, slack before actual on ties."""
    elems = [Element(x, False) for x in b] + [Element(x, True) for x in slack_items(b, capacity)]
    return sorted(elems, key=lambda e: (e.size, e.is_slack), reverse=True)


def bundle_list(b: Sequence[int], p: int, capacity: int) -> list[Bundle]:
    """Every bundle after merging equal-bsum pairs at levels 0 .. p-1, in creation order."""
    if not (1 << p) < capacity:
        raise PreconditionViolated(f"bundle size 2^{p} must be below the capacity {capacity}")
    elems = all_elements(b, capacity)
    if not any(e.size <= 1 << p for e in elems):
        raise PreconditionViolated(f"no actual or slack item of size at most 2^{p}")
    bundles = [Bundle((e,)) for e in elems]
    for i in range(p):
        target = 1 << i
        while True:
            found = [k for k, bd in enumerate(bundles) if bd.bsum == target][:2]
            if len(found) < 2:
                break
            first, second = bundles[found[0]], bundles[found[1]]
            del bundles[found[1]]
            del bundles[found[0]]
            bundles.append(Bundle(first.elements + second.elements))
    return bundles


def form_bundles(b: Sequence[int], p: int, capacity: int) -> tuple[Bundle, Bundle]:
    """Two disjoint bundles of bsum 2^p drawn from the actual and slack items of b."""
    hits = [bd for bd in bundle_list(b, p, capacity) if bd.bsum == 1 << p]
    if len(hits) < 2:
        raise InternalInvariantViolation(f"fewer than two bundles of bsum 2^{p} in {list(b)}")
    return hits[0], hits[1]


def _merge_slack(st: LabeledState, l1: int, l2: int, q: int) -> list[int]:
    first, second = form_bundles(st.content(l1), q, st.capacity)
    chosen = first if first.actual_items else second
    for x in chosen.actual_items:
        st.move(x, l1, l2)
    return chosen.actual_items


def merge_slack(
    c: Configuration, b1: int, b2: int, q: int, capacity: int
) -> tuple[Configuration, list[Move]]:
    """Shift the actual items of one bsum-2^q bundle of c[b1] into c[b2].

    Both bunches must have a slack item of size 2^q. Afterwards their two
    slack items of that size have merged into a larger one.
    """
    c = canonicalize(c)
    for i in (b1, b2):
        if not (bunch_slack(c[i], capacity) >> q) & 1:
            raise PreconditionViolated(f"bunch {list(c[i])} has no slack item of size 2^{q}")
    st = LabeledState(c, capacity)
    _merge_slack(st, b1, b2, q)
    return st.configuration(), list(st.moves)


@dataclass(frozen=True)
class Pow2Verdict:
    feasible: bool
    ell: Optional[int]
    total_slack: int


def pow2_feasible(inst: Instance) -> Pow2Verdict:
    """Feasible iff the total slack covers the largest unsettled item size."""
    require_pow2(inst)
    ell = largest_unsettled(inst.source, inst.target)
    slack_total = total_slack(inst.source, inst.capacity)
    return Pow2Verdict(ell is None or slack_total >= ell, ell, slack_total)


@dataclass
class SettleStats:
    stages_run: int = 0
    transfers: int = 0
    direct_transfers: int = 0
    merges: int = 0
    storage_in_surplus: int = 0


class _Settler:
    def __init__(self, inst: Instance):
        self.inst = inst
        self.kappa = inst.capacity
        self.target = list(inst.target)
        self.st = LabeledState(inst.source, inst.capacity)
        self.stats = SettleStats()

    def current(self) -> list[Bunch]:
        return [self.st.content(l) for l in range(len(self.st))]

    def run(self) -> ReconfigSequence:
        sizes = sorted(set(self.inst.universe), reverse=True)
        for i, u in enumerate(sizes):
            cur = self.current()
            for v in sizes[:i]:
                if check_settled(v, cur, self.target) is None:
                    raise InternalInvariantViolation(f"size {v} unsettled at the start of the stage for {u}")
            ell = largest_unsettled(cur, self.target)
            if ell is None:
                break
            if ell < u:
                continue
            self.stats.stages_run += 1
            self.stage(i, sizes)
        if self.st.configuration() != self.inst.target:
            raise InternalInvariantViolation("settling ended away from the target")
        return self.st.sequence()

    def mapping(self, i: int, sizes: list[int]) -> list[tuple[int, int]]:
        u = sizes[i]
        cur = self.current()
        phi = [] if i == 0 else check_settled(sizes[i - 1], cur, self.target)
        if phi is None:
            raise InternalInvariantViolation("previous size lost its settling bijection")
        used_c = {a for a, _ in phi}
        used_t = {b for _, b in phi}
        order = self.st.canonical_order()
        free_c = [l for l in order if l not in used_c]
        free_t = [j for j in range(len(self.target)) if j not in used_t]
        top_c = [l for l in free_c if cur[l] and cur[l][0] == u]
        top_t = [j for j in free_t if self.target[j] and self.target[j][0] == u]
        low_c = [l for l in free_c if not cur[l] or cur[l][0] < u]
        low_t = [j for j in free_t if not self.target[j] or self.target[j][0] < u]
        if len(top_c) < len(top_t):
            top_c += low_c[: len(top_t) - len(top_c)]
        else:
            top_t += low_t[: len(top_c) - len(top_t)]
        if len(top_c) != len(top_t):
            raise InternalInvariantViolation("not enough bunches to pad the mapping")
        return list(phi) + list(zip(top_c, top_t))

    def stage(self, i: int, sizes: list[int]) -> None:
        u = sizes[i]
        phi = dict(self.mapping(i, sizes))

        def surplus(l: int) -> int:
            return self.st.bunches[l].count(u) - self.target[phi[l]].count(u)

        while True:
            order = [l for l in self.st.canonical_order() if l in phi]
            givers = [l for l in order if surplus(l) > 0]
            takers = [l for l in order if surplus(l) < 0]
            if not givers and not takers:
                break
            if not givers or not takers:
                raise InternalInvariantViolation("unbalanced counts inside the mapping")
            self.transfer(u, givers[0], takers[0])
        for l, j in phi.items():
            if at_least(self.st.content(l), u) != at_least(self.target[j], u):
                raise InternalInvariantViolation(f"size {u} not settled after its stage")

    def compress(self, u: int) -> None:
        Q = log2(u)
        for _ in range(10**7):
            for q in range(Q):
                holders = [l for l in self.st.canonical_order() if (self.st.slack(l) >> q) & 1]
                if len(holders) >= 2:
                    moved = _merge_slack(self.st, holders[0], holders[1], q)
                    if any(x >= u for x in moved):
                        raise InternalInvariantViolation("merge moved an item not smaller than the size being settled")
                    self.stats.merges += 1
                    break
            else:
                break
        else:
            raise InternalInvariantViolation("slack compression did not terminate")
        if not any(self.st.slack(l) >= u for l in range(len(self.st))):
            raise InternalInvariantViolation(f"no bunch has slack {u} after compression")

    def transfer(self, u: int, bs: int, bd: int) -> None:
        st = self.st
        self.stats.transfers += 1
        if st.slack(bd) < u:
            self.compress(u)
        mark = len(st.raw)
        via_surplus = False
        if st.slack(bd) >= u:
            self.stats.direct_transfers += 1
            st.move(u, bs, bd)
        else:
            roomy = [l for l in st.canonical_order() if st.slack(l) >= u]
            temp = next((l for l in roomy if l != bs), bs)
            if temp == bd:
                raise InternalInvariantViolation("deficient bunch chosen as storage")
            b1, b2 = form_bundles(st.content(bd), log2(u) - 1, self.kappa)
            if temp != bs:
                st.move(u, bs, temp)
                for x in b1.actual_items + b2.actual_items:
                    st.move(x, bd, bs)
                st.move(u, temp, bd)
            else:
                # The surplus bunch itself is the only one with room: it
                # takes the small items first and then releases u.
                self.stats.storage_in_surplus += 1
                via_surplus = True
                for x in b1.actual_items + b2.actual_items:
                    st.move(x, bd, bs)
                st.move(u, bs, bd)
        self._check_transfer_log(st.raw[mark:], u, bs, bd, via_surplus)

    @staticmethod
    def _check_transfer_log(log, u: int, bs: int, bd: int, via_surplus: bool) -> None:
        if not log:
            raise InternalInvariantViolation("transfer made no moves")
        first, last = log[0], log[-1]
        if last[0] != u or last[2] != bd:
            raise InternalInvariantViolation("transfer does not end by putting u into the deficient bunch")
        if any(x >= u for x, _, _ in log[1:-1]):
            raise InternalInvariantViolation("transfer moved a large item in its middle steps")
        if via_surplus:
            if last[1] != bs:
                raise InternalInvariantViolation("transfer takes u from the wrong bunch")
        elif first[0] != u or first[1] != bs:
            raise InternalInvariantViolation("transfer does not start by taking u out of the surplus bunch")


def settle_items(inst: Instance) -> ReconfigSequence:
    """A reconfiguration sequence for a feasible powers-of-two instance."""
    return settle_items_with_stats(inst)[0]


def settle_items_with_stats(inst: Instance) -> tuple[ReconfigSequence, SettleStats]:
    verdict = pow2_feasible(inst)
    if not verdict.feasible:
        raise PreconditionViolated(
            f"total slack {verdict.total_slack} is below the largest unsettled size {verdict.ell}"
        )
    s = _Settler(inst)
    seq = s.run()
    return seq, s.stats
