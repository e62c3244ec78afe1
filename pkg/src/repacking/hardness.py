"""Generators for hard repacking instances, built from bin packing.

A bin packing instance (sizes z, m bins, bin size α) is first normalized to
a restricted form with α ≥ max z, α ≥ 2 and n ≥ 2m+2, then encoded as a
repacking instance with κ = 2(n−m)α:

* one "matching" bunch {z_i, κ−α} per size,
* {κ/2, κ/2} and {κ/2−1, α×(n−m)} in the source,
* {κ/2−1, κ/2} and {κ/2, α×(n−m)} in the target.

The only way to swap a κ/2 for the κ/2−1 is to park the n−m α-items
somewhere, which requires packing the z items into at most m matching
bunches. witness_sequence builds that sequence from a packing certificate.

Only the forward direction (packing ⇒ reachable) is checked
constructively. The converse is not searched for: the state spaces are
far too large for exhaustive search.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .core import Instance, LabeledState, ReconfigSequence
from .errors import BudgetExceeded, InvalidCertificate, InvariantViolated

Certificate = list[list[int]]

DEFAULT_BRUTE_MAX_N = 16


@dataclass(frozen=True)
class BinPackingInstance:
    sizes: tuple[int, ...]
    m: int
    alpha: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "sizes", tuple(self.sizes))
        if any(z < 1 for z in self.sizes) or self.m < 1 or self.alpha < 1:
            raise ValueError("sizes, m and alpha must be positive")

    @property
    def n(self) -> int:
        return len(self.sizes)


@dataclass(frozen=True)
class RestrictedBPInstance(BinPackingInstance):
    def __post_init__(self) -> None:
        super().__post_init__()
        if self.sizes and self.alpha < max(self.sizes):
            raise InvariantViolated("alpha must be at least the largest size")
        if self.alpha < 2:
            raise InvariantViolated("alpha must be at least 2")
        if self.n < 2 * self.m + 2:
            raise InvariantViolated("n must be at least 2m+2")


YES_ANCHOR = RestrictedBPInstance((1, 1, 1, 1), 1, 4)
NO_ANCHOR = RestrictedBPInstance((1, 1, 1, 1), 1, 2)


class ReductionKind(enum.Enum):
    MAPPED = "mapped"
    TRIVIAL_YES = "trivial-yes"
    TRIVIAL_NO = "trivial-no"


@dataclass(frozen=True)
class Reduction:
    kind: ReductionKind
    instance: RestrictedBPInstance


def reduce_bp_to_rbp(bp: BinPackingInstance) -> Reduction:
    z, m, a, n = sorted(bp.sizes), bp.m, bp.alpha, bp.n
    if z and a < z[-1]:
        return Reduction(ReductionKind.TRIVIAL_NO, NO_ANCHOR)
    if m >= n:
        return Reduction(ReductionKind.TRIVIAL_YES, YES_ANCHOR)
    if m == n - 1:
        ok = z[0] + z[1] <= a
        return Reduction(ReductionKind.TRIVIAL_YES if ok else ReductionKind.TRIVIAL_NO,
                         YES_ANCHOR if ok else NO_ANCHOR)
    if a == 1:
        return Reduction(ReductionKind.TRIVIAL_NO, NO_ANCHOR)
    scale = 4 * m + 4
    ones = 2 * m + 2
    sizes = tuple(scale * x for x in bp.sizes) + (1,) * ones
    return Reduction(ReductionKind.MAPPED, RestrictedBPInstance(sizes, m, scale * a + ones))


def _check_restricted(r: BinPackingInstance) -> None:
    if not isinstance(r, RestrictedBPInstance):
        RestrictedBPInstance(r.sizes, r.m, r.alpha)


def capacity_of(r: RestrictedBPInstance) -> int:
    return 2 * (r.n - r.m) * r.alpha


def reduce_rbp_to_repacking(r: RestrictedBPInstance) -> Instance:
    _check_restricted(r)
    k = capacity_of(r)
    a, free = r.alpha, r.n - r.m
    matching = [[z, k - a] for z in r.sizes]
    source = matching + [[k // 2, k // 2], [k // 2 - 1] + [a] * free]
    target = matching + [[k // 2 - 1, k // 2], [k // 2] + [a] * free]
    return Instance(k, source, target)


def check_certificate(bp: BinPackingInstance, cert: Certificate) -> None:
    flat = sorted(i for part in cert for i in part)
    if flat != list(range(bp.n)):
        raise InvalidCertificate("certificate must use every size index exactly once")
    parts = [p for p in cert if p]
    if len(parts) > bp.m:
        raise InvalidCertificate(f"{len(parts)} parts exceed m={bp.m}")
    for p in parts:
        if sum(bp.sizes[i] for i in p) > bp.alpha:
            raise InvalidCertificate(f"part {p} sums above alpha={bp.alpha}")


def witness_sequence(r: RestrictedBPInstance, cert: Certificate) -> ReconfigSequence:
    """Reconfigure the reduced instance using a packing of the z items.

    Bunch labels 0..n-1 are the matching bunches, n is {κ/2, κ/2} and n+1
    is {κ/2−1, α...}. The sequence is a prefix (compress, park), one move
    of κ/2, and the prefix undone.
    """
    _check_restricted(r)
    check_certificate(r, cert)
    inst = reduce_rbp_to_repacking(r)
    k, a, n = inst.capacity, r.alpha, r.n
    bunches = [[z, k - a] for z in r.sizes] + [[k // 2, k // 2], [k // 2 - 1] + [a] * (n - r.m)]
    st = LabeledState(bunches, k)
    prefix: list[tuple[int, int, int]] = []

    def go(item: int, src: int, dst: int) -> None:
        st.move(item, src, dst)
        prefix.append((item, src, dst))

    for part in (p for p in cert if p):
        host = part[0]
        for i in part[1:]:
            go(r.sizes[i], i, host)
    free = [i for i in range(n) if not any(x != k - a for x in st.bunches[i])]
    if len(free) < n - r.m:
        raise InvariantViolated("compression freed too few matching bunches")
    for dst in free[: n - r.m]:
        go(a, n + 1, dst)
    st.move(k // 2, n, n + 1)
    for item, src, dst in reversed(prefix):
        st.move(item, dst, src if src != n + 1 else n)
    if st.configuration() != inst.target:
        raise InvariantViolated("witness did not reach the target")
    return st.sequence()


def bp_brute_force(bp: BinPackingInstance, max_n: int = DEFAULT_BRUTE_MAX_N) -> Optional[Certificate]:
    """A packing into at most m bins of size α, or None if none exists.

    Sizes are placed largest first; a size may open at most one new bin,
    and equal bins are tried once, which removes symmetric assignments.
    """
    if bp.n > max_n:
        raise BudgetExceeded(f"{bp.n} sizes exceed the brute-force limit {max_n}")
    order = sorted(range(bp.n), key=lambda i: -bp.sizes[i])
    if bp.sizes and max(bp.sizes) > bp.alpha:
        return None
    bins: list[list[int]] = []
    loads: list[int] = []

    def place(k: int) -> bool:
        if k == len(order):
            return True
        i = order[k]
        z = bp.sizes[i]
        tried: set[int] = set()
        for b in range(len(bins)):
            if loads[b] + z <= bp.alpha and loads[b] not in tried:
                tried.add(loads[b])
                bins[b].append(i)
                loads[b] += z
                if place(k + 1):
                    return True
                bins[b].pop()
                loads[b] -= z
        if len(bins) < bp.m:
            bins.append([i])
            loads.append(z)
            if place(k + 1):
                return True
            bins.pop()
            loads.pop()
        return False

    return [sorted(b) for b in bins] if place(0) else None
