import random
from collections import Counter

import pytest

from oracles import bin_packing_reference
from repacking.core import canonicalize, is_legal, replay, verify_sequence
from repacking.errors import BudgetExceeded, InvalidCertificate, InvariantViolated
from repacking.hardness import (
    NO_ANCHOR,
    YES_ANCHOR,
    BinPackingInstance,
    ReductionKind,
    RestrictedBPInstance,
    bp_brute_force,
    capacity_of,
    check_certificate,
    reduce_bp_to_rbp,
    reduce_rbp_to_repacking,
    witness_sequence,
)


def test_trivial_cases():
    assert reduce_bp_to_rbp(BinPackingInstance((3,), 2, 5)).kind is ReductionKind.TRIVIAL_YES
    assert reduce_bp_to_rbp(BinPackingInstance((5,), 1, 3)).kind is ReductionKind.TRIVIAL_NO
    assert reduce_bp_to_rbp(BinPackingInstance((1, 2, 3), 2, 3)).kind is ReductionKind.TRIVIAL_YES
    assert reduce_bp_to_rbp(BinPackingInstance((2, 2, 3), 2, 3)).kind is ReductionKind.TRIVIAL_NO
    assert reduce_bp_to_rbp(BinPackingInstance((1, 1, 1), 1, 1)).kind is ReductionKind.TRIVIAL_NO


def test_anchors():
    assert bp_brute_force(YES_ANCHOR) is not None
    assert bp_brute_force(NO_ANCHOR) is None
    assert reduce_bp_to_rbp(BinPackingInstance((3,), 2, 5)).instance == YES_ANCHOR


def test_mapped_example():
    red = reduce_bp_to_rbp(BinPackingInstance((2, 2, 2), 1, 2))
    assert red.kind is ReductionKind.MAPPED
    r = red.instance
    assert r.sizes == (16, 16, 16, 1, 1, 1, 1) and r.alpha == 20 and r.m == 1
    assert r.alpha >= max(r.sizes) and r.alpha >= 2 and r.n >= 2 * r.m + 2


def test_restricted_invariants():
    with pytest.raises(InvariantViolated):
        RestrictedBPInstance((5, 1, 1, 1), 1, 4)
    with pytest.raises(InvariantViolated):
        RestrictedBPInstance((1, 1, 1, 1), 1, 1)
    with pytest.raises(InvariantViolated):
        RestrictedBPInstance((1, 1, 1), 1, 2)


def test_repacking_example():
    inst = reduce_rbp_to_repacking(RestrictedBPInstance((1, 1, 1, 1), 1, 2))
    assert inst.capacity == 12
    assert inst.source == canonicalize([[1, 10]] * 4 + [[6, 6], [5, 2, 2, 2]])
    assert inst.target == canonicalize([[1, 10]] * 4 + [[6, 5], [6, 2, 2, 2]])
    assert is_legal(inst.source, 12) and is_legal(inst.target, 12)


def test_certificates():
    yes4 = RestrictedBPInstance((1, 1, 1, 1), 1, 4)
    inst = reduce_rbp_to_repacking(yes4)
    assert verify_sequence(inst, witness_sequence(yes4, [[0, 1, 2, 3]])).ok
    no2 = RestrictedBPInstance((1, 1, 1, 1), 1, 2)
    with pytest.raises(InvalidCertificate):
        witness_sequence(no2, [[0, 1], [2, 3]])
    with pytest.raises(InvalidCertificate):
        witness_sequence(no2, [[0, 1, 2, 3]])
    with pytest.raises(InvalidCertificate):
        check_certificate(no2, [[0, 1]])


def nonmatching_free(c, capacity):
    """Bunches that hold neither a κ/2 item nor a κ/2−1 item."""
    half = capacity // 2
    return sorted(b for b in c if half not in b and half - 1 not in b)


def test_witness_reverses_its_prefix():
    rng = random.Random(6)
    for _ in range(40):
        m = rng.randint(1, 2)
        n = rng.randint(2 * m + 2, 2 * m + 4)
        alpha = rng.randint(2, 6)
        sizes = tuple(rng.randint(1, alpha) for _ in range(n))
        r = RestrictedBPInstance(sizes, m, alpha)
        cert = bp_brute_force(r)
        if cert is None:
            continue
        inst = reduce_rbp_to_repacking(r)
        seq = list(witness_sequence(r, cert))
        assert len(seq) % 2 == 1
        p = len(seq) // 2
        assert seq[p].item == inst.capacity // 2
        # compression moves one item per extra member of each part, parking one α per freed bunch
        assert p == (n - len([c for c in cert if c])) + (n - m)
        chain = replay(inst.source, seq, inst.capacity)
        for k in range(p):
            assert seq[p + 1 + k].item == seq[p - 1 - k].item
        for j in range(p + 1):
            assert nonmatching_free(chain[p - j], inst.capacity) == nonmatching_free(chain[p + 1 + j], inst.capacity)


def test_bp_brute_force_examples():
    cert = bp_brute_force(BinPackingInstance((2, 2, 2), 2, 4))
    assert cert is not None
    check_certificate(BinPackingInstance((2, 2, 2), 2, 4), cert)
    assert bp_brute_force(BinPackingInstance((3, 3), 1, 5)) is None
    assert bp_brute_force(BinPackingInstance((), 3, 1)) == []
    with pytest.raises(BudgetExceeded):
        bp_brute_force(BinPackingInstance((1,) * 20, 2, 10))


def test_bp_brute_force_matches_reference():
    rng = random.Random(10)
    for _ in range(600):
        n = rng.randint(0, 7)
        bp = BinPackingInstance(tuple(rng.randint(1, 6) for _ in range(n)), rng.randint(1, 3), rng.randint(1, 10))
        cert = bp_brute_force(bp)
        assert (cert is not None) == bin_packing_reference(bp.sizes, bp.m, bp.alpha)
        if cert is not None:
            check_certificate(bp, cert)


def test_reduced_instances_structure():
    for sizes in [(1, 1, 1, 1), (2, 1, 2, 1, 1), (3, 3, 1, 2, 2, 1)]:
        for m in (1, 2):
            if len(sizes) < 2 * m + 2:
                continue
            r = RestrictedBPInstance(sizes, m, 4)
            inst = reduce_rbp_to_repacking(r)
            assert inst.capacity == capacity_of(r) == 2 * (r.n - r.m) * r.alpha
            assert inst.n_bunches == r.n + 2
            diff_s = Counter(inst.source) - Counter(inst.target)
            diff_t = Counter(inst.target) - Counter(inst.source)
            assert sum(diff_s.values()) == sum(diff_t.values()) == 2
