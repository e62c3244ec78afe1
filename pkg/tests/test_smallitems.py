import random
from fractions import Fraction

import pytest

from generators import small_instance
from oracles import ffd_reference, run_checked_stages
from repacking.core import Instance, LabeledState, canonicalize, verify_sequence
from repacking.errors import DoesNotFit, PreconditionViolated
from repacking.smallitems import (
    PreconditionStatus,
    StageState,
    auto_alpha,
    build_ffd,
    check_preconditions,
    compression_phase,
    ffd_retrieval_phase,
    reconfigure_to_ffd,
    solve_small_items,
)


def bound(capacity, alpha, n):
    return Fraction(capacity, alpha + 1) + Fraction(3 * alpha * capacity, (alpha + 1) * n)


def test_precondition_values():
    four = Instance(12, [[4]] * 4, [[4]] * 4)
    # average slack 8 against 12/4 + 108/16 = 9.75
    assert bound(12, 3, 4) == Fraction(39, 4)
    assert check_preconditions(four, 3) is PreconditionStatus.VIOLATED_SLACK
    eight = Instance(12, [[4]] * 8, [[4]] * 8)
    assert bound(12, 3, 8) == Fraction(51, 8) <= 8
    assert check_preconditions(eight, 3) is PreconditionStatus.OK


def test_precondition_failures():
    assert check_preconditions(Instance(12, [[5], [], [], []], [[5], [], [], []]), 3) is PreconditionStatus.VIOLATED_SIZE
    assert check_preconditions(Instance(4, [[2, 2], [2, 2]], [[2, 2], [2, 2]]), 2) is PreconditionStatus.VIOLATED_SLACK
    with pytest.raises(ValueError):
        check_preconditions(Instance(4, [[1]], [[1]]), 1)


def test_auto_alpha():
    assert auto_alpha(Instance(24, [[5, 3], []], [[5], [3]])) == 4
    assert auto_alpha(Instance(10, [[6]], [[6]])) is None


def test_build_ffd():
    assert build_ffd([6, 5, 3, 2, 1, 1], 9, 2) == ((6, 3), (5, 2, 1, 1))
    assert build_ffd([6, 5, 3, 2, 1, 1], 9, 2) == ffd_reference([6, 5, 3, 2, 1, 1], 9, 2)
    assert build_ffd([], 5, 3) == ((), (), ())
    assert build_ffd([4], 5, 2) == ((4,), ())
    with pytest.raises(DoesNotFit):
        build_ffd([3, 3, 3], 5, 2)


def test_build_ffd_matches_reference():
    rng = random.Random(8)
    for _ in range(500):
        cap = rng.randint(1, 20)
        items = [rng.randint(1, cap) for _ in range(rng.randint(0, 12))]
        assert build_ffd(items, cap, len(items)) == ffd_reference(items, cap, len(items))


def fresh(c, capacity, alpha=2):
    return StageState(list(range(len(c))), [], LabeledState(canonicalize(c), capacity), alpha)


def test_compression_examples():
    s = compression_phase(fresh([[], []], 4), 4)
    assert len(s.log) == 0
    s = compression_phase(fresh([[1], [1]], 2), 2)
    assert s.current.configuration() == ((1, 1), ())
    assert len(s.log) == 1


def test_retrieval_examples():
    # nothing left in general bunches: empties just become FFD bunches
    s = fresh([[], []], 4)
    out = ffd_retrieval_phase(s, 4)
    assert sorted(out.ffd) == [0, 1] and out.general == [] and len(out.log) == 0
    # the largest general item fits in no FFD bunch: the general bunch is untouched
    s = StageState([0], [1], LabeledState([[3], [2]], 4), 2)
    out = ffd_retrieval_phase(s, 4)
    assert out.current.configuration() == ((3,), (2,)) and out.general == [0]


def test_stage_invariants_and_termination():
    rng = random.Random(13)
    for _ in range(120):
        cap = rng.choice([12, 24])
        alpha = rng.choice([2, 3])
        inst = small_instance(rng, cap, alpha)
        state, stages = run_checked_stages(inst.source, cap, alpha)
        assert stages <= inst.n_bunches
        ffd = ffd_reference(inst.universe, cap, inst.n_bunches)
        assert state.current.configuration() == ffd
        # a source already in FFD form is returned without running any stage
        assert reconfigure_to_ffd(inst.source, cap, alpha).stages == (0 if inst.source == ffd else stages)


def test_solve_small_items():
    ffd = build_ffd([4] * 8, 12, 8)
    inst = Instance(12, ffd, ffd)
    assert len(solve_small_items(inst, 3)) == 0
    rng = random.Random(17)
    for _ in range(60):
        cap = rng.choice([12, 24])
        alpha = rng.choice([2, 3])
        inst = small_instance(rng, cap, alpha)
        assert verify_sequence(inst, solve_small_items(inst, alpha)).ok


def test_solve_refuses_without_preconditions():
    with pytest.raises(PreconditionViolated):
        solve_small_items(Instance(12, [[4]] * 4, [[4]] * 4), 3)
