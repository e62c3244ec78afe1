import random

import pytest

from repacking.core import Instance, ReconfigSequence, canonicalize, verify_sequence
from repacking.oracle import SearchBudget, SearchStatus, bfs_reachable, neighbors, reachable_set
from oracles import all_single_moves, random_legal_configuration, random_walk

S2 = [[1, 1, 2, 6], [2, 3, 5]]
T2 = [[1, 3, 6], [1, 2, 2, 5]]


def test_neighbors_examples():
    assert neighbors(canonicalize(S2), 10) == []
    assert neighbors(((2,), ()), 4) == []
    assert ((2, 1), (2,)) in [c for _, c in neighbors(((2, 2), (1,)), 4)]


def test_trivial_and_golden():
    r = bfs_reachable(Instance(5, [[1, 2], []], [[2, 1], []]))
    assert r.status is SearchStatus.FEASIBLE and len(r.sequence) == 0
    r = bfs_reachable(Instance(10, S2, T2))
    assert r.status is SearchStatus.INFEASIBLE


def test_reachable_component_at_capacity_11_by_hand():
    # slack 1 each: a 1 crosses, then a 2 comes back, then the other 1 crosses; 6, 5 and 3 never move
    comp = reachable_set(canonicalize(S2), 11)
    expected = {
        canonicalize(S2),
        canonicalize([[1, 2, 6], [1, 2, 3, 5]]),
        canonicalize([[1, 2, 2, 6], [1, 3, 5]]),
        canonicalize([[2, 2, 6], [1, 1, 3, 5]]),
    }
    assert comp == expected
    assert canonicalize(T2) not in comp


def test_feasible_from_capacity_12():
    for k in range(12, 21):
        r = bfs_reachable(Instance(k, S2, T2))
        assert r.feasible and verify_sequence(Instance(k, S2, T2), r.sequence).ok
        assert len(r.sequence) == 3


def test_budget():
    inst = Instance(20, [[1] * 10, [], []], [[1] * 4, [1] * 3, [1] * 3])
    r = bfs_reachable(inst, SearchBudget(max_states=3))
    assert r.status is SearchStatus.BUDGET_EXCEEDED and r.sequence is None
    with pytest.raises(ValueError):
        SearchBudget(max_states=0)


def test_budget_from_env(monkeypatch):
    monkeypatch.setenv("REPACK_MAX_STATES", "17")
    assert SearchBudget.from_env().max_states == 17
    assert SearchBudget.from_env(5).max_states == 5


def idd_shortest(start, goal, capacity, limit):
    """Iterative deepening over the independent move enumerator."""
    for depth in range(limit + 1):
        stack = [(start, 0, {start})]
        while stack:
            c, d, path = stack.pop()
            if c == goal:
                return d
            if d == depth:
                continue
            for e in all_single_moves(c, capacity):
                if e not in path:
                    stack.append((e, d + 1, path | {e}))
    return None


def test_shortest_matches_iterative_deepening():
    rng = random.Random(3)
    checked = 0
    while checked < 200:
        cap = rng.randint(2, 8)
        c = random_legal_configuration(rng, rng.randint(2, 4), cap, [1, 2, 3])
        comp = reachable_set(c, cap)
        if comp is None or len(comp) > 10:
            continue
        _, end = random_walk(rng, c, cap, rng.randint(1, 6))
        r = bfs_reachable(Instance(cap, c, end))
        assert r.feasible and verify_sequence(Instance(cap, c, end), r.sequence).ok
        assert len(r.sequence) == idd_shortest(c, end, cap, len(comp))
        checked += 1


def test_infeasible_results_are_closed():
    rng = random.Random(5)
    seen = 0
    while seen < 100:
        cap = rng.randint(3, 9)
        n = rng.randint(2, 4)
        s = random_legal_configuration(rng, n, cap, [1, 2, 3, 4])
        items = [x for b in s for x in b]
        rng.shuffle(items)
        bunches = [[] for _ in range(n)]
        for x in items:
            opts = [b for b in bunches if sum(b) + x <= cap]
            if not opts:
                break
            rng.choice(opts).append(x)
        else:
            inst = Instance(cap, s, bunches)
            r = bfs_reachable(inst)
            if r.status is SearchStatus.INFEASIBLE:
                comp = reachable_set(inst.source, cap)
                assert inst.target not in comp
                for c in comp:
                    assert all_single_moves(c, cap) <= comp
                seen += 1
            else:
                assert verify_sequence(inst, r.sequence).ok


def test_sequences_are_reconfig_sequences():
    r = bfs_reachable(Instance(12, S2, T2))
    assert isinstance(r.sequence, ReconfigSequence)
    assert r.explored >= 1
