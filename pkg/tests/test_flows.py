import random

import pytest

from repacking.errors import MalformedFlow
from repacking.partition import (
    FlowGraph,
    UnitPathFlow,
    check_flow,
    conservation_errors,
    decompose_flow,
    flow_add,
    flow_sub,
    flow_value,
    inflow_to_destinations,
    is_subflow,
)

X, Y1, Y2, Y3, Z = ("x", 0), ("y", 1), ("y", 2), ("y", 3), ("z", 0)


def five_node_graph():
    return FlowGraph([(X, Y1), (Y1, Y2), (Y2, Y3), (Y3, Y1), (Y2, Z)])


def test_graph_rejects_bad_edges():
    with pytest.raises(ValueError):
        FlowGraph([(Z, Y1)])
    with pytest.raises(ValueError):
        FlowGraph([(Y1, X)])
    with pytest.raises(ValueError):
        FlowGraph([(X, Y1), (X, Y1)])


def test_decompose_small_cases():
    g = FlowGraph([(X, Y1), (Y1, Z)])
    assert decompose_flow(g, {}) == []
    paths = decompose_flow(g, {(X, Y1): 3, (Y1, Z): 3})
    assert paths == [UnitPathFlow((X, Y1, Z))] * 3


def test_decompose_peels_cycle():
    g = five_node_graph()
    f = {(X, Y1): 1, (Y1, Y2): 2, (Y2, Y3): 1, (Y3, Y1): 1, (Y2, Z): 1}
    check_flow(g, f)
    paths = decompose_flow(g, f)
    assert len(paths) == flow_value(f) == 1
    assert paths[0].path == (X, Y1, Y2, Z)
    assert is_subflow(paths[0].as_flow(), f)


def test_malformed_flows():
    g = five_node_graph()
    with pytest.raises(MalformedFlow):
        check_flow(g, {(X, Y1): 1})
    with pytest.raises(MalformedFlow):
        check_flow(g, {(X, Y3): 1, (Y3, Y1): 1})
    with pytest.raises(MalformedFlow):
        check_flow(g, {(X, Y1): -1, (Y1, Y2): -1, (Y2, Z): -1})
    with pytest.raises(MalformedFlow):
        check_flow(g, {(X, Y1): 0.5, (Y1, Y2): 0.5, (Y2, Z): 0.5})
    with pytest.raises(MalformedFlow):
        flow_sub({(X, Y1): 1}, {(X, Y1): 2})


def random_graph(rng, k):
    ys = [("y", i) for i in range(k)]
    edges = [(("x", i), ("y", i)) for i in range(k)] + [(("y", i), ("z", i)) for i in range(k)]
    for a in ys:
        for b in ys:
            if a != b and rng.random() < 0.4:
                edges.append((a, b))
    return FlowGraph(edges)


def random_path(rng, g, steps):
    start = rng.choice([n for n in g.nodes if n[0] == "x"])
    walk = [start, g.out_edges[start][0][1]]
    for _ in range(steps):
        nxt = [v for _, v in g.out_edges[walk[-1]] if v[0] == "y" and v not in walk]
        if not nxt:
            break
        walk.append(rng.choice(nxt))
    ends = [v for _, v in g.out_edges[walk[-1]] if v[0] == "z"]
    walk.append(ends[0])
    return UnitPathFlow(tuple(walk))


def random_cycle(rng, g):
    for _ in range(20):
        y = rng.choice([n for n in g.nodes if n[0] == "y"])
        walk = [y]
        for _ in range(6):
            nxt = [v for _, v in g.out_edges[walk[-1]] if v[0] == "y"]
            if not nxt:
                break
            v = rng.choice(nxt)
            if v in walk:
                loop = walk[walk.index(v):] + [v]
                return {e: 1 for e in zip(loop, loop[1:])}
            walk.append(v)
    return {}


def test_random_flows():
    rng = random.Random(1)
    for _ in range(300):
        g = random_graph(rng, rng.randint(1, 6))
        f1: dict = {}
        for _ in range(rng.randint(0, 5)):
            f1 = flow_add(f1, random_path(rng, g, rng.randint(0, 5)).as_flow())
        f2: dict = {}
        for _ in range(rng.randint(0, 3)):
            f2 = flow_add(f2, random_path(rng, g, rng.randint(0, 5)).as_flow())
        f2 = flow_add(f2, random_cycle(rng, g))
        f = flow_add(f1, f2)
        assert not conservation_errors(f)
        assert flow_value(f) == flow_value(f1) + flow_value(f2)
        assert flow_value(f) == inflow_to_destinations(f)
        assert flow_sub(f, f2) == {e: v for e, v in f1.items() if v}
        assert not conservation_errors(flow_sub(f, f1))
        paths = decompose_flow(g, f)
        assert len(paths) == flow_value(f)
        total: dict = {}
        for p in paths:
            assert p.source[0] == "x" and p.sink[0] == "z"
            assert all(n[0] == "y" for n in p.path[1:-1])
            assert all(e in g.edge_set for e in p.edges())
            assert is_subflow(p.as_flow(), f)
            total = flow_add(total, p.as_flow())
        assert is_subflow(total, f)
