"""Integral flows on origin/intermediate/destination graphs.

Nodes are tuples whose first entry is the role: "x" (origin, no in-edges),
"y" (intermediate, conserves flow) or "z" (destination, no out-edges). A
flow maps edges (u, v) to non-negative integers; missing edges carry 0.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

from ..errors import MalformedFlow

Node = tuple
Edge = tuple[Node, Node]
Flow = dict[Edge, int]


def role(node: Node) -> str:
    return node[0]


class FlowGraph:
    def __init__(self, edges: Iterable[Edge]):
        self.edges: list[Edge] = list(edges)
        self.edge_set = set(self.edges)
        if len(self.edge_set) != len(self.edges):
            raise ValueError("duplicate edges")
        self.nodes: set[Node] = set()
        for u, v in self.edges:
            if role(u) == "z" or role(v) == "x":
                raise ValueError(f"edge {u}->{v} leaves a destination or enters an origin")
            self.nodes.update((u, v))
        self.out_edges: dict[Node, list[Edge]] = defaultdict(list)
        self.in_edges: dict[Node, list[Edge]] = defaultdict(list)
        for e in self.edges:
            self.out_edges[e[0]].append(e)
            self.in_edges[e[1]].append(e)


def _clean(f: Mapping[Edge, int]) -> Flow:
    return {e: v for e, v in f.items() if v}


def flow_add(f1: Mapping[Edge, int], f2: Mapping[Edge, int]) -> Flow:
    out = dict(f1)
    for e, v in f2.items():
        out[e] = out.get(e, 0) + v
    return _clean(out)


def is_subflow(f1: Mapping[Edge, int], f: Mapping[Edge, int]) -> bool:
    """Whether f1 is edge-wise at most f."""
    return all(0 <= v <= f.get(e, 0) for e, v in f1.items())


def flow_sub(f: Mapping[Edge, int], f1: Mapping[Edge, int]) -> Flow:
    if not is_subflow(f1, f):
        raise MalformedFlow("subtracted flow is not a subflow")
    out = dict(f)
    for e, v in f1.items():
        out[e] = out.get(e, 0) - v
    return _clean(out)


def flow_value(f: Mapping[Edge, int]) -> int:
    """Total flow leaving origin nodes."""
    return sum(v for (u, _), v in f.items() if role(u) == "x")


def inflow_to_destinations(f: Mapping[Edge, int]) -> int:
    return sum(v for (_, w), v in f.items() if role(w) == "z")


def conservation_errors(f: Mapping[Edge, int]) -> list[Node]:
    bal: dict[Node, int] = defaultdict(int)
    for (u, v), val in f.items():
        bal[u] -= val
        bal[v] += val
    return sorted((n for n, b in bal.items() if b and role(n) == "y"), key=repr)


def check_flow(graph: FlowGraph, f: Mapping[Edge, int]) -> None:
    for e, v in f.items():
        if e not in graph.edge_set:
            raise MalformedFlow(f"edge {e} is not in the graph")
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise MalformedFlow(f"edge {e} carries {v!r}, not a non-negative integer")
    bad = conservation_errors(f)
    if bad:
        raise MalformedFlow(f"flow is not conserved at {bad[:3]}")


@dataclass(frozen=True)
class UnitPathFlow:
    path: tuple[Node, ...]

    @property
    def source(self) -> Node:
        return self.path[0]

    @property
    def sink(self) -> Node:
        return self.path[-1]

    def edges(self) -> list[Edge]:
        return list(zip(self.path, self.path[1:]))

    def as_flow(self) -> Flow:
        return {e: 1 for e in self.edges()}


def decompose_flow(graph: FlowGraph, f: Mapping[Edge, int]) -> list[UnitPathFlow]:
    """Split an integral flow into |f| unit path flows.

    Take any edge with positive flow and extend it forward to a destination
    and backward to an origin. If the walk closes a cycle, remove the
    smallest flow along the cycle and start again; cycles yield no paths.
    Otherwise remove the smallest flow δ along the path and emit δ unit
    paths.
    """
    check_flow(graph, f)
    rest: dict[Edge, int] = _clean(f)
    out_pos: dict[Node, dict[Node, int]] = defaultdict(dict)
    in_pos: dict[Node, dict[Node, int]] = defaultdict(dict)
    for (u, v), val in rest.items():
        out_pos[u][v] = val
        in_pos[v][u] = val

    def take(nodes: list[Node]) -> int:
        es = list(zip(nodes, nodes[1:]))
        delta = min(rest[e] for e in es)
        for u, v in es:
            rest[(u, v)] -= delta
            if rest[(u, v)] == 0:
                del rest[(u, v)]
                del out_pos[u][v]
                del in_pos[v][u]
            else:
                out_pos[u][v] -= delta
                in_pos[v][u] -= delta
        return delta

    order = {e: k for k, e in enumerate(graph.edges)}
    paths: list[UnitPathFlow] = []
    while rest:
        u, v = min(rest, key=order.__getitem__)
        walk = [u, v]
        cycle = None
        while role(walk[-1]) != "z" and cycle is None:
            succ = out_pos[walk[-1]]
            if not succ:
                raise MalformedFlow(f"flow stops at {walk[-1]}")
            t = min(succ, key=lambda w: order[(walk[-1], w)])
            if t in walk:
                cycle = walk[walk.index(t):] + [t]
            else:
                walk.append(t)
        while cycle is None and role(walk[0]) != "x":
            pred = in_pos[walk[0]]
            if not pred:
                raise MalformedFlow(f"flow starts at {walk[0]}")
            s = min(pred, key=lambda w: order[(w, walk[0])])
            if s in walk:
                cycle = [s] + walk[: walk.index(s) + 1]
            else:
                walk.insert(0, s)
        if cycle is not None:
            take(cycle)
            continue
        delta = take(walk)
        paths.extend(UnitPathFlow(tuple(walk)) for _ in range(delta))
    return paths
