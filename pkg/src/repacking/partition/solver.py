"""Exact solvers for the transshipment program.

The branch-and-bound solver branches on the demand variables. Fixing the
origin demands means splitting the source into portions of 1..β bunches,
and fixing the destination demands means splitting the target. The edges
between intermediate nodes are uncapacitated and come in both
directions, so once demands are fixed a flow exists exactly when every
connected component of the intermediate graph receives as many units as
it sends. That balance is the propagation rule: a source portion may only
be chosen in a component the target can also use, and a target portion
only in a component that still owes units. Flows are then built by
matching origins to destinations inside each component along shortest
paths. Each edge carries at most |S| units, within the installed bounds.

solve_ilp_milp hands the same rows to an external MILP solver. It exists
to cross-check the branch-and-bound solver.
"""

from __future__ import annotations

from collections import Counter, deque
from itertools import combinations
from typing import Optional

from ..core import Bunch, canonicalize
from ..errors import InternalInvariantViolation
from .model import IlpModel, IlpSolution, check_solution, constraint_rows, x_node, y_node, z_node


def components(model: IlpModel) -> list[int]:
    """Component id of every subconfiguration in the intermediate graph."""
    cached = getattr(model.structure, "components", None)
    if cached is not None:
        return cached
    adj = model.y_neighbors()
    comp = [-1] * len(model.subs)
    for s in range(len(model.subs)):
        if comp[s] >= 0:
            continue
        comp[s] = s
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if comp[v] < 0:
                    comp[v] = s
                    queue.append(v)
    model.structure.components = comp
    return comp


def _blocks(remaining: tuple[Bunch, ...], beta: int) -> list[tuple[Bunch, ...]]:
    """Portions that contain the first remaining bunch, without repeats."""
    head, rest = remaining[0], remaining[1:]
    seen = set()
    out = []
    for r in range(min(beta - 1, len(rest)) + 1):
        for extra in combinations(rest, r):
            D = canonicalize((head,) + extra)
            if D not in seen:
                seen.add(D)
                out.append(D)
    return out


def _minus(remaining: tuple[Bunch, ...], D: tuple[Bunch, ...]) -> tuple[Bunch, ...]:
    left = Counter(remaining)
    left.subtract(D)
    return tuple(sorted(left.elements(), reverse=True))


def solve_ilp(model: IlpModel) -> Optional[IlpSolution]:
    """Some feasible integral point of the model, or None."""
    comp = components(model)
    beta = model.beta
    index = model.sub_index
    src = tuple(model.instance.source)
    tgt = tuple(model.instance.target)
    T = Counter(tgt)
    usable = {comp[i] for i, c in enumerate(model.structure.sub_counts) if not c - T}
    failed_t: set = set()
    failed_s: set = set()

    def cover_target(left: tuple[Bunch, ...], owed: Counter) -> Optional[list[int]]:
        if not left:
            return [] if not +owed else None
        key = (left, frozenset((+owed).items()))
        if key in failed_t:
            return None
        for D in _blocks(left, beta):
            i = index[D]
            if owed[comp[i]] <= 0:
                continue
            owed[comp[i]] -= 1
            rest = cover_target(_minus(left, D), owed)
            owed[comp[i]] += 1
            if rest is not None:
                return [i] + rest
        failed_t.add(key)
        return None

    def cover_source(left: tuple[Bunch, ...], owed: Counter) -> Optional[tuple[list[int], list[int]]]:
        if not left:
            t = cover_target(tgt, owed)
            return None if t is None else ([], t)
        key = (left, frozenset((+owed).items()))
        if key in failed_s:
            return None
        for D in _blocks(left, beta):
            i = index[D]
            if comp[i] not in usable:
                continue
            owed[comp[i]] += 1
            rest = cover_source(_minus(left, D), owed)
            owed[comp[i]] -= 1
            if rest is not None:
                return [i] + rest[0], rest[1]
        failed_s.add(key)
        return None

    found = cover_source(src, Counter())
    if found is None:
        return None
    sol = _route(model, comp, *found)
    problems = check_solution(model, sol)
    if problems:
        raise InternalInvariantViolation(f"branch-and-bound produced an infeasible point: {problems[:3]}")
    return sol


def _shortest_paths(model: IlpModel, start: int) -> dict[int, Optional[int]]:
    adj = model.y_neighbors()
    parent: dict[int, Optional[int]] = {start: None}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in parent:
                parent[v] = u
                queue.append(v)
    return parent


def _route(model: IlpModel, comp: list[int], source_parts: list[int], target_parts: list[int]) -> IlpSolution:
    from scipy.optimize import linear_sum_assignment

    n = len(model.subs)
    d_x = [0] * n
    d_z = [0] * n
    for i in source_parts:
        d_x[i] -= 1
    for i in target_parts:
        d_z[i] += 1
    f: dict[int, int] = Counter()
    trees: dict[int, dict] = {}
    for c in sorted(set(comp[i] for i in source_parts)):
        starts = [i for i in source_parts if comp[i] == c]
        ends = [i for i in target_parts if comp[i] == c]
        if len(starts) != len(ends):
            raise InternalInvariantViolation("component balance broken")
        for i in set(starts):
            trees.setdefault(i, _shortest_paths(model, i))
        cost = [[_depth(trees[a], b) for b in ends] for a in starts]
        rows, cols = linear_sum_assignment(cost)
        for r, k in zip(rows, cols):
            a, b = starts[r], ends[k]
            f[model.col_f((x_node(a), y_node(a)))] += 1
            f[model.col_f((y_node(b), z_node(b)))] += 1
            node = b
            tree = trees[a]
            while tree[node] is not None:
                f[model.col_f((y_node(tree[node]), y_node(node)))] += 1
                node = tree[node]
    return IlpSolution(dict(f), d_x, d_z)


def _depth(tree: dict, node: int) -> int:
    if node not in tree:
        raise InternalInvariantViolation("destination not reachable inside its component")
    k = 0
    while tree[node] is not None:
        node = tree[node]
        k += 1
    return k


def solve_ilp_milp(model: IlpModel) -> Optional[IlpSolution]:
    """Solve the same rows with HiGHS; the result is re-checked exactly."""
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import coo_matrix

    rows, cols, vals, rhs = [], [], [], []
    for r, row in enumerate(constraint_rows(model)):
        for k, c in row.coefficients.items():
            rows.append(r)
            cols.append(k)
            vals.append(c)
        rhs.append(row.rhs)
    A = coo_matrix((vals, (rows, cols)), shape=(len(rhs), model.n_variables)).tocsr()
    lo, hi = zip(*model.variable_bounds()) if model.n_variables else ((), ())
    res = milp(
        c=np.zeros(model.n_variables),
        constraints=[LinearConstraint(A, -np.inf, np.array(rhs, dtype=float))],
        integrality=np.ones(model.n_variables),
        bounds=Bounds(np.array(lo, dtype=float), np.array(hi, dtype=float)),
    )
    if res.x is None:
        return None
    vec = [int(round(v)) for v in res.x]
    nE, n = len(model.edges), len(model.subs)
    sol = IlpSolution({k: v for k, v in enumerate(vec[:nE]) if v}, vec[nE : nE + n], vec[nE + n :])
    problems = check_solution(model, sol)
    if problems:
        raise InternalInvariantViolation(f"MILP point fails the exact check: {problems[:3]}")
    return sol
