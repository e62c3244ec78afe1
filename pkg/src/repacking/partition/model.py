"""The transshipment integer program over small subconfigurations.

Every subconfiguration D (1..β bunches over the instance's items) gets an
origin x_D, an intermediate y_D and a destination z_D, with edges
x_D→y_D, y_D→z_D and y_D→y_E whenever one item move turns D into E.

Variables are a flow f on the edges and demands d(x_D) ≤ 0, d(z_D) ≥ 0.
A feasible point must satisfy:

* outflow:      −f(x_D y_D) − d(x_D) = 0
* conservation: inflow(y_D) − outflow(y_D) = 0
* inflow:       f(y_D z_D) − d(z_D) = 0
* source:       Σ_D mult(B, D)·d(x_D) = −mult(B, S) for every bunch type B
* target:       Σ_D mult(B, D)·d(z_D) = mult(B, T) for every bunch type B
* integrality, f ≥ 0, d(x) ≤ 0, d(z) ≥ 0.

The demands at the origins describe how the source splits into portions
and those at the destinations how the target does. A unit of flow along
y nodes is one item move inside a portion.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

from ..core import Bunch, Instance
from ..errors import ExplosionGuard
from ..oracle import neighbors
from .enumeration import DEFAULT_GUARDS, Guards, SubConfig, enum_beta_subs, enum_bin_types
from .flows import Edge, Flow, FlowGraph


def x_node(i: int) -> tuple:
    return ("x", i)


def y_node(i: int) -> tuple:
    return ("y", i)


def z_node(i: int) -> tuple:
    return ("z", i)


class Structure:
    """The parts of the model that depend only on the items, κ and β."""

    def __init__(self, bin_types, subs, edges):
        self.bin_types: list[Bunch] = list(bin_types)
        self.subs: list[SubConfig] = list(subs)
        self.edges: list[Edge] = list(edges)
        self.sub_index = {D: i for i, D in enumerate(self.subs)}
        self.edge_index = {e: k for k, e in enumerate(self.edges)}
        self.graph = FlowGraph(self.edges)
        self.y_adj: dict[int, list[int]] = defaultdict(list)
        for u, v in self.edges:
            if u[0] == "y" and v[0] == "y":
                self.y_adj[u[1]].append(v[1])
        self._templates: Optional[list] = None
        self._matrix = None
        self.components: Optional[list[int]] = None
        self.sub_counts = [Counter(D) for D in self.subs]

    def templates(self) -> list:
        """Rows as (family, coefficients, side, bunch type); side picks the rhs."""
        if self._templates is None:
            self._templates = list(_row_templates(self))
        return self._templates

    def matrix(self):
        """The row templates as an int64 sparse matrix."""
        if self._matrix is None:
            import numpy as np
            from scipy.sparse import csr_matrix

            rows, cols, vals = [], [], []
            for r, (_, coeffs, _, _) in enumerate(self.templates()):
                for k, c in coeffs.items():
                    rows.append(r)
                    cols.append(k)
                    vals.append(c)
            shape = (len(self.templates()), len(self.edges) + 2 * len(self.subs))
            self._matrix = csr_matrix(
                (np.array(vals, dtype=np.int64), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
                shape=shape,
                dtype=np.int64,
            )
        return self._matrix


@dataclass
class IlpModel:
    instance: Instance
    beta: int
    structure: Structure
    bound: int

    def __post_init__(self) -> None:
        self._rows: Optional[list[Row]] = None

    @property
    def bin_types(self) -> list[Bunch]:
        return self.structure.bin_types

    @property
    def subs(self) -> list[SubConfig]:
        return self.structure.subs

    @property
    def edges(self) -> list[Edge]:
        return self.structure.edges

    @property
    def sub_index(self) -> dict[SubConfig, int]:
        return self.structure.sub_index

    @property
    def edge_index(self) -> dict[Edge, int]:
        return self.structure.edge_index

    def rows(self) -> list["Row"]:
        if self._rows is None:
            self._rows = list(constraint_rows(self))
        return self._rows

    @property
    def n_variables(self) -> int:
        return len(self.edges) + 2 * len(self.subs)

    @property
    def n_constraint_rows(self) -> int:
        return 8 * len(self.subs) + 4 * len(self.bin_types) + len(self.edges)

    # column layout: flows, then d(x_D), then d(z_D)
    def col_f(self, e: Edge) -> int:
        return self.edge_index[e]

    def col_dx(self, i: int) -> int:
        return len(self.edges) + i

    def col_dz(self, i: int) -> int:
        return len(self.edges) + len(self.subs) + i

    def variable_names(self) -> list[str]:
        names = [f"f[{u[0]}{u[1]}->{v[0]}{v[1]}]" for u, v in self.edges]
        names += [f"d[x{i}]" for i in range(len(self.subs))]
        names += [f"d[z{i}]" for i in range(len(self.subs))]
        return names

    def variable_bounds(self) -> list[tuple[int, int]]:
        b = self.bound
        return [(0, b)] * len(self.edges) + [(-b, 0)] * len(self.subs) + [(0, b)] * len(self.subs)

    def graph(self) -> FlowGraph:
        return self.structure.graph

    def y_neighbors(self) -> dict[int, list[int]]:
        return self.structure.y_adj


def build_partition_ilp(inst: Instance, beta: int, guards: Guards = DEFAULT_GUARDS) -> IlpModel:
    return IlpModel(inst, beta, _structure(inst.universe, inst.capacity, beta, guards), bound=inst.n_bunches)


@lru_cache(maxsize=256)
def _structure(universe: tuple[int, ...], kappa: int, beta: int, guards: Guards) -> Structure:
    bin_types = enum_bin_types(universe, kappa, guards)
    subs = enum_beta_subs(universe, kappa, beta, guards)
    index = {D: i for i, D in enumerate(subs)}
    edges: list[Edge] = []
    for i in range(len(subs)):
        edges.append((x_node(i), y_node(i)))
    for i, D in enumerate(subs):
        for _, E in neighbors(D, kappa):
            edges.append((y_node(i), y_node(index[E])))
            if len(edges) > guards.max_edges:
                raise ExplosionGuard(f"more than {guards.max_edges} edges")
    for i in range(len(subs)):
        edges.append((y_node(i), z_node(i)))
    if len(edges) > guards.max_edges:
        raise ExplosionGuard(f"more than {guards.max_edges} edges")
    return Structure(bin_types, subs, edges)


@dataclass
class IlpSolution:
    f: dict[int, int]
    d_x: list[int]
    d_z: list[int]

    def flow(self, model: IlpModel) -> Flow:
        return {model.edges[k]: v for k, v in self.f.items() if v}

    def vector(self, model: IlpModel) -> list[int]:
        vec = [0] * model.n_variables
        for k, v in self.f.items():
            vec[k] = v
        for i, v in enumerate(self.d_x):
            vec[model.col_dx(i)] = v
        for i, v in enumerate(self.d_z):
            vec[model.col_dz(i)] = v
        return vec


@dataclass(frozen=True)
class Row:
    family: str
    coefficients: dict[int, int]
    rhs: int


def _row_templates(st: Structure):
    g = st.graph
    n, nE = len(st.subs), len(st.edges)

    def col_dx(i: int) -> int:
        return nE + i

    def col_dz(i: int) -> int:
        return nE + n + i

    def pair(family: str, coeffs: dict[int, int], side: str, B):
        yield family, coeffs, side, B
        yield family + "'", {c: -v for c, v in coeffs.items()}, "-" + side, B

    for i in range(n):
        coeffs = {col_dx(i): -1}
        for e in g.out_edges[x_node(i)]:
            coeffs[st.edge_index[e]] = coeffs.get(st.edge_index[e], 0) - 1
        yield from pair("outflow", coeffs, "zero", None)
    for i in range(n):
        coeffs: dict[int, int] = defaultdict(int)
        for e in g.in_edges[y_node(i)]:
            coeffs[st.edge_index[e]] += 1
        for e in g.out_edges[y_node(i)]:
            coeffs[st.edge_index[e]] -= 1
        yield from pair("conservation", dict(coeffs), "zero", None)
    for i in range(n):
        coeffs = {col_dz(i): -1}
        for e in g.in_edges[z_node(i)]:
            coeffs[st.edge_index[e]] = coeffs.get(st.edge_index[e], 0) + 1
        yield from pair("inflow", coeffs, "zero", None)
    holders: dict[Bunch, dict[int, int]] = defaultdict(dict)
    for i, D in enumerate(st.subs):
        for B, k in Counter(D).items():
            holders[B][i] = k
    for B in st.bin_types:
        yield from pair("source", {col_dx(i): k for i, k in holders[B].items()}, "source", B)
    for B in st.bin_types:
        yield from pair("target", {col_dz(i): k for i, k in holders[B].items()}, "target", B)
    for k in range(nE):
        yield "nonnegative", {k: -1}, "zero", None
    for i in range(n):
        yield "origin-sign", {col_dx(i): 1}, "zero", None
    for i in range(n):
        yield "destination-sign", {col_dz(i): -1}, "zero", None


def constraint_rows(model: IlpModel) -> Iterator[Row]:
    """The program as rows a·v ≤ b, each equality split into two rows."""
    S = Counter(model.instance.source)
    T = Counter(model.instance.target)
    rhs = {
        "zero": lambda B: 0,
        "-zero": lambda B: 0,
        "source": lambda B: -S[B],
        "-source": lambda B: S[B],
        "target": lambda B: T[B],
        "-target": lambda B: -T[B],
    }
    for family, coeffs, side, B in model.structure.templates():
        yield Row(family, coeffs, rhs[side](B))


def rhs_vector(model: IlpModel) -> list[int]:
    S = Counter(model.instance.source)
    T = Counter(model.instance.target)
    out = []
    for _, _, side, B in model.structure.templates():
        if side in ("zero", "-zero"):
            out.append(0)
        elif side == "source":
            out.append(-S[B])
        elif side == "-source":
            out.append(S[B])
        elif side == "target":
            out.append(T[B])
        else:
            out.append(-T[B])
    return out


def check_solution(model: IlpModel, sol: IlpSolution) -> list[str]:
    """Every violated constraint, as readable strings. Empty means feasible.

    Rows are evaluated as an exact int64 matrix product; entries are tiny
    so nothing can overflow.
    """
    import numpy as np

    vec = sol.vector(model)
    problems = [
        f"integrality: variable {k} = {v!r}"
        for k, v in enumerate(vec)
        if isinstance(v, bool) or not isinstance(v, int)
    ]
    if problems:
        return problems
    if len(vec) != model.n_variables:
        return [f"solution has {len(vec)} variables, model has {model.n_variables}"]
    lhs = model.structure.matrix() @ np.array(vec, dtype=np.int64)
    b = np.array(rhs_vector(model), dtype=np.int64)
    templates = model.structure.templates()
    return [f"{templates[r][0]}: {int(lhs[r])} > {int(b[r])}" for r in np.flatnonzero(lhs > b)]


def model_to_obj(model: IlpModel) -> dict:
    names = model.variable_names()
    return {
        "capacity": model.instance.capacity,
        "beta": model.beta,
        "subconfigurations": [[list(b) for b in D] for D in model.subs],
        "bin_types": [list(b) for b in model.bin_types],
        "variables": [
            {"name": nm, "lower": lo, "upper": hi, "integer": True}
            for nm, (lo, hi) in zip(names, model.variable_bounds())
        ],
        "constraints": [
            {"family": r.family, "coefficients": {names[k]: c for k, c in sorted(r.coefficients.items()) if c},
             "sense": "<=", "rhs": r.rhs}
            for r in constraint_rows(model)
        ],
    }
