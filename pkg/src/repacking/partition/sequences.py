"""Conversions between program solutions and portion-wise sequences.

A conforming sequence is a list of assignments: tuples of portions, where
each consecutive pair differs in exactly one portion by one item move.
Portions never exchange items, so the split of the universe into
(items, bunch count) parts stays fixed along the sequence.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

from ..core import (
    Configuration,
    Instance,
    ReconfigSequence,
    apply_move,
    are_adjacent,
    canonical_move,
    canonicalize,
    underlying,
    verify_sequence,
)
from ..errors import InternalInvariantViolation, NotConforming, NotSorted
from .enumeration import DEFAULT_GUARDS, Guards, SubConfig
from .flows import decompose_flow
from .model import IlpModel, IlpSolution, build_partition_ilp, x_node, y_node, z_node
from .solver import solve_ilp

Assignment = tuple[SubConfig, ...]
Part = tuple[tuple[int, ...], int]


@dataclass(frozen=True)
class PartitionWitness:
    parts: tuple[Part, ...]
    assignments: tuple[Assignment, ...]
    sequence: ReconfigSequence

    @property
    def source_portions(self) -> Assignment:
        return self.assignments[0]

    @property
    def target_portions(self) -> Assignment:
        return self.assignments[-1]


def parts_of(portions: Sequence[SubConfig]) -> tuple[Part, ...]:
    return tuple((underlying(D), len(D)) for D in portions)


def flatten(portions: Sequence[SubConfig]) -> Configuration:
    return canonicalize(b for D in portions for b in D)


def _steps(assignments: Sequence[Assignment]) -> list[int]:
    """The portion changed by each step."""
    out = []
    for a, b in zip(assignments, assignments[1:]):
        if len(a) != len(b):
            raise NotConforming("assignments have different numbers of portions")
        diff = [j for j in range(len(a)) if a[j] != b[j]]
        if len(diff) != 1:
            raise NotConforming(f"a step changes {len(diff)} portions")
        out.append(diff[0])
    return out


def global_sequence(assignments: Sequence[Assignment], capacity: int) -> ReconfigSequence:
    """Flatten a conforming sequence into moves on the whole configuration."""
    if not assignments:
        return ReconfigSequence()
    cur = flatten(assignments[0])
    moves = []
    for (a, b), j in zip(zip(assignments, assignments[1:]), _steps(assignments)):
        local = are_adjacent(a[j], b[j], capacity)
        if local is None:
            raise NotConforming(f"portion {j} does not change by one move")
        donor, recipient = a[j][local.from_index], a[j][local.to_index]
        m = canonical_move(cur, local.item, donor, recipient)
        cur = apply_move(cur, m, capacity)
        moves.append(m)
    return ReconfigSequence(moves)


def sequence_from_solution(model: IlpModel, sol: IlpSolution) -> PartitionWitness:
    """Build a verified conforming sequence from a feasible point."""
    inst = model.instance
    portions: list[SubConfig] = []
    for i, v in enumerate(sol.d_x):
        portions.extend([model.subs[i]] * -v)
    if flatten(portions) != inst.source:
        raise InternalInvariantViolation("origin demands do not split the source")
    paths = decompose_flow(model.graph(), sol.flow(model))
    starts = Counter(p.source for p in paths)
    ends = Counter(p.sink for p in paths)
    for i in range(len(model.subs)):
        if starts[x_node(i)] != -sol.d_x[i] or ends[z_node(i)] != sol.d_z[i]:
            raise InternalInvariantViolation(f"path counts at subconfiguration {i} disagree with demands")
    unused: dict[tuple, list] = {}
    for p in paths:
        unused.setdefault(p.source, []).append(p)
    cur = list(portions)
    assignments = [tuple(cur)]
    for k, D in enumerate(portions):
        p = unused[x_node(model.sub_index[D])].pop(0)
        for node in p.path[2:-1]:
            if node[0] != "y":
                raise InternalInvariantViolation("path interior leaves the intermediate nodes")
            cur[k] = model.subs[node[1]]
            assignments.append(tuple(cur))
    if flatten(cur) != inst.target:
        raise InternalInvariantViolation("final assignment is not the target")
    seq = global_sequence(assignments, inst.capacity)
    report = verify_sequence(inst, seq)
    if not report.ok:
        raise InternalInvariantViolation(f"built sequence fails verification: {report.reason}")
    return PartitionWitness(parts_of(portions), tuple(assignments), seq)


def sort_sequence(assignments: Sequence[Assignment]) -> list[Assignment]:
    """Regroup steps so that all steps of portion i come before those of portion j > i."""
    if not assignments:
        return []
    steps = _steps(assignments)
    per: dict[int, list[SubConfig]] = {}
    for (_, b), j in zip(zip(assignments, assignments[1:]), steps):
        per.setdefault(j, []).append(b[j])
    cur = list(assignments[0])
    out = [tuple(cur)]
    for j in sorted(per):
        for D in per[j]:
            cur[j] = D
            out.append(tuple(cur))
    return out


def solution_from_sequence(model: IlpModel, assignments: Sequence[Assignment]) -> IlpSolution:
    """Read a feasible point off a sorted conforming sequence."""
    if not assignments:
        raise NotConforming("a conforming sequence has at least one assignment")
    steps = _steps(assignments)
    if any(a > b for a, b in zip(steps, steps[1:])):
        raise NotSorted("steps are not grouped by portion")
    n = len(model.subs)
    d_x, d_z = [0] * n, [0] * n
    f: Counter = Counter()

    def idx(D: SubConfig) -> int:
        if D not in model.sub_index:
            raise NotConforming(f"{D} is not a subconfiguration of the model")
        return model.sub_index[D]

    for D in assignments[0]:
        i = idx(D)
        d_x[i] -= 1
        f[model.col_f((x_node(i), y_node(i)))] += 1
    for D in assignments[-1]:
        i = idx(D)
        d_z[i] += 1
        f[model.col_f((y_node(i), z_node(i)))] += 1
    for (a, b), j in zip(zip(assignments, assignments[1:]), steps):
        e = (y_node(idx(a[j])), y_node(idx(b[j])))
        if e not in model.edge_index:
            raise NotConforming(f"portion {j} does not change by one move")
        f[model.col_f(e)] += 1
    return IlpSolution(dict(f), d_x, d_z)


@dataclass(frozen=True)
class Decision:
    yes: bool
    witness: Optional[PartitionWitness]
    model: IlpModel
    solution: Optional[IlpSolution]


def beta_repacking_decide(inst: Instance, beta: int, guards: Guards = DEFAULT_GUARDS) -> Decision:
    """Whether some split into parts of at most β bunches reconfigures S to T."""
    model = build_partition_ilp(inst, beta, guards)
    sol = solve_ilp(model)
    if sol is None:
        return Decision(False, None, model, None)
    return Decision(True, sequence_from_solution(model, sol), model, sol)
