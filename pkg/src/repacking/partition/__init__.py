"""Decider for repacking when items may only move within parts of at most β bunches."""

from .enumeration import DEFAULT_GUARDS, Guards, SubConfig, enum_beta_subs, enum_bin_types, subconfig_adjacent
from .flows import (
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
from .model import IlpModel, IlpSolution, build_partition_ilp, check_solution, constraint_rows, model_to_obj
from .sequences import (
    Decision,
    PartitionWitness,
    beta_repacking_decide,
    flatten,
    global_sequence,
    parts_of,
    sequence_from_solution,
    solution_from_sequence,
    sort_sequence,
)
from .solver import components, solve_ilp, solve_ilp_milp

__all__ = [
    "DEFAULT_GUARDS",
    "Guards",
    "SubConfig",
    "enum_beta_subs",
    "enum_bin_types",
    "subconfig_adjacent",
    "FlowGraph",
    "UnitPathFlow",
    "check_flow",
    "conservation_errors",
    "decompose_flow",
    "flow_add",
    "flow_sub",
    "flow_value",
    "inflow_to_destinations",
    "is_subflow",
    "IlpModel",
    "IlpSolution",
    "build_partition_ilp",
    "check_solution",
    "constraint_rows",
    "Decision",
    "PartitionWitness",
    "beta_repacking_decide",
    "flatten",
    "global_sequence",
    "parts_of",
    "sequence_from_solution",
    "solution_from_sequence",
    "sort_sequence",
    "model_to_obj",
    "components",
    "solve_ilp",
    "solve_ilp_milp",
]
