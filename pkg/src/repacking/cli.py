"""Command-line interface.

Every command prints one JSON object on stdout (or a table with --human)
and writes diagnostics to stderr. Exit codes:

    0  feasible / OK
    1  infeasible / verification failed
    2  malformed input
    3  refused (solver preconditions fail, or the search budget ran out)
    4  enumeration too large (explosion guard)
    5  internal error (a solver broke one of its own guarantees)
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import jsonio
from .core import Instance, ReconfigSequence, verify_sequence
from .errors import (
    ExplosionGuard,
    InternalInvariantViolation,
    InvalidCertificate,
    InvariantViolated,
    PreconditionViolated,
    RejectedInstance,
)
from .hardness import (
    BinPackingInstance,
    bp_brute_force,
    reduce_bp_to_rbp,
    reduce_rbp_to_repacking,
    witness_sequence,
)
from .oracle import SearchBudget, SearchStatus, bfs_reachable
from .partition import Guards, beta_repacking_decide, build_partition_ilp, model_to_obj
from .pow2 import is_pow2_instance, pow2_feasible, settle_items
from .smallitems import PreconditionStatus, auto_alpha, check_preconditions, solve_small_items

EXIT_OK, EXIT_NO, EXIT_PARSE, EXIT_REFUSED, EXIT_GUARD, EXIT_INTERNAL = range(6)

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNKNOWN = "unknown-budget"
REFUSED = "refused-precondition"


@dataclass
class RunReport:
    verdict: str
    method: str
    sequence_length: Optional[int] = None
    elapsed_ms: int = 0
    diagnostics: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_obj(self) -> dict:
        obj = {
            "verdict": self.verdict,
            "method": self.method,
            "sequence_length": self.sequence_length,
            "elapsed_ms": self.elapsed_ms,
            "diagnostics": self.diagnostics,
        }
        obj.update(self.extra)
        return obj


class Verified:
    """A sequence that has passed verification against its instance."""

    def __init__(self, inst: Instance, seq: ReconfigSequence):
        report = verify_sequence(inst, seq)
        if not report.ok:
            raise InternalInvariantViolation(
                f"refusing to emit an unverified sequence: {report.status.value} at step {report.step}"
            )
        self.seq = seq


def _attach(report: RunReport, inst: Instance, seq: ReconfigSequence, out: Optional[str]) -> None:
    v = Verified(inst, seq)
    report.sequence_length = len(v.seq)
    obj = jsonio.sequence_to_obj(v.seq)
    if out:
        Path(out).write_text(jsonio.dumps(obj) + "\n", encoding="utf-8")
        report.extra["sequence_file"] = out
    else:
        report.extra["sequence"] = obj


def cmd_solve(args) -> tuple[RunReport, int]:
    inst = jsonio.read_instance(args.instance)
    method = args.method
    if method == "auto":
        if is_pow2_instance(inst):
            method = "pow2"
        else:
            method = "small-items"
            args.auto_alpha = args.alpha is None
    if method == "pow2":
        verdict = pow2_feasible(inst)
        report = RunReport(INFEASIBLE, "pow2", extra={"ell": verdict.ell, "total_slack": verdict.total_slack})
        if not verdict.feasible:
            report.diagnostics.append(f"total slack {verdict.total_slack} < largest unsettled size {verdict.ell}")
            return report, EXIT_NO
        report.verdict = FEASIBLE
        _attach(report, inst, settle_items(inst), args.out)
        return report, EXIT_OK
    if args.alpha is not None:
        alphas = [args.alpha]
    elif args.auto_alpha:
        best = auto_alpha(inst)
        alphas = [best] if best is not None else []
    else:
        raise PreconditionViolated("small-items needs --alpha N or --auto-alpha")
    for a in alphas:
        status = check_preconditions(inst, a)
        if status is PreconditionStatus.OK:
            report = RunReport(FEASIBLE, "small-items", extra={"alpha": a})
            _attach(report, inst, solve_small_items(inst, a), args.out)
            return report, EXIT_OK
    report = RunReport(REFUSED, "small-items" if args.method != "auto" else "auto")
    why = status.value if alphas else "no alpha >= 2 bounds the item sizes"
    report.diagnostics.append(f"preconditions fail ({why}); try `repack brute` on small instances")
    return report, EXIT_REFUSED


def cmd_verify(args) -> tuple[RunReport, int]:
    inst = jsonio.read_instance(args.instance)
    seq = jsonio.read_sequence(args.sequence)
    r = verify_sequence(inst, seq)
    report = RunReport(
        FEASIBLE if r.ok else INFEASIBLE,
        "verify",
        sequence_length=len(seq),
        extra={"status": r.status.value, "step": r.step},
    )
    if r.reason:
        report.diagnostics.append(r.reason)
    return report, EXIT_OK if r.ok else EXIT_NO


def cmd_brute(args) -> tuple[RunReport, int]:
    inst = jsonio.read_instance(args.instance)
    res = bfs_reachable(inst, SearchBudget.from_env(args.max_states))
    report = RunReport(
        {SearchStatus.FEASIBLE: FEASIBLE, SearchStatus.INFEASIBLE: INFEASIBLE}.get(res.status, UNKNOWN),
        "brute",
        extra={"states_explored": res.explored},
    )
    if res.status is SearchStatus.BUDGET_EXCEEDED:
        report.diagnostics.append("state budget exhausted; raise --max-states or REPACK_MAX_STATES")
        return report, EXIT_REFUSED
    if res.feasible:
        _attach(report, inst, res.sequence, args.out)
        return report, EXIT_OK
    return report, EXIT_NO


def cmd_decide(args) -> tuple[RunReport, int]:
    inst = jsonio.read_instance(args.instance)
    guards = Guards()
    if args.emit_ilp:
        model = build_partition_ilp(inst, args.beta, guards)
        Path(args.emit_ilp).write_text(jsonio.dumps(model_to_obj(model)) + "\n", encoding="utf-8")
    d = beta_repacking_decide(inst, args.beta, guards)
    report = RunReport(
        FEASIBLE if d.yes else INFEASIBLE,
        "partition",
        extra={"beta": args.beta, "subconfigurations": len(d.model.subs), "edges": len(d.model.edges)},
    )
    if not d.yes:
        report.diagnostics.append(f"no split into parts of at most {args.beta} bunches works")
        return report, EXIT_NO
    _attach(report, inst, d.witness.sequence, args.out)
    parts = jsonio.partition_to_obj(d.witness.parts)
    if args.partition_out:
        Path(args.partition_out).write_text(jsonio.dumps(parts) + "\n", encoding="utf-8")
        report.extra["partition_file"] = args.partition_out
    else:
        report.extra["partition"] = parts
    return report, EXIT_OK


def cmd_feasible(args) -> tuple[RunReport, int]:
    inst = jsonio.read_instance(args.instance)
    v = pow2_feasible(inst)
    report = RunReport(
        FEASIBLE if v.feasible else INFEASIBLE, "pow2", extra={"ell": v.ell, "total_slack": v.total_slack}
    )
    return report, EXIT_OK if v.feasible else EXIT_NO


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as e:
        raise RejectedInstance(f"--sizes must be comma-separated integers: {e}") from e


def cmd_gen_hard(args) -> tuple[dict, int]:
    bp = BinPackingInstance(tuple(_int_list(args.sizes)), args.m, args.alpha)
    red = reduce_bp_to_rbp(bp)
    inst = reduce_rbp_to_repacking(red.instance)
    obj = jsonio.instance_to_obj(inst)
    if args.out:
        Path(args.out).write_text(jsonio.dumps(obj) + "\n", encoding="utf-8")
    if not args.with_witness:
        return obj, EXIT_OK
    out = {"instance": obj, "reduction": red.kind.value, "certificate": None, "witness": None}
    cert = bp_brute_force(red.instance)
    if cert is not None:
        out["certificate"] = cert
        out["witness"] = jsonio.sequence_to_obj(Verified(inst, witness_sequence(red.instance, cert)).seq)
    return out, EXIT_OK


def _render_human(obj: dict) -> str:
    width = max((len(k) for k in obj), default=0)
    lines = []
    for k, v in obj.items():
        if isinstance(v, dict) and "moves" in v:
            lines.append(f"{k:<{width}}  {len(v['moves'])} moves")
            lines.extend(f"{'':<{width}}    {i:>3}: item {m['item']} {m['from']} -> {m['to']}" for i, m in enumerate(v["moves"]))
        else:
            lines.append(f"{k:<{width}}  {v}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="repack", description="Decide and construct repacking sequences.")
    p.add_argument("--human", action="store_true", help="print a table instead of JSON")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="construct a sequence with a polynomial-time solver")
    s.add_argument("instance")
    s.add_argument("--method", choices=["small-items", "pow2", "auto"], default="auto")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--alpha", type=int)
    g.add_argument("--auto-alpha", action="store_true")
    s.add_argument("--out", help="write the sequence to this file")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a sequence against an instance")
    v.add_argument("instance")
    v.add_argument("sequence")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("decide", help="decide with moves restricted to parts of at most B bunches")
    d.add_argument("instance")
    d.add_argument("--beta", type=int, required=True)
    d.add_argument("--emit-ilp", metavar="PATH", help="dump the integer program as JSON")
    d.add_argument("--out", help="write the witness sequence to this file")
    d.add_argument("--partition-out", help="write the witness partition to this file")
    d.set_defaults(func=cmd_decide)

    b = sub.add_parser("brute", help="exhaustive breadth-first search")
    b.add_argument("instance")
    b.add_argument("--max-states", type=int)
    b.add_argument("--out", help="write the sequence to this file")
    b.set_defaults(func=cmd_brute)

    h = sub.add_parser("gen-hard", help="encode a bin packing instance as a repacking instance")
    h.add_argument("--sizes", required=True)
    h.add_argument("--m", type=int, required=True)
    h.add_argument("--alpha", type=int, required=True)
    h.add_argument("--with-witness", action="store_true")
    h.add_argument("--out", help="also write the instance to this file")
    h.set_defaults(func=cmd_gen_hard)

    f = sub.add_parser("feasible", help="feasibility test without constructing a sequence")
    f.add_argument("instance")
    f.add_argument("--method", choices=["pow2"], default="pow2")
    f.set_defaults(func=cmd_feasible)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    code = EXIT_OK
    try:
        result, code = args.func(args)
    except (RejectedInstance, OSError, ValueError, InvariantViolated, InvalidCertificate) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except PreconditionViolated as e:
        result, code = RunReport(REFUSED, args.command, diagnostics=[str(e)]), EXIT_REFUSED
    except ExplosionGuard as e:
        result, code = RunReport(REFUSED, args.command, diagnostics=[str(e)]), EXIT_GUARD
    except InternalInvariantViolation as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    if isinstance(result, RunReport):
        result.elapsed_ms = int((time.perf_counter() - start) * 1000)
        for line in result.diagnostics:
            print(line, file=sys.stderr)
        result = result.to_obj()
    print(_render_human(result) if args.human else jsonio.dumps(result))
    return code


if __name__ == "__main__":
    sys.exit(main())
