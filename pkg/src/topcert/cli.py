"""Command-line front end.

Exit codes: 0 certified or finished, 1 refuted, 2 usage or input error,
3 inconclusive (a resource limit was hit).
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .certify import (DEFAULT_MAX_ACTIONS, Verdict, certify_dominance, certify_top_k,
                      certify_top_quality, check_definition1_oracle)
from .errors import InvalidPlan, ParseError, ResourceLimitError, TopCertError, UsageError
from .planner import Termination, plan_top_k, plan_top_quality
from .plans import Relation, format_plan, read_plan_file
from .sas import parse_sas, serialize_sas
from .search import DEFAULT_NODE_LIMIT, Status, enumerate_loopless, enumerate_plans, optimal_search
from .transforms import forbid_set

EXIT_OK, EXIT_REFUTED, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3
_VERDICT_EXIT = {Verdict.CERTIFIED: EXIT_OK, Verdict.REFUTED: EXIT_REFUTED,
                 Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE}


def _relation(text: str) -> Relation:
    try:
        return Relation.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _bound(text: str):
    """An integer bound, or ``xN.N`` for a multiple of the optimal cost."""
    try:
        if text.startswith("x"):
            factor = Fraction(text[1:])
            if factor < 0:
                raise ValueError
            return factor
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or xN.N, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("the cost bound must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topcert", description="Top-quality and top-k planning with certification.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, plans=False, relation=True):
        p.add_argument("--task", required=True, help="SAS task file")
        if plans:
            p.add_argument("--plans", action="append", default=[], metavar="PATH",
                           help="plan file or directory of *.plan files (repeatable)")
        if relation:
            p.add_argument("--relation", type=_relation, default=Relation.EMPTY,
                           help="none | unordered | subset | loopless (default none)")
        p.add_argument("--output", help="where to write the results")
        p.add_argument("--node-limit", type=int, default=DEFAULT_NODE_LIMIT,
                       help=f"search node limit (default {DEFAULT_NODE_LIMIT})")

    def max_actions(p):
        p.add_argument("--max-actions", type=int, default=DEFAULT_MAX_ACTIONS,
                       help=f"transformed task action ceiling (default {DEFAULT_MAX_ACTIONS})")

    c = sub.add_parser("certify", help="certify a plan set")
    common(c, plans=True)
    max_actions(c)
    bound = c.add_mutually_exclusive_group(required=True)
    bound.add_argument("--q", type=_bound, help="cost bound: integer or xN.N times the optimum")
    bound.add_argument("--k", type=int, help="number of plans for top-k")
    c.add_argument("--mode", choices=("transform", "oracle"), default="transform")
    c.add_argument("--length-cap", type=int, help="plan length cap for the oracle mode")
    c.add_argument("--jobs", type=int, default=1, help="worker processes for minimality checks")

    p = sub.add_parser("plan", help="compute a top-quality or top-k plan set")
    common(p)
    max_actions(p)
    bound = p.add_mutually_exclusive_group(required=True)
    bound.add_argument("--q", type=_bound)
    bound.add_argument("--k", type=int)

    t = sub.add_parser("transform", help="write the task with a plan set forbidden")
    common(t, plans=True)
    max_actions(t)

    e = sub.add_parser("enumerate", help="list every plan of cost at most q")
    common(e, relation=False)
    e.add_argument("--q", type=_bound, required=True)
    e.add_argument("--loopless", action="store_true", help="only loopless plans")
    e.add_argument("--length-cap", type=int)
    return parser


def _plan_paths(specs: Sequence[str]) -> list:
    paths = []
    for spec in specs:
        path = Path(spec)
        if path.is_dir():
            paths.extend(sorted(path.glob("*.plan")))
        elif path.is_file():
            paths.append(path)
        else:
            raise UsageError(f"no such plan file or directory: {spec}")
    return paths


def _load_plans(task, specs):
    plans, names = [], []
    for path in _plan_paths(specs):
        try:
            parsed = read_plan_file(task, path)
        except InvalidPlan as exc:
            raise UsageError(f"{path}: {exc}") from None
        except ParseError as exc:
            raise UsageError(f"{path}: {exc}") from None
        for diag in parsed.diagnostics:
            print(f"warning: {path}: {diag}", file=sys.stderr)
        plans.append(parsed.plan)
        names.append(path.name)
    return plans, names


def _resolve_q(task, q, node_limit):
    if not isinstance(q, Fraction):
        return q
    outcome = optimal_search(task, node_limit=node_limit)
    if outcome.status is not Status.OPTIMAL:
        print("task is unsolvable; multiplier bound resolves to 0")
        return 0
    return int(q * outcome.cost)  # floor: costs are integers


def _write(path: Optional[str], text: str) -> None:
    if path:
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")


def _dump(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _certify(args, task) -> int:
    plans, files = _load_plans(task, args.plans)
    if args.k is not None:
        if args.mode == "oracle":
            raise UsageError("--mode oracle supports --q only")
        report = certify_top_k(task, plans, args.k, args.node_limit, args.max_actions)
    else:
        q = _resolve_q(task, args.q, args.node_limit)
        if args.mode == "oracle":
            report = check_definition1_oracle(task, plans, q, args.relation,
                                              args.length_cap, args.node_limit)
        elif args.relation is Relation.EMPTY:
            report = certify_top_quality(task, plans, q, args.node_limit, args.max_actions)
        else:
            report = certify_dominance(task, plans, q, args.relation, args.node_limit,
                                       args.max_actions, args.jobs)
    data = report.to_dict()
    data["input"] = {"files": files, "plans": [p.names(task) for p in plans]}
    if report.witness is not None and report.witness.plan is not None:
        data["witness"]["plan"] = report.witness.plan.names(task)
    _write(args.output, _dump(data))
    print(f"{report.verdict.value}: {report.reason}")
    if report.witness is not None:
        w = report.witness
        shown = " ".join(w.plan.names(task)) if w.plan is not None else "-"
        print(f"witness ({w.condition}): {shown}")
    return _VERDICT_EXIT[report.verdict]


def _plan(args, task) -> int:
    if args.k is not None:
        if args.k < 1:
            raise UsageError("k must be positive")
        plans, trace = plan_top_k(task, args.k, args.node_limit, args.max_actions)
    else:
        q = _resolve_q(task, args.q, args.node_limit)
        plans, trace = plan_top_quality(task, q, args.relation, args.node_limit, args.max_actions)
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        for i, plan in enumerate(plans, 1):
            (out / f"{i:03d}.plan").write_text(format_plan(task, plan), encoding="utf-8")
        (out / "trace.json").write_text(trace.to_json(task), encoding="utf-8")
    for plan in plans:
        print(f"{plan.cost}\t{' '.join(plan.names(task))}")
    print(f"{len(plans)} plans; termination: {trace.termination.value}"
          + (f" ({trace.reason})" if trace.reason else ""))
    return EXIT_INCONCLUSIVE if trace.termination is Termination.LIMIT else EXIT_OK


def _transform(args, task) -> int:
    plans, _ = _load_plans(task, args.plans)
    result = forbid_set(task, plans, args.relation, max_actions=args.max_actions)
    for diag in result.diagnostics:
        print(f"note: {diag}")
    if args.output:
        base = Path(args.output)
        if base.suffix == ".sas":
            base = base.with_suffix("")
        base.parent.mkdir(parents=True, exist_ok=True)
        base.with_name(base.name + ".sas").write_bytes(serialize_sas(result.task))
        base.with_name(base.name + ".map.json").write_text(result.mapping_json(), encoding="utf-8")
    print(f"{len(result.task.variables)} variables, {len(result.task.actions)} actions")
    return EXIT_OK


def _enumerate(args, task) -> int:
    q = _resolve_q(task, args.q, args.node_limit)
    if args.loopless:
        result = enumerate_loopless(task, q, args.node_limit)
    else:
        result = enumerate_plans(task, q, args.length_cap, args.node_limit)
    plans = sorted(result.plans, key=lambda p: (p.cost, p.steps))
    data = {"q": q, "loopless": args.loopless, "complete": result.complete,
            "length_cap": args.length_cap,
            "plans": [{"cost": p.cost, "actions": p.names(task)} for p in plans]}
    _write(args.output, _dump(data))
    for plan in plans:
        print(f"{plan.cost}\t{' '.join(plan.names(task))}")
    print(f"{len(plans)} plans" + ("" if result.complete else " (truncated by the length cap)"))
    return EXIT_OK if result.complete else EXIT_INCONCLUSIVE


_COMMANDS = {"certify": _certify, "plan": _plan, "transform": _transform, "enumerate": _enumerate}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with open(args.task, "rb") as f:
            task = parse_sas(f.read())
        return _COMMANDS[args.command](args, task)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (UsageError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TopCertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
