"""Certification of top-quality, dominance top-quality and top-k solutions.

Two independent routes are provided. :func:`check_definition1_oracle`
enumerates every cost-bounded plan and tests the three solution conditions
directly. The other certifiers never enumerate: they compile the candidate
set away with plan-forbidding transformations and ask the optimal-search
oracle whether anything of cost at most ``q`` survives.
"""
from __future__ import annotations

import enum
import itertools
import json
from functools import partial
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import ResourceLimitError, UsageError
from .plans import Plan, Relation, dominates, is_loopless, validate_plan
from .search import DEFAULT_NODE_LIMIT, Status, enumerate_plans, optimal_search
from .task import Task
from .transforms import forbid_set

DEFAULT_MAX_ACTIONS = 10 ** 6


class Verdict(enum.Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"


@dataclass
class Witness:
    """Why a candidate set was refuted.

    ``condition`` is ``"cost"`` (a member costs more than q), ``"coverage"``
    (a plan of cost at most q is neither in the set nor dominated by it),
    ``"minimality"`` (a member can be dropped) or ``"cardinality"``.
    """
    condition: str
    plan: Optional[Plan]
    actions: tuple = ()
    detail: str = ""

    def to_dict(self):
        out = {"condition": self.condition, "detail": self.detail}
        if self.plan is not None:
            out["plan"] = list(self.actions)
            out["cost"] = self.plan.cost
        return out


@dataclass
class CheckStep:
    name: str
    status: str
    cost: Optional[int] = None
    expanded: int = 0
    transformed_actions: int = 0
    transformed_variables: int = 0

    def to_dict(self):
        oracle = {"status": self.status, "expanded": self.expanded}
        if self.cost is not None:
            oracle["cost"] = self.cost
        return {"name": self.name, "oracle": oracle,
                "transformed_actions": self.transformed_actions,
                "transformed_variables": self.transformed_variables}


@dataclass
class CertificationReport:
    problem: dict
    verdict: Verdict = Verdict.CERTIFIED
    witness: Optional[Witness] = None
    reason: str = ""
    steps: list = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.CERTIFIED

    def to_dict(self) -> dict:
        out = {"problem": self.problem, "verdict": self.verdict.value, "reason": self.reason,
               "steps": [s.to_dict() for s in self.steps],
               "totals": {
                   "steps": len(self.steps),
                   "expanded": sum(s.expanded for s in self.steps),
                   "max_transformed_actions": max((s.transformed_actions for s in self.steps), default=0),
               }}
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


class _Stop(Exception):
    pass


class _Run:
    """Mutable state of one certification run; ``refute``/``inconclusive`` end it."""

    def __init__(self, task: Task, problem: dict):
        self.task = task
        self.report = CertificationReport(problem)

    def refute(self, condition, plan=None, detail=""):
        names = tuple(plan.names(self.task)) if plan is not None else ()
        self.report.verdict = Verdict.REFUTED
        self.report.witness = Witness(condition, plan, names, detail)
        self.report.reason = detail
        raise _Stop

    def inconclusive(self, reason):
        self.report.verdict = Verdict.INCONCLUSIVE
        self.report.reason = reason
        raise _Stop

    def record(self, name, outcome=None, transformed=None, status=None):
        step = CheckStep(name, status or (outcome.status.value if outcome else "n/a"))
        if outcome is not None:
            step.cost = outcome.cost
            step.expanded = outcome.expanded
        if transformed is not None:
            step.transformed_actions = len(transformed.actions)
            step.transformed_variables = len(transformed.variables)
        self.report.steps.append(step)
        return step

    def basic_checks(self, plans, q=None):
        seen = set()
        for p in plans:
            if p in seen:
                self.refute("minimality", p, "duplicate plan in the candidate set")
            seen.add(p)
        if q is not None:
            for p in plans:
                if p.cost > q:
                    self.refute("cost", p, f"member of cost {p.cost} exceeds q={q}")

    def survivor(self, name, plans, relation, q, node_limit, max_actions):
        """Best plan of cost <= q left after forbidding the extended set, or None."""
        try:
            result = forbid_set(self.task, plans, relation, max_actions=max_actions)
            outcome = optimal_search(result.task, upper_bound=q, node_limit=node_limit)
        except ResourceLimitError as exc:
            self.record(name, status="limit")
            self.inconclusive(f"{name}: {exc}")
        self.record(name, outcome, result.task)
        if outcome.status is Status.OPTIMAL:
            return result.map_back(outcome.plan)
        return None


def _problem(kind, **params):
    out = {"type": kind}
    for key, value in params.items():
        out[key] = value.value if isinstance(value, Relation) else value
    return out


def _finish(run):
    if run.report.verdict is Verdict.CERTIFIED and not run.report.reason:
        run.report.reason = "all checks passed"
    return run.report


def check_definition1_oracle(task: Task, plans: Sequence[Plan], q: int, relation,
                             length_cap: Optional[int] = None,
                             node_limit: int = DEFAULT_NODE_LIMIT) -> CertificationReport:
    """Check the three solution conditions directly against the enumerated
    set of plans of cost at most ``q``.

    ``relation`` is a :class:`Relation` or any callable ``(pi, pi_prime) ->
    bool``; only this route accepts custom relations.
    """
    plans = list(plans)
    if isinstance(relation, Relation):
        related = partial(dominates, relation)
        label = relation
    else:
        related = relation
        label = getattr(relation, "__name__", "custom")
    run = _Run(task, _problem("dominance-top-quality", q=q, relation=label, mode="oracle"))
    try:
        run.basic_checks(plans, q)
        try:
            enum = enumerate_plans(task, q, length_cap, node_limit)
        except (ResourceLimitError, UsageError) as exc:
            run.record("enumerate", status="limit")
            run.inconclusive(f"enumeration infeasible: {exc}")
        run.record("enumerate", status=f"{len(enum.plans)} plans")
        if not enum.complete:
            run.inconclusive("enumeration truncated by the length cap")

        def uncovered(members):
            inside = set(members)
            for p in enum.plans:
                if p not in inside and not any(related(m, p) for m in members):
                    return p
            return None

        missing = uncovered(plans)
        if missing is not None:
            run.refute("coverage", missing, "plan of cost <= q neither in the set nor dominated")
        for i, p in enumerate(plans):
            if uncovered(plans[:i] + plans[i + 1:]) is None:
                run.refute("minimality", p, "the set without this plan still covers every plan")
    except _Stop:
        pass
    return _finish(run)


def certify_top_quality(task: Task, plans: Sequence[Plan], q: int,
                        node_limit: int = DEFAULT_NODE_LIMIT,
                        max_actions: Optional[int] = DEFAULT_MAX_ACTIONS) -> CertificationReport:
    """``plans`` is the set of all plans of cost <= q iff every member costs
    at most q and the task with all members forbidden has no such plan."""
    plans = list(plans)
    run = _Run(task, _problem("top-quality", q=q))
    try:
        run.basic_checks(plans, q)
        witness = run.survivor("forbid-all", plans, Relation.EMPTY, q, node_limit, max_actions)
        if witness is not None:
            run.refute("coverage", witness, "plan of cost <= q missing from the set")
    except _Stop:
        pass
    return _finish(run)


def _minimality_job(args):
    task, rest, relation, q, node_limit, max_actions = args
    try:
        result = forbid_set(task, rest, relation, max_actions=max_actions)
        outcome = optimal_search(result.task, upper_bound=q, node_limit=node_limit)
    except ResourceLimitError as exc:
        return None, None, str(exc)
    return outcome, result.task, None


def certify_dominance(task: Task, plans: Sequence[Plan], q: int, relation: Relation,
                      node_limit: int = DEFAULT_NODE_LIMIT,
                      max_actions: Optional[int] = DEFAULT_MAX_ACTIONS,
                      jobs: int = 1) -> CertificationReport:
    """Certify a dominance top-quality solution through transformations.

    Step 1 forbids the extended set of ``plans`` and proves nothing of cost
    at most ``q`` remains. Step 2 drops each member in turn and requires a
    surviving plan of cost at most ``q``; ``jobs > 1`` runs those checks in
    worker processes.
    """
    plans = list(plans)
    run = _Run(task, _problem("dominance-top-quality", q=q, relation=relation, mode="transform"))
    try:
        run.basic_checks(plans, q)
        if relation is Relation.LOOPLESS:
            for p in plans:
                if not is_loopless(p):
                    run.refute("minimality", p, "member with a loop is dominated by its loop-free reduction")
        witness = run.survivor("extended-set", plans, relation, q, node_limit, max_actions)
        if witness is not None:
            run.refute("coverage", witness, "plan of cost <= q not dominated by the set")
        args = [(task, plans[:i] + plans[i + 1:], relation, q, node_limit, max_actions)
                for i in range(len(plans))]
        if jobs > 1 and len(args) > 1:
            with ProcessPoolExecutor(jobs) as pool:
                results = list(pool.map(_minimality_job, args))
        else:
            results = map(_minimality_job, args)
        for i, (outcome, transformed, error) in enumerate(results):
            name = f"without-{i}"
            if error is not None:
                run.record(name, status="limit")
                run.inconclusive(f"{name}: {error}")
            run.record(name, outcome, transformed)
            if outcome.status is not Status.OPTIMAL:
                run.refute("minimality", plans[i], "the set without this plan still covers every plan")
    except _Stop:
        pass
    return _finish(run)


def certify_top_k(task: Task, plans: Sequence[Plan], k: int,
                  node_limit: int = DEFAULT_NODE_LIMIT,
                  max_actions: Optional[int] = DEFAULT_MAX_ACTIONS) -> CertificationReport:
    if k < 1:
        raise UsageError("k must be positive")
    plans = list(plans)
    run = _Run(task, _problem("top-k", k=k))
    try:
        run.basic_checks(plans)
        if len(plans) > k:
            run.refute("cardinality", None, f"{len(plans)} plans for k={k}")
        if len(plans) < k:
            witness = run.survivor("forbid-all", plans, Relation.EMPTY, None, node_limit, max_actions)
            if witness is not None:
                run.refute("cardinality", witness, f"fewer than k={k} plans but another plan exists")
            return _finish(run)
        top = max(p.cost for p in plans)
        cheaper = [p for p in plans if p.cost < top]
        if not cheaper:
            try:
                outcome = optimal_search(task, upper_bound=top, node_limit=node_limit)
            except ResourceLimitError as exc:
                run.inconclusive(f"optimality of {top}: {exc}")
            run.record("optimal-cost", outcome, task)
            if outcome.cost is not None and outcome.cost < top:
                run.refute("coverage", outcome.plan, f"plan cheaper than {top} missing")
            return _finish(run)
        q = max(p.cost for p in cheaper)
        sub = certify_top_quality(task, cheaper, q, node_limit, max_actions)
        for step in sub.steps:
            step.name = f"lower-{step.name}"
            run.report.steps.append(step)
        if sub.verdict is Verdict.INCONCLUSIVE:
            run.inconclusive(sub.reason)
        if sub.verdict is Verdict.REFUTED:
            w = sub.witness
            run.refute(w.condition, w.plan, f"plans below the maximal cost: {w.detail}")
        witness = run.survivor("next-cost", cheaper, Relation.EMPTY, top, node_limit, max_actions)
        if witness is not None and witness.cost < top:
            run.refute("coverage", witness, f"plan cheaper than {top} missing")
    except _Stop:
        pass
    return _finish(run)


# extended sets ------------------------------------------------------------

class MaterializationRefused(UsageError):
    pass


@dataclass
class ExtendedSetSpec:
    task: Task
    base: list
    relation: Relation
    q: Optional[int] = None


def _reorderings(task: Task, plan: Plan):
    remaining: dict = {}
    for a in plan.steps:
        remaining[a] = remaining.get(a, 0) + 1
    steps = []

    def dfs(state):
        if len(steps) == len(plan.steps):
            if task.is_goal(state):
                yield tuple(steps)
            return
        for a in sorted(remaining):
            if remaining[a] and a in task.applicable(state):
                remaining[a] -= 1
                steps.append(a)
                yield from dfs(task.apply(state, a))
                steps.pop()
                remaining[a] += 1

    yield from dfs(task.initial)


def materialize_extended_set(spec: ExtendedSetSpec) -> list:
    """Explicit extended set: the base plans plus every plan of cost <= q that
    one of them dominates. Refused where it may be infinite or unbounded."""
    task, base, relation, q = spec.task, list(spec.base), spec.relation, spec.q
    out = list(dict.fromkeys(base))
    if relation is Relation.EMPTY:
        return out
    if relation is Relation.UNORDERED:
        seen = set(out)
        for p in base:
            for steps in _reorderings(task, p):
                cand = validate_plan(task, steps)
                if cand not in seen and (q is None or cand.cost <= q):
                    seen.add(cand)
                    out.append(cand)
        return out
    if q is None or any(a.cost <= 0 for a in task.actions):
        raise MaterializationRefused(
            f"extended set under {relation.value} needs a cost bound and positive action costs")
    seen = set(out)
    for p in enumerate_plans(task, q).plans:
        if p not in seen and any(dominates(relation, b, p) for b in base):
            seen.add(p)
            out.append(p)
    return out
