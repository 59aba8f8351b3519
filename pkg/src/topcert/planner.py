"""Iterated search-and-forbid planners for top-quality and top-k problems."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Optional

from .errors import ResourceLimitError
from .plans import Plan, Relation, dominates, is_loopless, remove_loops
from .search import DEFAULT_NODE_LIMIT, Status, optimal_search
from .task import Task
from .transforms import TransformResult, extend

DEFAULT_MAX_ACTIONS = 10 ** 6


class Termination(enum.Enum):
    BOUND_EXCEEDED = "bound-exceeded"
    UNSOLVABLE = "unsolvable"
    K_REACHED = "k-reached"
    LIMIT = "limit"


@dataclass
class Round:
    plan: Optional[Plan]
    cost: Optional[int]
    kind: str
    actions: int
    variables: int
    expanded: int


@dataclass
class IterationTrace:
    rounds: list = field(default_factory=list)
    termination: Optional[Termination] = None
    reason: str = ""

    @property
    def complete(self) -> bool:
        return self.termination is not Termination.LIMIT

    def to_dict(self, task: Task) -> dict:
        return {
            "termination": self.termination.value if self.termination else None,
            "complete": self.complete,
            "reason": self.reason,
            "rounds": [{
                "plan": r.plan.names(task) if r.plan is not None else None,
                "cost": r.cost, "transformation": r.kind,
                "actions": r.actions, "variables": r.variables, "expanded": r.expanded,
            } for r in self.rounds],
        }

    def to_json(self, task: Task) -> str:
        return json.dumps(self.to_dict(task), indent=2, sort_keys=True) + "\n"


def _round(trace, result, outcome, plan, kind):
    current = result.task
    trace.rounds.append(Round(plan, None if plan is None else plan.cost, kind,
                              len(current.actions), len(current.variables), outcome.expanded))


def plan_top_quality(task: Task, q: int, relation: Relation = Relation.EMPTY,
                     node_limit: int = DEFAULT_NODE_LIMIT,
                     max_actions: int = DEFAULT_MAX_ACTIONS):
    """Find a dominance top-quality solution by repeatedly taking an optimal
    plan and forbidding it together with everything it dominates.

    Returns ``(plans, trace)``; ``trace.complete`` is False when a limit cut
    the iteration short.
    """
    result = TransformResult(task)
    plans: list = []
    trace = IterationTrace()
    kind = relation.value
    while True:
        try:
            outcome = optimal_search(result.task, upper_bound=q, node_limit=node_limit)
        except ResourceLimitError as exc:
            trace.termination, trace.reason = Termination.LIMIT, str(exc)
            break
        if outcome.status is not Status.OPTIMAL:
            _round(trace, result, outcome, None, kind)
            trace.termination = (Termination.UNSOLVABLE if outcome.status is Status.UNSOLVABLE
                                 else Termination.BOUND_EXCEEDED)
            break
        plan = result.map_back(outcome.plan)
        if relation is Relation.LOOPLESS and not is_loopless(plan):
            plan = remove_loops(task, plan)
        _round(trace, result, outcome, plan, kind)
        plans.append(plan)
        try:
            result = extend(result, plan, relation, max_actions=max_actions)
        except ResourceLimitError as exc:
            trace.termination, trace.reason = Termination.LIMIT, str(exc)
            break
    if relation is Relation.SUBSET:
        # zero-cost actions can make a later plan strictly dominate an earlier one
        plans = [p for p in plans
                 if not any(o is not p and dominates(relation, o, p) for o in plans)]
    return plans, trace


def plan_top_k(task: Task, k: int, node_limit: int = DEFAULT_NODE_LIMIT,
               max_actions: int = DEFAULT_MAX_ACTIONS, max_rounds: Optional[int] = None):
    """The k cheapest plans (all plans if there are fewer), cheapest first."""
    result = TransformResult(task)
    plans: list = []
    trace = IterationTrace()
    while len(plans) < k:
        if max_rounds is not None and len(trace.rounds) >= max_rounds:
            trace.termination, trace.reason = Termination.LIMIT, f"{max_rounds} rounds"
            break
        try:
            outcome = optimal_search(result.task, node_limit=node_limit)
        except ResourceLimitError as exc:
            trace.termination, trace.reason = Termination.LIMIT, str(exc)
            break
        if outcome.status is not Status.OPTIMAL:
            _round(trace, result, outcome, None, "exact")
            trace.termination = Termination.UNSOLVABLE
            break
        plan = result.map_back(outcome.plan)
        _round(trace, result, outcome, plan, "exact")
        plans.append(plan)
        if len(plans) == k:
            trace.termination = Termination.K_REACHED
            break
        try:
            result = extend(result, plan, Relation.EMPTY, max_actions=max_actions)
        except ResourceLimitError as exc:
            trace.termination, trace.reason = Termination.LIMIT, str(exc)
            break
    return plans, trace
