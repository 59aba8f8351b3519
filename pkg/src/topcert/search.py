"""Exhaustive search oracles: uniform-cost search and bounded plan enumeration."""
from __future__ import annotations

import enum
import heapq
import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Optional

from .errors import ResourceLimitError, UsageError
from .plans import Plan
from .task import Task

DEFAULT_NODE_LIMIT = 10 ** 7


class Status(enum.Enum):
    OPTIMAL = "optimal"
    UNSOLVABLE = "unsolvable"
    BOUND_EXCEEDED = "bound-exceeded"


@dataclass
class SearchOutcome:
    status: Status
    plan: Optional[Plan] = None
    bound: Optional[int] = None
    expanded: int = 0
    generated: int = 0
    elapsed: float = 0.0

    @property
    def cost(self) -> Optional[int]:
        return None if self.plan is None else self.plan.cost


def _extract(task, parents, state):
    steps, states = [], [state]
    while parents[state] is not None:
        state, a = parents[state]
        steps.append(a)
        states.append(state)
    steps.reverse()
    states.reverse()
    cost = sum(task.actions[a].cost for a in steps)
    return Plan(tuple(steps), cost, tuple(states))


def optimal_search(task: Task, upper_bound: Optional[int] = None,
                   node_limit: int = DEFAULT_NODE_LIMIT) -> SearchOutcome:
    """Uniform-cost search with full-state duplicate detection.

    Ties are broken first-in first-out. Successors costlier than
    ``upper_bound`` are discarded; if that happened and no plan was found the
    outcome is BOUND_EXCEEDED rather than UNSOLVABLE.
    """
    start = time.perf_counter()
    init = task.initial
    counter = itertools.count()
    open_list = [(0, next(counter), init)]
    best = {init: 0}
    parents = {init: None}
    closed = set()
    expanded = generated = 0
    pruned = False
    actions = task.actions
    while open_list:
        g, _, state = heapq.heappop(open_list)
        if state in closed:
            continue
        closed.add(state)
        if task.is_goal(state):
            plan = _extract(task, parents, state)
            return SearchOutcome(Status.OPTIMAL, plan, upper_bound, expanded, generated,
                                 time.perf_counter() - start)
        expanded += 1
        if expanded > node_limit:
            raise ResourceLimitError(f"node limit {node_limit} exceeded")
        for a in task.applicable(state):
            succ_g = g + actions[a].cost
            if upper_bound is not None and succ_g > upper_bound:
                pruned = True
                continue
            succ = task.apply(state, a)
            generated += 1
            if succ in closed:
                continue
            old = best.get(succ)
            if old is None or succ_g < old:
                best[succ] = succ_g
                parents[succ] = (state, a)
                heapq.heappush(open_list, (succ_g, next(counter), succ))
    status = Status.BOUND_EXCEEDED if pruned else Status.UNSOLVABLE
    return SearchOutcome(status, None, upper_bound, expanded, generated,
                         time.perf_counter() - start)


@dataclass
class EnumerationResult:
    plans: list
    complete: bool
    bound_used: Optional[float]
    length_cap: Optional[int] = None
    expanded: int = 0


def goal_distances(task: Task, bound: float = math.inf,
                   node_limit: int = DEFAULT_NODE_LIMIT) -> dict:
    """Exact cost-to-goal for every state reachable from the initial state
    with cost at most ``bound``; dead ends are absent from the result."""
    init = task.initial
    g = {init: 0}
    open_list = [(0, init)]
    closed = set()
    preds: dict = {}
    actions = task.actions
    while open_list:
        cost, state = heapq.heappop(open_list)
        if state in closed:
            continue
        closed.add(state)
        if len(closed) > node_limit:
            raise ResourceLimitError(f"node limit {node_limit} exceeded")
        for a in task.applicable(state):
            c = actions[a].cost
            succ_g = cost + c
            if succ_g > bound:
                continue
            succ = task.apply(state, a)
            preds.setdefault(succ, []).append((state, c))
            if succ_g < g.get(succ, math.inf):
                g[succ] = succ_g
                heapq.heappush(open_list, (succ_g, succ))
    h = {}
    open_list = [(0, s) for s in closed if task.is_goal(s)]
    heapq.heapify(open_list)
    while open_list:
        dist, state = heapq.heappop(open_list)
        if state in h:
            continue
        h[state] = dist
        for pred, c in preds.get(state, ()):
            if pred not in h:
                heapq.heappush(open_list, (dist + c, pred))
    return h


def _has_zero_cost(task):
    return any(a.cost == 0 for a in task.actions)


def enumerate_plans(task: Task, q: float, length_cap: Optional[int] = None,
                    node_limit: int = DEFAULT_NODE_LIMIT) -> EnumerationResult:
    """All plans of cost at most ``q`` (and length at most ``length_cap``).

    Depth-first over action sequences; a branch is cut as soon as its cost
    plus the exact remaining goal distance exceeds ``q``, so every expanded
    prefix extends to at least one reported plan.
    """
    if length_cap is None and _has_zero_cost(task):
        raise UsageError("zero-cost actions present: enumeration needs a length cap")
    h = goal_distances(task, q, node_limit)
    plans = []
    complete = True
    expanded = 0
    init = task.initial
    if h.get(init, math.inf) > q:
        return EnumerationResult(plans, True, q, length_cap)
    actions = task.actions
    steps, states = [], [init]

    def dfs(state, g):
        nonlocal complete, expanded
        expanded += 1
        if expanded > node_limit:
            raise ResourceLimitError(f"node limit {node_limit} exceeded")
        if task.is_goal(state):
            plans.append(Plan(tuple(steps), g, tuple(states)))
        for a in task.applicable(state):
            succ_g = g + actions[a].cost
            if succ_g > q:
                continue
            succ = task.apply(state, a)
            if succ_g + h.get(succ, math.inf) > q:
                continue
            if length_cap is not None and len(steps) >= length_cap:
                complete = False
                continue
            steps.append(a)
            states.append(succ)
            dfs(succ, succ_g)
            steps.pop()
            states.pop()

    dfs(init, 0)
    return EnumerationResult(plans, complete, q, length_cap, expanded)


def enumerate_loopless(task: Task, q: Optional[float] = None,
                       node_limit: int = DEFAULT_NODE_LIMIT) -> EnumerationResult:
    """All loopless plans (cost-filtered when ``q`` is given); never extends a
    path into a state it already visited."""
    bound = math.inf if q is None else q
    h = goal_distances(task, bound, node_limit)
    plans = []
    expanded = 0
    init = task.initial
    actions = task.actions
    if h.get(init, math.inf) > bound:
        return EnumerationResult(plans, True, q)
    steps, states = [], [init]
    on_path = {init}

    def dfs(state, g):
        nonlocal expanded
        expanded += 1
        if expanded > node_limit:
            raise ResourceLimitError(f"node limit {node_limit} exceeded")
        if task.is_goal(state):
            plans.append(Plan(tuple(steps), g, tuple(states)))
        for a in task.applicable(state):
            succ = task.apply(state, a)
            if succ in on_path:
                continue
            succ_g = g + actions[a].cost
            if succ_g + h.get(succ, math.inf) > bound:
                continue
            steps.append(a)
            states.append(succ)
            on_path.add(succ)
            dfs(succ, succ_g)
            on_path.discard(succ)
            steps.pop()
            states.pop()

    dfs(init, 0)
    return EnumerationResult(plans, True, q, None, expanded)
