"""Plan-forbidding task transformations.

Every transformation returns a :class:`TransformResult` holding the new task
and the map ``r`` from its actions back to the actions of the original task.
Single-plan transformations can be chained (:func:`forbid_set`); plans of the
original task are carried into a chain with :func:`forward_map`.

The transformations only ever append variables, so the original variables are
always the first ``len(original.variables)`` of any transformed task. Builders
use this to reason about original states and original action identities even
when applied to an already transformed task.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .errors import ContractError, PlanForbidden, ResourceLimitError, UsageError
from .plans import Plan, Relation, is_loopless, validate_plan
from .task import Action, Task, Variable, holds

F, T = 0, 1
UNSEEN, SEEN, CURRENT = 0, 1, 2  # values of the per-position plan variables


@dataclass(frozen=True)
class Stage:
    """One compilation step: ``task`` plus the map from its actions to the
    actions of the task it was built from."""
    task: Task
    parent: tuple
    kind: str
    origin: tuple = ()  # action -> action of the original task

    @cached_property
    def copies(self) -> dict:
        out: dict = {}
        for new, old in enumerate(self.parent):
            out.setdefault(old, []).append(new)
        return out


@dataclass(frozen=True)
class TransformResult:
    original: Task
    stages: tuple = ()
    kind: str = "identity"
    source_plans: tuple = ()
    diagnostics: tuple = ()

    @property
    def task(self) -> Task:
        return self.stages[-1].task if self.stages else self.original

    @property
    def source_plan(self) -> Optional[Plan]:
        return self.source_plans[0] if len(self.source_plans) == 1 else None

    @property
    def mapping(self) -> tuple:
        """For each action of the transformed task, the original action id."""
        if not self.stages:
            return tuple(range(len(self.original.actions)))
        return self.stages[-1].origin

    def map_back(self, plan: Plan) -> Plan:
        """r-image of a plan of the transformed task, validated in the original."""
        mapping = self.mapping
        return validate_plan(self.original, [mapping[a] for a in plan.steps])

    def mapping_json(self) -> str:
        names = {}
        orig = self.original.actions
        for new, old in zip(self.task.actions, self.mapping):
            names[new.name] = orig[old].name
        return json.dumps(names, indent=2, sort_keys=True) + "\n"


def _merge(base: dict, extra: Iterable) -> Optional[dict]:
    out = dict(base)
    for var, val in extra:
        old = out.get(var)
        if old is None:
            out[var] = val
        elif old != val:
            return None
    return out


class _Builder:
    """Accumulates the variables and action copies of a transformed task."""

    def __init__(self, task: Task, max_actions: Optional[int], tag: str):
        self.task = task
        self.variables = list(task.variables)
        self.actions: list = []
        self.parent: list = []
        self.max_actions = max_actions
        self.tag = tag
        self.names: dict = {}

    def new_var(self, name, values) -> int:
        self.variables.append(Variable(f"{self.tag}-{name}", len(values), tuple(values)))
        return len(self.variables) - 1

    def flag(self, name) -> int:
        return self.new_var(name, ("F", "T"))

    def add(self, origin: int, family: str, pre: dict, eff: dict) -> None:
        source = self.task.actions[origin]
        name = f"{source.name}__{family}"
        count = self.names.get(name, 0)
        self.names[name] = count + 1
        if count:
            name = f"{name}_{count}"
        self.actions.append(Action(name, pre, eff, source.cost))
        self.parent.append(origin)
        if self.max_actions is not None and len(self.actions) > self.max_actions:
            raise ResourceLimitError(
                f"transformed task exceeds {self.max_actions} actions")

    def build(self, initial: Sequence[int], goal: dict, kind: str) -> Stage:
        task = Task(self.variables, self.actions, tuple(self.task.initial) + tuple(initial),
                    goal, metric=True)
        return Stage(task, tuple(self.parent), kind)


# traversal bookkeeping ---------------------------------------------------

class TraversalIndex:
    """States of a plan and, per position, which actions can produce that state.

    ``members[o]`` lists the positions ``i`` with ``prv(o) | eff(o) <= s_i``;
    ``cond[(o, i)]`` is the rest of ``s_i`` (the variables outside ``prv(o)``
    and ``eff(o)``). Only the first ``n_base`` variables take part.
    """

    def __init__(self, task: Task, plan: Plan, n_base: Optional[int] = None):
        n_base = len(task.variables) if n_base is None else n_base
        self.n_base = n_base
        self.full_states = plan.states
        self.states = tuple(s[:n_base] for s in plan.states)
        self.position = {s: i for i, s in enumerate(self.states)}
        self.members: list = []
        self.cond: dict = {}
        for o, action in enumerate(task.actions):
            prv = [(v, d) for v, d in action.prevail if v < n_base]
            eff = [(v, d) for v, d in action.eff if v < n_base]
            fixed = {v for v, _ in prv} | {v for v, _ in eff}
            hits = []
            for i, s in enumerate(self.states):
                if holds(prv, s) and holds(eff, s):
                    hits.append(i)
                    self.cond[(o, i)] = tuple((v, s[v]) for v in range(n_base) if v not in fixed)
            self.members.append(tuple(hits))

    def negated_cond_terms(self, o: int, i: int, domains) -> list:
        """Pairwise exclusive conjunctions whose disjunction is "not cond_i(o)".

        Term j fixes the first j-1 condition variables to their cond values
        and the j-th to one of its other values.
        """
        terms = []
        prefix = []
        for var, val in self.cond[(o, i)]:
            for other in range(domains[var]):
                if other != val:
                    terms.append(tuple(prefix) + ((var, other),))
            prefix.append((var, val))
        return terms


def _conjoin(base: dict, clauses: Sequence[list], within: Optional[tuple] = None) -> list:
    """Expand ``base`` AND (each clause a disjunction of terms) into
    consistent, deduplicated conjunctions. With ``within`` set, only
    conjunctions satisfied by that state are kept."""
    partial = [base]
    for clause in clauses:
        nxt = []
        for p in partial:
            for term in clause:
                if within is not None and not holds(term, within):
                    continue
                m = _merge(p, term)
                if m is not None:
                    nxt.append(m)
        partial = nxt
        if not partial:
            return []
    seen = set()
    out = []
    for p in partial:
        key = tuple(sorted(p.items()))
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


def _check_plan(task: Task, plan: Plan) -> None:
    if plan.states and plan.states[0] != task.initial:
        raise UsageError("plan does not start in the task's initial state")


# exact plan --------------------------------------------------------------

def _exact_stage(task: Task, plan: Plan, n_base: int, labels, max_actions) -> Stage:
    n = len(plan.steps)
    b = _Builder(task, max_actions, f"ex{len(task.variables)}")
    d = b.flag("diverged")
    end = b.flag("end")
    pos = b.new_var("pos", tuple(str(i) for i in range(n + 1)))
    steps = plan.steps
    for o, action in enumerate(task.actions):
        pre, eff = dict(action.pre), dict(action.eff)
        for k in range(n + 1):
            if not holds(action.pre, plan.states[k]):
                continue  # while following, the state is exactly s_k
            if k < n and o == steps[k]:
                extra_eff = {pos: k + 1}
                if k + 1 == n:
                    extra_eff[end] = T
                b.add(o, f"follow{k + 1}", {**pre, d: F, pos: k}, {**eff, **extra_eff})
            else:
                extra_eff = {d: T}
                if k == n:
                    extra_eff[end] = F
                b.add(o, f"dev{k}", {**pre, d: F, pos: k}, {**eff, **extra_eff})
        b.add(o, "after", {**pre, d: T}, eff)
    goal = dict(task.goal)
    goal[end] = F
    return b.build((F, T if n == 0 else F, 0), goal, "exact")


# multiset counting -------------------------------------------------------

def _label_multiset(plan: Plan, labels) -> dict:
    counts: dict = {}
    for a in plan.steps:
        lab = labels[a]
        counts[lab] = counts.get(lab, 0) + 1
    return counts


def _others(counters: dict, me) -> tuple:
    """Split "every other counter is full" into one all-full condition and a
    family of exclusive not-all-full conditions."""
    full = {}
    not_full = []
    for lab, (var, m) in counters.items():
        if lab == me:
            continue
        for val in range(m):
            not_full.append({**full, var: val})
        full[var] = m
    return full, not_full


def _counters(b: _Builder, multiset: dict) -> dict:
    return {lab: (b.new_var(f"count{lab}", tuple(str(i) for i in range(m + 1))), m)
            for lab, m in sorted(multiset.items())}


def _unordered_stage(task: Task, plan: Plan, n_base: int, labels, max_actions) -> Stage:
    b = _Builder(task, max_actions, f"un{len(task.variables)}")
    multiset = _label_multiset(plan, labels)
    within = b.flag("within")
    match = b.flag("match")
    counters = _counters(b, multiset)
    for o, action in enumerate(task.actions):
        pre, eff = dict(action.pre), dict(action.eff)
        lab = labels[o]
        b.add(o, "out", {**pre, within: F}, eff)
        if lab not in counters:
            b.add(o, "extra", {**pre, within: T}, {**eff, within: F, match: F})
            continue
        var, m = counters[lab]
        full, not_full = _others(counters, lab)
        for c in range(m):
            base = {**pre, within: T, var: c}
            if c + 1 < m:
                b.add(o, f"inc{c}", base, {**eff, var: c + 1})
                continue
            b.add(o, "complete", {**base, **full}, {**eff, var: m, match: T})
            for cond in not_full:
                b.add(o, "partial", {**base, **cond}, {**eff, var: m})
        b.add(o, "extra", {**pre, within: T, var: m}, {**eff, within: F, match: F})
    initial = [T, T if not multiset else F] + [0] * len(counters)
    goal = dict(task.goal)
    goal[match] = F
    return b.build(initial, goal, "unordered")


def _superset_stage(task: Task, plan: Plan, n_base: int, labels, max_actions) -> Stage:
    b = _Builder(task, max_actions, f"su{len(task.variables)}")
    multiset = _label_multiset(plan, labels)
    covered = b.flag("covered")
    counters = _counters(b, multiset)
    for o, action in enumerate(task.actions):
        pre, eff = dict(action.pre), dict(action.eff)
        lab = labels[o]
        if lab not in counters:
            b.add(o, "free", pre, eff)
            continue
        var, m = counters[lab]
        full, not_full = _others(counters, lab)
        for c in range(m - 1):
            b.add(o, f"inc{c}", {**pre, var: c}, {**eff, var: c + 1})
        base = {**pre, var: m - 1}
        b.add(o, "complete", {**base, **full}, {**eff, var: m, covered: T})
        for cond in not_full:
            b.add(o, "partial", {**base, **cond}, {**eff, var: m})
        b.add(o, "full", {**pre, var: m}, eff)
    initial = [T if not multiset else F] + [0] * len(counters)
    goal = dict(task.goal)
    goal[covered] = F
    return b.build(initial, goal, "superset")


def _strict_superset_stage(task: Task, plan: Plan, n_base: int, labels, max_actions) -> Stage:
    # forbids exactly the plans whose multiset strictly contains the plan's
    b = _Builder(task, max_actions, f"ss{len(task.variables)}")
    multiset = _label_multiset(plan, labels)
    covered = b.flag("covered")
    extra = b.flag("extra")
    bad = b.flag("bad")
    counters = _counters(b, multiset)
    for o, action in enumerate(task.actions):
        pre, eff = dict(action.pre), dict(action.eff)
        lab = labels[o]
        surplus_pre = [pre] if lab not in counters else [{**pre, counters[lab][0]: counters[lab][1]}]
        for base in surplus_pre:
            b.add(o, "surplus", {**base, covered: T}, {**eff, extra: T, bad: T})
            b.add(o, "surplus", {**base, covered: F}, {**eff, extra: T})
        if lab not in counters:
            continue
        var, m = counters[lab]
        full, not_full = _others(counters, lab)
        for c in range(m - 1):
            b.add(o, f"inc{c}", {**pre, var: c}, {**eff, var: c + 1})
        base = {**pre, var: m - 1}
        b.add(o, "complete", {**base, **full, extra: T}, {**eff, var: m, covered: T, bad: T})
        b.add(o, "complete", {**base, **full, extra: F}, {**eff, var: m, covered: T})
        for cond in not_full:
            b.add(o, "partial", {**base, **cond}, {**eff, var: m})
    initial = [T if not multiset else F, F, F] + [0] * len(counters)
    goal = dict(task.goal)
    goal[bad] = F
    return b.build(initial, goal, "strict-superset")


# loopless ----------------------------------------------------------------

def _loopless_stage(task: Task, plan: Plan, n_base: int, labels, max_actions) -> Stage:
    """Forbid ``plan`` and every plan that visits one of its states twice.

    Variables: ``d`` (diverged from the plan), ``e`` (a plan state was
    reached a second time; a sink), ``end`` (the execution so far is exactly
    the plan) and one ternary ``x_i`` per plan state (unseen / seen /
    current position while following the plan).
    """
    idx = TraversalIndex(task, plan, n_base)
    n = len(plan.steps)
    steps = plan.steps
    domains = task.domains
    b = _Builder(task, max_actions, f"ll{len(task.variables)}")
    d = b.flag("d")
    e = b.flag("e")
    end = b.flag("end")
    x = [b.new_var(f"x{i}", ("0", "1", "C")) for i in range(n + 1)]

    for o, action in enumerate(task.actions):
        pre, eff = dict(action.pre), dict(action.eff)
        members = idx.members[o]
        neg_clauses = [idx.negated_cond_terms(o, i, domains) for i in members]

        # follow the plan
        for i in range(1, n + 1):
            if steps[i - 1] != o:
                continue
            extra = {x[i - 1]: SEEN, x[i]: CURRENT}
            if i == n:
                extra[end] = T
            b.add(o, f"follow{i}", {**pre, e: F, d: F, x[i - 1]: CURRENT}, {**eff, **extra})

        # first deviation after following k steps; the state there is known
        for k in range(n + 1):
            if k < n and steps[k] == o:
                continue
            here = idx.full_states[k]
            if not holds(action.pre, here):
                continue
            at_k = {**pre, e: F, d: F, x[k]: CURRENT}
            leave = {end: F} if k == n else {}
            for i in members:
                cond = idx.cond[(o, i)]
                if not holds(cond, here):
                    continue
                if i < k:
                    b.add(o, f"red{k}_{i}", _merge({**at_k, x[i]: SEEN}, cond),
                          {**eff, e: T, **leave})
                elif i == k:
                    b.add(o, f"red{k}_{i}", _merge(at_k, cond), {**eff, e: T, **leave})
                elif i == k + 1:
                    b.add(o, f"cyan{k}", _merge(at_k, cond),
                          {**eff, d: T, x[k]: SEEN, x[i]: SEEN, **leave})
                else:
                    b.add(o, f"magenta{k}_{i}", _merge({**at_k, x[i]: UNSEEN}, cond),
                          {**eff, d: T, x[i]: SEEN, x[k]: SEEN, **leave})
            if members:
                for p in _conjoin(at_k, neg_clauses, within=here):
                    b.add(o, f"blue{k}", p, {**eff, d: T, x[k]: SEEN, **leave})
            else:
                b.add(o, f"violet{k}", at_k, {**eff, d: T, x[k]: SEEN, **leave})

        # after the deviation
        after = {**pre, e: F, d: T}
        for i in members:
            cond = idx.cond[(o, i)]
            b.add(o, f"green{i}", _merge({**after, x[i]: UNSEEN}, cond), {**eff, x[i]: SEEN})
            b.add(o, f"again{i}", _merge({**after, x[i]: SEEN}, cond), {**eff, e: T})
        if members:
            for p in _conjoin(after, neg_clauses):
                b.add(o, "orange", p, eff)
        else:
            b.add(o, "purple", after, eff)

    initial = [F, F, T if n == 0 else F, CURRENT] + [UNSEEN] * n
    goal = dict(task.goal)
    goal[e] = F
    goal[end] = F
    return b.build(initial, goal, "loopless")


# public API --------------------------------------------------------------

_BUILDERS = {
    "exact": [_exact_stage],
    "unordered": [_unordered_stage],
    "superset": [_superset_stage],
    "strict-superset": [_exact_stage, _strict_superset_stage],
    "loopless": [_loopless_stage],
}

RELATION_KIND = {
    Relation.EMPTY: "exact",
    Relation.UNORDERED: "unordered",
    Relation.SUBSET: "strict-superset",
    Relation.LOOPLESS: "loopless",
}


PRUNE_STATE_LIMIT = 200_000


def _prune_dead(stage: Stage, limit: int = PRUNE_STATE_LIMIT) -> Stage:
    """Drop copies that are applicable in no reachable state.

    Chained stages are strongly correlated (every stage of a chain counts the
    same actions), so most combinations of copies can never fire together.
    Removing them leaves the plan set untouched and keeps the next stage from
    copying dead actions. Gives up, returning ``stage`` as is, when the
    reachable state space exceeds ``limit``.
    """
    task = stage.task
    seen = {task.initial}
    queue = deque(seen)
    used = set()
    while queue:
        state = queue.popleft()
        for a in task.applicable(state):
            used.add(a)
            succ = task.apply(state, a)
            if succ not in seen:
                if len(seen) >= limit:
                    return stage
                seen.add(succ)
                queue.append(succ)
    if len(used) == len(task.actions):
        return stage
    keep = sorted(used)
    pruned = task.replace(actions=[task.actions[a] for a in keep])
    return Stage(pruned, tuple(stage.parent[a] for a in keep), stage.kind,
                 tuple(stage.origin[a] for a in keep))


def _extend(result: TransformResult, kind: str, plan: Plan, max_actions,
            lifted: Optional[Plan] = None, prune: bool = False) -> TransformResult:
    """Add the stages forbidding ``plan`` (a plan of the original task)."""
    n_base = len(result.original.variables)
    stages = list(result.stages)
    current = result
    for position, builder in enumerate(_BUILDERS[kind]):
        if position or lifted is None:
            lifted = _lift_plan(current, plan, require_goal=position == 0)
        labels = current.mapping
        stage = builder(current.task, lifted, n_base, labels, max_actions)
        stage = Stage(stage.task, stage.parent, stage.kind, tuple(labels[p] for p in stage.parent))
        if prune:
            stage = _prune_dead(stage)
        stages.append(stage)
        current = TransformResult(result.original, tuple(stages), kind, result.source_plans)
    return TransformResult(result.original, tuple(stages), kind,
                           result.source_plans + (plan,), result.diagnostics)


def _single(task: Task, plan: Plan, kind: str, max_actions=None) -> TransformResult:
    _check_plan(task, plan)
    return _extend(TransformResult(task), kind, plan, max_actions)


def forbid_exact_plan(task: Task, plan: Plan, *, max_actions=None) -> TransformResult:
    """Forbid exactly ``plan``."""
    return _single(task, plan, "exact", max_actions)


def forbid_unordered(task: Task, plan: Plan, *, max_actions=None) -> TransformResult:
    """Forbid every plan with the same action multiset as ``plan``."""
    return _single(task, plan, "unordered", max_actions)


def forbid_superset(task: Task, plan: Plan, *, strict: bool = False,
                    max_actions=None) -> TransformResult:
    """Forbid every plan whose action multiset contains that of ``plan``.

    With ``strict=True`` only ``plan`` itself and the plans with a strictly
    larger multiset are forbidden; reorderings of ``plan`` survive.
    """
    return _single(task, plan, "strict-superset" if strict else "superset", max_actions)


def forbid_loopless(task: Task, plan: Plan, *, max_actions=None) -> TransformResult:
    """Forbid ``plan`` and every plan revisiting one of its states."""
    if not is_loopless(plan):
        raise ContractError("forbid_loopless needs a loopless plan")
    return _single(task, plan, "loopless", max_actions)


def forward_map(result: TransformResult, plan: Plan) -> Plan:
    """Lift a plan of the original task into the transformed task.

    Raises PlanForbidden when the lifted sequence is not a plan there, and
    InvalidPlan when ``plan`` is not a plan of the original task.
    """
    return _lift_plan(result, plan, require_goal=True)


def _lift_plan(result: TransformResult, plan: Plan, require_goal: bool) -> Plan:
    steps = validate_plan(result.original, plan.steps).steps
    for i, stage in enumerate(result.stages):
        last = i == len(result.stages) - 1
        steps = _lift(stage, steps, require_goal or not last)
    task = result.task
    state = task.initial
    states = [state]
    for a in steps:
        state = task.apply(state, a)
        states.append(state)
    return Plan(tuple(steps), plan.cost, tuple(states))


def _lift(stage: Stage, steps: Sequence[int], require_goal: bool = True) -> tuple:
    task = stage.task
    copies = stage.copies
    state = task.initial
    lifted = []
    for i, a in enumerate(steps):
        candidates = [c for c in copies.get(a, ()) if holds(task.actions[c].pre, state)]
        if len(candidates) > 1:
            raise AssertionError(f"step {i}: {len(candidates)} copies applicable; lifting is not unique")
        if not candidates:
            raise PlanForbidden(i, "inapplicable", "plan is forbidden by the transformation")
        lifted.append(candidates[0])
        state = task.apply(state, candidates[0])
    if require_goal and not task.is_goal(state):
        raise PlanForbidden(len(steps), "goal", "plan is forbidden by the transformation")
    return tuple(lifted)


def forbid_set(task: Task, plans: Sequence[Plan], relation: Relation, *,
               max_actions=None) -> TransformResult:
    """Forbid every plan in ``plans`` together with the plans each dominates.

    Plans already forbidden by an earlier member are skipped and reported in
    ``diagnostics``.
    """
    kind = RELATION_KIND[relation]
    if relation is Relation.LOOPLESS:
        for p in plans:
            if not is_loopless(p):
                raise ContractError("loopless forbidding needs loopless plans")
    result = TransformResult(task, kind=f"set:{relation.value}")
    diagnostics = []
    for i, plan in enumerate(plans):
        _check_plan(task, plan)
        try:
            lifted = forward_map(result, plan)
        except PlanForbidden:
            diagnostics.append(f"plan {i} is already forbidden by earlier plans; skipped")
            result = TransformResult(task, result.stages, result.kind,
                                     result.source_plans, tuple(diagnostics))
            continue
        result = _extend(result, kind, plan, max_actions, lifted, prune=True)
        result = TransformResult(task, result.stages, f"set:{relation.value}",
                                 result.source_plans, tuple(diagnostics))
    return result


def extend(result: TransformResult, plan: Plan, relation: Relation, *,
           max_actions=None) -> TransformResult:
    """Additionally forbid ``plan`` (a plan of ``result.original``) and the
    plans it dominates under ``relation``."""
    if relation is Relation.LOOPLESS and not is_loopless(plan):
        raise ContractError("loopless forbidding needs a loopless plan")
    return _extend(result, RELATION_KIND[relation], plan, max_actions, prune=True)
