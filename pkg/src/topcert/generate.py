"""Small random SAS+ tasks for property testing and demos."""
from __future__ import annotations

import random
from typing import Optional

from .task import Action, Task, Variable


def random_task(rng: random.Random, n_vars=(2, 4), max_domain=3, n_actions=(3, 8),
                costs=(1, 3), goal_size=(1, 2)) -> Task:
    """Draw a task with ``n_vars`` variables of domain size 2..``max_domain``
    and ``n_actions`` actions with integer costs in ``costs``."""
    nv = rng.randint(*n_vars)
    domains = [rng.randint(2, max_domain) for _ in range(nv)]
    variables = [Variable(f"v{i}", d) for i, d in enumerate(domains)]
    actions = []
    for j in range(rng.randint(*n_actions)):
        eff_vars = rng.sample(range(nv), rng.randint(1, min(2, nv)))
        pre_vars = [v for v in range(nv) if rng.random() < 0.5]
        pre = {v: rng.randrange(domains[v]) for v in pre_vars}
        eff = {}
        for v in eff_vars:
            choices = [d for d in range(domains[v]) if d != pre.get(v)]
            eff[v] = rng.choice(choices)
        actions.append(Action(f"op{j}", pre, eff, rng.randint(*costs)))
    initial = tuple(rng.randrange(d) for d in domains)
    goal_vars = rng.sample(range(nv), rng.randint(goal_size[0], min(goal_size[1], nv)))
    goal = {v: rng.randrange(domains[v]) for v in goal_vars}
    return Task(variables, actions, initial, goal)


def t1(with_c: bool = True) -> Task:
    """One three-valued variable; a: 0->1, b: 1->2 and optionally c: 1->0; goal 2."""
    actions = [Action("a", {0: 0}, {0: 1}), Action("b", {0: 1}, {0: 2})]
    if with_c:
        actions.append(Action("c", {0: 1}, {0: 0}))
    return Task([Variable("v0", 3)], actions, (0,), {0: 2})


def two_goals(redundant: bool = False) -> Task:
    """Two independent binary goals set by a and b; ``redundant`` adds d,
    which only toggles a third variable."""
    variables = [Variable("v0", 2), Variable("v1", 2)]
    actions = [Action("a", {0: 0}, {0: 1}), Action("b", {1: 0}, {1: 1})]
    if redundant:
        variables.append(Variable("v2", 2))
        actions.append(Action("d", {2: 0}, {2: 1}))
    return Task(variables, actions, (0,) * len(variables), {0: 1, 1: 1})


def detour_task() -> Task:
    """Direct route a,b to the goal plus a detour through a state that only
    differs in a flag toggled by d."""
    variables = [Variable("v0", 3), Variable("flag", 2)]
    actions = [
        Action("a", {0: 0}, {0: 1}),
        Action("b", {0: 1}, {0: 2}),
        Action("d", {0: 1, 1: 0}, {1: 1}),
    ]
    return Task(variables, actions, (0, 0), {0: 2})


def unique_plan_task() -> Task:
    return Task([Variable("v0", 2)], [Action("a", {0: 0}, {0: 1})], (0,), {0: 1})
