import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import plans
from topcert.errors import ResourceLimitError, UsageError
from topcert.generate import random_task, t1, two_goals
from topcert.plans import is_loopless
from topcert.search import Status, enumerate_loopless, enumerate_plans, goal_distances, optimal_search
from topcert.task import Action


def test_optimal_t1(t1_plain):
    out = optimal_search(t1_plain)
    assert out.status is Status.OPTIMAL
    assert out.cost == 2 and out.plan.steps == (0, 1)


def test_unsolvable():
    task = t1(with_c=False).replace(actions=[Action("a", {0: 0}, {0: 1})])
    assert optimal_search(task).status is Status.UNSOLVABLE


def test_bound_exceeded(t1_plain):
    out = optimal_search(t1_plain, upper_bound=1)
    assert out.status is Status.BOUND_EXCEEDED and out.plan is None and out.bound == 1


def test_node_limit(t1c):
    with pytest.raises(ResourceLimitError):
        optimal_search(t1c, node_limit=1)


def test_enumerate_t1c(t1c):
    found = enumerate_plans(t1c, 4).plans
    assert {p.steps for p in found} == {p.steps for p in plans(t1c, "a b", "a c a b")}


def test_enumerate_below_optimum(t1_plain):
    assert enumerate_plans(t1_plain, 1).plans == []


def test_enumerate_empty_plan():
    task = t1(with_c=True).replace(goal={0: 0})
    found = enumerate_plans(task, 0).plans
    assert [p.steps for p in found] == [()]


def test_enumerate_zero_cost_needs_cap(t1c):
    zero = t1c.replace(actions=[a if a.name != "c" else Action("c", a.pre, a.eff, 0)
                                for a in t1c.actions])
    with pytest.raises(UsageError):
        enumerate_plans(zero, 4)
    res = enumerate_plans(zero, 4, length_cap=4)
    assert not res.complete
    assert {p.steps for p in res.plans} == {(0, 1), (0, 2, 0, 1)}


def test_enumerate_loopless_examples(t1c, goals2):
    assert [p.steps for p in enumerate_loopless(t1c).plans] == [(0, 1)]
    assert {p.steps for p in enumerate_loopless(goals2).plans} == {(0, 1), (1, 0)}
    dead = t1c.replace(goal={0: 2}, actions=t1c.actions[:1])
    assert enumerate_loopless(dead).plans == []


def _brute(task, q, cap):
    out = set()

    def rec(state, steps, g):
        if g > q or len(steps) > cap:
            return
        if task.is_goal(state):
            out.add(tuple(steps))
        for a in task.applicable(state):
            rec(task.apply(state, a), steps + [a], g + task.actions[a].cost)

    rec(task.initial, [], 0)
    return out


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_enumeration_matches_brute_force(seed):
    rng = random.Random(seed)
    task = random_task(rng)
    q = rng.randint(0, 5)
    found = enumerate_plans(task, q).plans
    # positive costs: cost <= q implies length <= q
    assert {p.steps for p in found} == _brute(task, q, q)
    assert len(found) == len({p.steps for p in found})
    out = optimal_search(task)
    if out.status is Status.OPTIMAL:
        assert out.cost == min((p.cost for p in enumerate_plans(task, out.cost).plans))
    else:
        assert not found
    loopless = {p.steps for p in enumerate_loopless(task, q).plans}
    assert loopless == {p.steps for p in found if is_loopless(p)}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_goal_distances_are_exact(seed):
    task = random_task(random.Random(seed))
    h = goal_distances(task)
    for state, dist in h.items():
        out = optimal_search(task.replace(initial=state))
        assert out.cost == dist
