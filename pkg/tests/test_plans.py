import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import plans
from topcert.errors import InvalidPlan, ParseError
from topcert.generate import random_task, t1, two_goals
from topcert.plans import (Relation, action_multiset, dominates, format_plan, is_loopless,
                           parse_plan_text, remove_loops, revisits, validate_plan)
from topcert.search import enumerate_plans
from topcert.task import Action, Task, Variable


def test_validate_plan(t1_plain):
    plan = validate_plan(t1_plain, [0, 1])
    assert plan.cost == 2
    assert [s[0] for s in plan.states] == [0, 1, 2]


def test_validate_rejects_inapplicable(t1_plain):
    with pytest.raises(InvalidPlan) as err:
        validate_plan(t1_plain, [1])
    assert err.value.step == 0 and err.value.reason == "inapplicable"


def test_validate_rejects_goal_miss(t1_plain):
    with pytest.raises(InvalidPlan) as err:
        validate_plan(t1_plain, [0])
    assert err.value.reason == "goal"
    assert err.value.step == 1


def test_loopless_examples(t1_plain, t1c):
    assert is_loopless(validate_plan(t1_plain, [0, 1]))
    acab = plans(t1c, "a c a b")[0]
    assert [s[0] for s in acab.states] == [0, 1, 0, 1, 2]
    assert not is_loopless(acab)
    trivial = Task([Variable("v", 1)], [], (0,), {0: 0})
    assert is_loopless(validate_plan(trivial, []))


def test_dominance_examples(t1c, goals2):
    ab, ba = plans(goals2, "a b", "b a")
    assert dominates(Relation.UNORDERED, ab, ba)
    ab, acab = plans(t1c, "a b", "a c a b")
    assert dominates(Relation.SUBSET, ab, acab)
    assert dominates(Relation.LOOPLESS, ab, acab)
    assert not dominates(Relation.LOOPLESS, ab, ab)
    assert not dominates(Relation.SUBSET, ab, ab)
    assert not dominates(Relation.EMPTY, ab, acab)


def test_loopless_dominance_needs_loopless_dominator(t1c):
    acab, = plans(t1c, "a c a b")
    assert not dominates(Relation.LOOPLESS, acab, acab)


def test_relation_parse():
    assert Relation.parse("none") is Relation.EMPTY
    assert Relation.parse("Loopless") is Relation.LOOPLESS
    with pytest.raises(ValueError):
        Relation.parse("bogus")


def test_remove_loops(t1c):
    acab, = plans(t1c, "a c a b")
    reduced = remove_loops(t1c, acab)
    assert reduced.steps == (0, 1)
    assert is_loopless(reduced)
    assert dominates(Relation.LOOPLESS, reduced, acab)


def test_plan_text_round_trip(t1c):
    plan, = plans(t1c, "a c a b")
    text = format_plan(t1c, plan)
    parsed = parse_plan_text(t1c, text)
    assert parsed.plan == plan and parsed.declared_cost == 4 and not parsed.diagnostics


def test_plan_text_cost_mismatch(t1c):
    parsed = parse_plan_text(t1c, "(a)\n(b)\n; cost = 7 (general cost)\n")
    assert parsed.plan.cost == 2
    assert len(parsed.diagnostics) == 1


def test_plan_text_unknown_action(t1c):
    with pytest.raises(ParseError) as err:
        parse_plan_text(t1c, "(a)\n(zz)\n")
    assert err.value.line == 2


def _instance(seed):
    rng = random.Random(seed)
    task = random_task(rng, costs=(0, 2))
    found = enumerate_plans(task, 4, length_cap=5, node_limit=20000).plans
    return rng, found[:12]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_unordered_is_equivalence(seed):
    _, found = _instance(seed)
    rel = Relation.UNORDERED
    for p in found:
        assert dominates(rel, p, p)
        for q in found:
            assert dominates(rel, p, q) == dominates(rel, q, p)
            for r in found:
                if dominates(rel, p, q) and dominates(rel, q, r):
                    assert dominates(rel, p, r)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_subset_and_loopless_properties(seed):
    _, found = _instance(seed)
    for p in found:
        assert not dominates(Relation.SUBSET, p, p)
        assert not dominates(Relation.LOOPLESS, p, p)
        for q in found:
            if dominates(Relation.LOOPLESS, p, q):
                assert not is_loopless(q)
            if dominates(Relation.SUBSET, p, q):
                assert q.cost >= p.cost
                for r in found:
                    if dominates(Relation.SUBSET, q, r):
                        assert dominates(Relation.SUBSET, p, r)


def test_action_multiset(t1c):
    acab, = plans(t1c, "a c a b")
    assert action_multiset(acab) == {0: 2, 1: 1, 2: 1}
