import json
import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from conftest import plans
from helpers import draw, extended, forbidden_by, image, loopless_instance
from topcert.errors import ContractError, PlanForbidden
from topcert.generate import detour_task, t1, two_goals, unique_plan_task
from topcert.plans import Relation, is_loopless, validate_plan
from topcert.search import Status, enumerate_plans, optimal_search
from topcert.task import Action, Task, Variable
from topcert.transforms import (TraversalIndex, forbid_exact_plan, forbid_loopless, forbid_set,
                                forbid_superset, forbid_unordered, forward_map)


# forbid_exact_plan

def test_exact_t1c(t1c):
    ab, acab = plans(t1c, "a b", "a c a b")
    result = forbid_exact_plan(t1c, ab)
    assert image(result, 2) == Counter()
    assert image(result, 4) == Counter({acab.steps: 1})


def test_exact_two_orderings(goals2):
    ab, ba = plans(goals2, "a b", "b a")
    assert image(forbid_exact_plan(goals2, ab), 2) == Counter({ba.steps: 1})


def test_exact_empty_plan():
    task = t1(with_c=True).replace(goal={0: 0})
    empty = validate_plan(task, [])
    result = forbid_exact_plan(task, empty)
    assert not result.task.is_goal(result.task.initial)
    assert image(result, 2) == Counter({(0, 2): 1})


def test_exact_forward_map(t1_plain):
    ab, = plans(t1_plain, "a b")
    with pytest.raises(PlanForbidden):
        forward_map(forbid_exact_plan(t1_plain, ab), ab)


# forbid_unordered

def test_unordered_two_goals(goals2):
    ab, = plans(goals2, "a b")
    assert image(forbid_unordered(goals2, ab), 2) == Counter()


def test_unordered_keeps_other_multisets(t1c):
    ab, acab = plans(t1c, "a b", "a c a b")
    assert image(forbid_unordered(t1c, ab), 4) == Counter({acab.steps: 1})


def test_unordered_smaller_multiset_survives():
    task = Task([Variable("v", 2)], [Action("a", {}, {0: 1})], (0,), {0: 1})
    a, aa = plans(task, "a", "a a")
    assert image(forbid_unordered(task, aa), 2) == Counter({a.steps: 1})


def test_unordered_forward_map(goals2):
    redundant = two_goals(redundant=True)
    ab, adb = plans(redundant, "a b", "a d b")
    result = forbid_unordered(redundant, ab)
    lifted = forward_map(result, adb)
    assert lifted.cost == adb.cost
    assert result.map_back(lifted) == adb


# forbid_superset

def test_superset_t1c(t1c):
    ab, = plans(t1c, "a b")
    assert image(forbid_superset(t1c, ab), 4) == Counter()


def test_superset_redundant_action():
    task = two_goals(redundant=True)
    ab, adb = plans(task, "a b", "a d b")
    result = forbid_superset(task, ab)
    with pytest.raises(PlanForbidden):
        forward_map(result, adb)
    assert image(result, 3) == Counter()


def test_superset_smaller_plan_survives():
    task = Task([Variable("v", 3)], [Action("a", {0: 0}, {0: 1}), Action("b", {0: 1}, {0: 2}),
                                     Action("z", {0: 0}, {0: 2})], (0,), {0: 2})
    ab, z = plans(task, "a b", "z")
    assert image(forbid_superset(task, ab), 3) == Counter({z.steps: 1})


def test_strict_superset_keeps_reorderings(goals2):
    ab, ba = plans(goals2, "a b", "b a")
    assert image(forbid_superset(goals2, ab, strict=True), 2) == Counter({ba.steps: 1})


# forbid_loopless

def test_loopless_t1c(t1c):
    ab, acab = plans(t1c, "a b", "a c a b")
    result = forbid_loopless(t1c, ab)
    assert image(result, 4) == Counter()
    with pytest.raises(PlanForbidden):
        forward_map(result, acab)


def test_loopless_detour(detour):
    ab, adb = plans(detour, "a b", "a d b")
    result = forbid_loopless(detour, ab)
    assert image(result, 3) == Counter({adb.steps: 1})
    lifted = forward_map(result, adb)
    names = [v.name for v in result.task.variables]
    final = lifted.states[-1]
    assert final[names.index(next(n for n in names if n.endswith("-d")))] == 1
    assert final[names.index(next(n for n in names if n.endswith("-e")))] == 0


def test_loopless_unique_plan():
    task = unique_plan_task()
    a = validate_plan(task, [0])
    assert optimal_search(forbid_loopless(task, a).task).status is Status.UNSOLVABLE


def test_loopless_rejects_loops(t1c):
    acab, = plans(t1c, "a c a b")
    with pytest.raises(ContractError):
        forbid_loopless(t1c, acab)


def test_loopless_prefix_plan_survives():
    # <a> and <a, b> are both plans; forbidding <a> must keep <a, b>
    task = Task([Variable("v", 3), Variable("w", 2)],
                [Action("a", {0: 0}, {0: 1}), Action("b", {0: 1}, {1: 1})], (0, 0), {0: 1})
    a, ab = plans(task, "a", "a b")
    assert image(forbid_loopless(task, a), 2) == Counter({ab.steps: 1})


# forbid_set

def test_set_empty_relation(goals2):
    both = plans(goals2, "a b", "b a")
    result = forbid_set(goals2, both, Relation.EMPTY)
    assert image(result, 2) == Counter()


def test_set_unordered_one_stage(goals2):
    ab, = plans(goals2, "a b")
    result = forbid_set(goals2, [ab], Relation.UNORDERED)
    assert len(result.stages) == 1
    assert image(result, 2) == Counter()


def test_set_identity(t1c):
    result = forbid_set(t1c, [], Relation.LOOPLESS)
    assert result.task == t1c
    assert result.mapping == (0, 1, 2)


def test_set_redundant_member_reported(goals2):
    ab, ba = plans(goals2, "a b", "b a")
    result = forbid_set(goals2, [ab, ba], Relation.UNORDERED)
    assert len(result.diagnostics) == 1
    assert len(result.source_plans) == 1


def test_mapping_json(t1c):
    ab, = plans(t1c, "a b")
    result = forbid_loopless(t1c, ab)
    mapping = json.loads(result.mapping_json())
    assert set(mapping.values()) <= {"a", "b", "c"}
    assert len(mapping) == len(result.task.actions)


# traversal index

@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_members_and_cond_characterise_plan_states(seed):
    rng = random.Random(seed)
    inst = loopless_instance(rng)
    if inst is None:
        return
    task, pi, _, _ = inst
    idx = TraversalIndex(task, pi)
    for _ in range(10):
        state = tuple(rng.randrange(d) for d in task.domains)
        for o in task.applicable(state):
            succ = task.apply(state, o)
            for i, s_i in enumerate(pi.states):
                predicted = i in idx.members[o] and all(state[v] == d for v, d in idx.cond[(o, i)])
                assert predicted == (succ == s_i)
            for i in idx.members[o]:
                terms = idx.negated_cond_terms(o, i, task.domains)
                hits = [t for t in terms if all(state[v] == d for v, d in t)]
                cond_holds = all(state[v] == d for v, d in idx.cond[(o, i)])
                assert len(hits) == (0 if cond_holds else 1)


# plan-set equivalence and lifting invariants

KINDS = {
    "exact": lambda t, p: forbid_exact_plan(t, p),
    "unordered": lambda t, p: forbid_unordered(t, p),
    "superset": lambda t, p: forbid_superset(t, p),
    "strict-superset": lambda t, p: forbid_superset(t, p, strict=True),
    "loopless": lambda t, p: forbid_loopless(t, p),
}


@pytest.mark.parametrize("kind", sorted(KINDS))
def test_plan_set_equivalence(kind):
    for task, pi, q, everything in draw(lambda r: loopless_instance(r, max_plans=60), 11, 40):
        result = KINDS[kind](task, pi)
        expected = Counter(p.steps for p in everything if not forbidden_by(kind, pi, p))
        assert image(result, q) == expected
        for p in everything:
            if not forbidden_by(kind, pi, p):
                assert forward_map(result, p).cost == p.cost
            else:
                with pytest.raises(PlanForbidden):
                    forward_map(result, p)


@pytest.mark.parametrize("relation", list(Relation))
def test_forbid_set_equivalence(relation):
    rng = random.Random(5)
    for task, pi, q, everything in draw(lambda r: loopless_instance(r, max_plans=30), 12, 25):
        pool = [p for p in everything if relation is not Relation.LOOPLESS or is_loopless(p)]
        chosen = rng.sample(pool, min(len(pool), rng.randint(1, 3)))
        result = forbid_set(task, chosen, relation)
        expected = Counter(p.steps for p in everything if not extended(chosen, relation, p))
        assert image(result, q) == expected


def test_error_sink_is_absorbing():
    for task, pi, q, _ in draw(loopless_instance, 13, 30):
        result = forbid_loopless(task, pi)
        new = result.task
        e = next(i for i, v in enumerate(new.variables) if v.name.endswith("-e"))
        assert (e, 0) in new.goal
        for action in new.actions:
            assert (e, 0) not in action.eff
            if (e, 1) in action.eff:
                continue
            assert (e, 0) in action.pre
