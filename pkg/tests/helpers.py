"""Instance generation and brute-force oracles shared by the property and
acceptance tests."""
import random
from collections import Counter

from topcert.errors import ResourceLimitError
from topcert.generate import random_task
from topcert.plans import Relation, action_multiset, dominates, is_loopless
from topcert.search import Status, enumerate_loopless, enumerate_plans, optimal_search

NODE_LIMIT = 20_000


def forbidden_by(kind, pi, other):
    """Whether a single-plan transformation of ``kind`` for ``pi`` forbids ``other``."""
    if kind == "exact":
        return other == pi
    if kind == "unordered":
        return action_multiset(other) == action_multiset(pi)
    if kind == "superset":
        return action_multiset(pi) <= action_multiset(other)
    if kind == "strict-superset":
        return other == pi or action_multiset(pi) < action_multiset(other)
    if kind == "loopless":
        return other == pi or dominates(Relation.LOOPLESS, pi, other)
    raise ValueError(kind)


def extended(plans, relation, candidate):
    return candidate in plans or any(dominates(relation, p, candidate) for p in plans)


def image(result, q):
    """Counter of r-images of all plans of cost <= q of the transformed task."""
    found = enumerate_plans(result.task, q, node_limit=10 * NODE_LIMIT).plans
    out = Counter()
    for p in found:
        back = result.map_back(p)
        assert back.cost == p.cost
        out[back.steps] += 1
    return out


def loopless_instance(rng, slack=2, max_plans=None):
    """A random task with a random loopless plan of cost <= optimum + slack,
    or None when the draw is unsolvable or too large to enumerate."""
    task = random_task(rng)
    try:
        out = optimal_search(task, node_limit=NODE_LIMIT)
        if out.status is not Status.OPTIMAL:
            return None
        cheap = enumerate_loopless(task, out.cost + slack, node_limit=NODE_LIMIT).plans
        pi = rng.choice(cheap)
        q = pi.cost + 4
        everything = enumerate_plans(task, q, node_limit=NODE_LIMIT).plans
    except ResourceLimitError:
        return None
    if max_plans is not None and len(everything) > max_plans:
        return None
    return task, pi, q, everything


def bounded_instance(rng, extra=3, max_plans=20, slack=3):
    """A random solvable task, a bound q in [optimum, optimum + slack] and all
    plans of cost <= q + extra; None when there are more than ``max_plans``
    plans of cost <= q or enumeration hits the node limit."""
    task = random_task(rng)
    try:
        out = optimal_search(task, node_limit=NODE_LIMIT)
        if out.status is not Status.OPTIMAL:
            return None
        q = out.cost + rng.randint(0, slack)
        everything = enumerate_plans(task, q + extra, node_limit=NODE_LIMIT).plans
    except ResourceLimitError:
        return None
    if sum(p.cost <= q for p in everything) > max_plans:
        return None
    return task, q, everything


def draw(make, seed, count):
    """``count`` non-None results of ``make(rng)`` from a seeded stream."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        inst = make(rng)
        if inst is not None:
            out.append(inst)
    return out
