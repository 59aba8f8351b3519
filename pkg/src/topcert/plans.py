"""Plans, their validation, and the dominance relations between plans."""
from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidPlan, ParseError, UsageError
from .task import Task, holds


@dataclass(frozen=True)
class Plan:
    """A validated plan: action ids, total cost and traversed states s_0..s_n.

    Equality and hashing use the action sequence only.
    """
    steps: tuple
    cost: int
    states: tuple

    def __eq__(self, other):
        if not isinstance(other, Plan):
            return NotImplemented
        return self.steps == other.steps

    def __hash__(self):
        return hash(self.steps)

    def __len__(self):
        return len(self.steps)

    def names(self, task: Task) -> list:
        return [task.actions[a].name for a in self.steps]


def validate_plan(task: Task, steps: Iterable[int]) -> Plan:
    """Execute ``steps`` from the initial state; raise InvalidPlan if it is not a plan."""
    steps = tuple(int(a) for a in steps)
    n_actions = len(task.actions)
    state = task.initial
    states = [state]
    cost = 0
    for i, a in enumerate(steps):
        if not 0 <= a < n_actions:
            raise UsageError(f"step {i}: action id {a} out of range")
        action = task.actions[a]
        if not holds(action.pre, state):
            raise InvalidPlan(i, "inapplicable", f"step {i}: {action.name!r} is not applicable")
        state = task.apply(state, a)
        states.append(state)
        cost += action.cost
    if not task.is_goal(state):
        raise InvalidPlan(len(steps), "goal", "final state does not satisfy the goal")
    return Plan(steps, cost, tuple(states))


def is_loopless(plan: Plan) -> bool:
    return len(set(plan.states)) == len(plan.states)


def action_multiset(plan: Plan) -> Counter:
    return Counter(plan.steps)


class Relation(enum.Enum):
    """The built-in dominance relations over plans."""
    EMPTY = "none"
    UNORDERED = "unordered"
    SUBSET = "subset"
    LOOPLESS = "loopless"

    @classmethod
    def parse(cls, text: str) -> "Relation":
        aliases = {"empty": cls.EMPTY, "multiset-subset": cls.SUBSET}
        text = text.lower()
        if text in aliases:
            return aliases[text]
        return cls(text)


def revisits(pi: Plan, pi_prime: Plan) -> bool:
    """True iff ``pi_prime`` traverses some state of ``pi`` more than once."""
    on_pi = set(pi.states)
    counts = Counter(pi_prime.states)
    return any(c > 1 and s in on_pi for s, c in counts.items())


def dominates(relation: Relation, pi: Plan, pi_prime: Plan) -> bool:
    """Whether the pair ``(pi, pi_prime)`` belongs to ``relation``."""
    if relation is Relation.EMPTY:
        return False
    if relation is Relation.UNORDERED:
        return action_multiset(pi) == action_multiset(pi_prime)
    if relation is Relation.SUBSET:
        return action_multiset(pi) < action_multiset(pi_prime)
    if relation is Relation.LOOPLESS:
        return is_loopless(pi) and revisits(pi, pi_prime)
    raise UsageError(f"unknown relation {relation!r}")


def remove_loops(task: Task, plan: Plan) -> Plan:
    """Cut loops greedily left to right: whenever a state recurs, drop the
    actions between its first occurrence and the latest one."""
    steps = list(plan.steps)
    states = list(plan.states)
    out_steps, out_states = [], [states[0]]
    position = {states[0]: 0}
    for a, s in zip(steps, states[1:]):
        if s in position:
            keep = position[s]
            for dropped in out_states[keep + 1:]:
                del position[dropped]
            del out_steps[keep:]
            del out_states[keep + 1:]
        else:
            out_steps.append(a)
            out_states.append(s)
            position[s] = len(out_states) - 1
    return validate_plan(task, out_steps)


# plan files -------------------------------------------------------------

_COST_LINE = re.compile(r";\s*cost\s*=\s*(-?\d+)")


@dataclass
class PlanFile:
    plan: Plan
    declared_cost: "int | None" = None
    diagnostics: tuple = ()


def parse_plan_text(task: Task, text: str) -> PlanFile:
    """Read a plan in the ``(action name)`` per line format.

    The trailing ``; cost = N`` comment is cross-checked against the real
    cost; a mismatch becomes a diagnostic.
    """
    index = task.action_index()
    steps = []
    declared = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(";"):
            m = _COST_LINE.match(line)
            if m:
                declared = int(m.group(1))
            continue
        if not (line.startswith("(") and line.endswith(")")):
            raise ParseError(f"expected '(action name)', got {line!r}", lineno)
        name = line[1:-1].strip()
        if name not in index:
            raise ParseError(f"unknown action {name!r}", lineno)
        steps.append(index[name])
    plan = validate_plan(task, steps)
    diags = ()
    if declared is not None and declared != plan.cost:
        diags = (f"declared cost {declared} differs from computed cost {plan.cost}",)
    return PlanFile(plan, declared, diags)


def read_plan_file(task: Task, path) -> PlanFile:
    with open(path, encoding="utf-8") as f:
        return parse_plan_text(task, f.read())


def format_plan(task: Task, plan: Plan) -> str:
    unit = all(task.actions[a].cost == 1 for a in plan.steps) and not task.metric
    lines = [f"({task.actions[a].name})" for a in plan.steps]
    lines.append(f"; cost = {plan.cost} ({'unit cost' if unit else 'general cost'})")
    return "\n".join(lines) + "\n"


def write_plan_file(task: Task, plan: Plan, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(format_plan(task, plan))


def plans_from_names(task: Task, sequences: Iterable[Sequence[str]]) -> list:
    index = task.action_index()
    return [validate_plan(task, [index[n] for n in seq]) for seq in sequences]
