"""SAS+ planning tasks: variables, actions, states and their semantics.

States are tuples of value indices, one per variable. Partial assignments
(preconditions, effects, goals) are sorted tuples of ``(var, value)`` pairs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

from .errors import ContractError, UsageError

State = tuple
Assignment = tuple  # sorted ((var, value), ...)
AssignmentLike = Union[Mapping[int, int], Iterable[tuple]]


def assignment(pairs: AssignmentLike) -> Assignment:
    """Normalise a mapping or iterable of pairs into a sorted pair tuple."""
    if isinstance(pairs, Mapping):
        items = pairs.items()
    else:
        items = pairs
    return tuple(sorted((int(v), int(d)) for v, d in items))


def holds(partial: Assignment, state: Sequence[int]) -> bool:
    """True iff ``state`` is consistent with ``partial``."""
    for var, val in partial:
        if state[var] != val:
            return False
    return True


@dataclass(frozen=True)
class Variable:
    name: str
    domain_size: int
    value_names: tuple = ()

    def __post_init__(self):
        if not self.value_names:
            names = tuple(f"Atom {self.name}={d}" for d in range(self.domain_size))
            object.__setattr__(self, "value_names", names)
        else:
            object.__setattr__(self, "value_names", tuple(self.value_names))


@dataclass(frozen=True)
class Action:
    name: str
    pre: Assignment
    eff: Assignment
    cost: int = 1

    def __post_init__(self):
        object.__setattr__(self, "pre", assignment(self.pre))
        object.__setattr__(self, "eff", assignment(self.eff))

    @property
    def prevail(self) -> Assignment:
        """Precondition restricted to variables the action does not change."""
        eff_vars = {v for v, _ in self.eff}
        return tuple(p for p in self.pre if p[0] not in eff_vars)


@dataclass(frozen=True)
class Task:
    variables: tuple
    actions: tuple
    initial: State
    goal: Assignment
    metric: bool = True

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "initial", tuple(int(x) for x in self.initial))
        object.__setattr__(self, "goal", assignment(self.goal))

    @property
    def domains(self) -> tuple:
        return tuple(v.domain_size for v in self.variables)

    def is_goal(self, state: State) -> bool:
        return holds(self.goal, state)

    @cached_property
    def _generator(self):
        return _build_generator([(i, a.pre) for i, a in enumerate(self.actions)])

    @cached_property
    def _applicable_cache(self) -> dict:
        return {}

    def applicable(self, state: State) -> tuple:
        """Ids of all actions applicable in ``state``, in increasing order."""
        cache = self._applicable_cache
        ids = cache.get(state)
        if ids is None:
            found = []
            stack = [self._generator]
            while stack:
                immediate, switches = stack.pop()
                found.extend(immediate)
                for var, children in switches:
                    child = children.get(state[var])
                    if child is not None:
                        stack.append(child)
            ids = tuple(sorted(found))
            cache[state] = ids
        return ids

    def apply(self, state: State, action_id: int) -> State:
        """Successor without the applicability check."""
        new = list(state)
        for var, val in self.actions[action_id].eff:
            new[var] = val
        return tuple(new)

    def action_index(self) -> dict:
        """Map action names to ids; raises on duplicate names."""
        index = {}
        for i, a in enumerate(self.actions):
            if a.name in index:
                raise UsageError(f"duplicate action name {a.name!r}; name-based plan input is ambiguous")
            index[a.name] = i
        return index

    def replace(self, **changes) -> "Task":
        fields = dict(variables=self.variables, actions=self.actions,
                      initial=self.initial, goal=self.goal, metric=self.metric)
        fields.update(changes)
        return Task(**fields)


def _build_generator(items, depth=0):
    # Decision tree over preconditions. A node is (ids with no precondition
    # left, [(var, {value: child}), ...]); items are grouped by their next
    # precondition variable, so building is linear in total precondition size.
    immediate = []
    groups: dict = {}
    for a, pre in items:
        if len(pre) == depth:
            immediate.append(a)
        else:
            var, val = pre[depth]
            groups.setdefault(var, {}).setdefault(val, []).append((a, pre))
    switches = [(var, {val: _build_generator(lst, depth + 1) for val, lst in by_val.items()})
                for var, by_val in sorted(groups.items())]
    return (immediate, switches)


def _check_action_id(task: Task, action_id: int) -> None:
    if not 0 <= action_id < len(task.actions):
        raise UsageError(f"action id {action_id} out of range 0..{len(task.actions) - 1}")


def is_applicable(task: Task, state: State, action_id: int) -> bool:
    _check_action_id(task, action_id)
    return holds(task.actions[action_id].pre, state)


def successor(task: Task, state: State, action_id: int) -> State:
    _check_action_id(task, action_id)
    if not holds(task.actions[action_id].pre, state):
        raise ContractError(
            f"action {task.actions[action_id].name!r} is not applicable in {state}")
    return task.apply(tuple(state), action_id)


def _check_assignment(diags, what, pairs, domains, unique=True):
    seen = set()
    for var, val in pairs:
        if not 0 <= var < len(domains):
            diags.append(f"{what}: variable {var} does not exist")
            continue
        if not 0 <= val < domains[var]:
            diags.append(f"{what}: value {val} out of range for variable {var} (domain size {domains[var]})")
        if unique and var in seen:
            diags.append(f"{what}: variable {var} assigned twice")
        seen.add(var)


def validate_task(task: Task) -> list:
    """Return one human-readable diagnostic per violated task invariant."""
    diags = []
    domains = []
    for i, v in enumerate(task.variables):
        if v.domain_size < 1:
            diags.append(f"variable {i} ({v.name}): domain size {v.domain_size} < 1")
        if len(v.value_names) != v.domain_size:
            diags.append(f"variable {i} ({v.name}): {len(v.value_names)} value names for domain size {v.domain_size}")
        domains.append(v.domain_size)
    if len(task.initial) != len(domains):
        diags.append(f"initial state has {len(task.initial)} values for {len(domains)} variables")
    else:
        _check_assignment(diags, "initial state", enumerate(task.initial), domains)
    _check_assignment(diags, "goal", task.goal, domains)
    for i, a in enumerate(task.actions):
        _check_assignment(diags, f"action {i} ({a.name}) precondition", a.pre, domains)
        _check_assignment(diags, f"action {i} ({a.name}) effect", a.eff, domains)
        if a.cost < 0:
            diags.append(f"action {i} ({a.name}): negative cost {a.cost}")
        if not task.metric and a.cost != 1:
            diags.append(f"action {i} ({a.name}): cost {a.cost} in a task without metric")
    return diags
