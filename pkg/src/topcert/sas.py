"""Reader and writer for the translator's SAS file format (version 3)."""
from __future__ import annotations

import io
from typing import IO, Union

from .errors import ParseError, UnsupportedFeatureError
from .task import Action, Task, Variable

SAS_FILE_VERSION = 3


class _Lines:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    @property
    def lineno(self):
        return self.pos  # 1-based number of the line last read

    def next(self) -> str:
        if self.pos >= len(self.lines):
            raise ParseError("unexpected end of input", self.pos + 1)
        line = self.lines[self.pos]
        self.pos += 1
        return line.rstrip("\r\n")

    def expect(self, token: str) -> None:
        line = self.next().strip()
        if line != token:
            raise ParseError(f"expected {token!r}, got {line!r}", self.lineno)

    def int(self) -> int:
        line = self.next().strip()
        try:
            return int(line)
        except ValueError:
            raise ParseError(f"expected an integer, got {line!r}", self.lineno) from None

    def ints(self, count=None) -> list:
        line = self.next().split()
        try:
            values = [int(x) for x in line]
        except ValueError:
            raise ParseError(f"expected integers, got {' '.join(line)!r}", self.lineno) from None
        if count is not None and len(values) != count:
            raise ParseError(f"expected {count} integers, got {len(values)}", self.lineno)
        return values


def parse_sas(source: Union[str, bytes, IO]) -> Task:
    """Parse SAS text (a string, bytes or a readable stream) into a Task.

    Mutex groups are read and dropped. With ``begin_metric 0`` every action
    costs 1 whatever its cost line says. Axioms and conditional effects raise
    UnsupportedFeatureError.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    r = _Lines(source)

    r.expect("begin_version")
    version = r.int()
    if version != SAS_FILE_VERSION:
        raise ParseError(f"unsupported SAS version {version}", r.lineno)
    r.expect("end_version")
    r.expect("begin_metric")
    metric_line = r.int()
    if metric_line not in (0, 1):
        raise ParseError(f"metric must be 0 or 1, got {metric_line}", r.lineno)
    metric = bool(metric_line)
    r.expect("end_metric")

    variables = []
    for _ in range(r.int()):
        r.expect("begin_variable")
        name = r.next()
        layer = r.int()
        if layer != -1:
            raise UnsupportedFeatureError(f"derived variable {name!r} (axiom layer {layer})", r.lineno)
        size = r.int()
        if size < 1:
            raise ParseError(f"variable {name!r} has domain size {size}", r.lineno)
        values = tuple(r.next() for _ in range(size))
        r.expect("end_variable")
        variables.append(Variable(name, size, values))
    domains = [v.domain_size for v in variables]

    def check(var, val, allow_none=False):
        if not 0 <= var < len(domains):
            raise ParseError(f"variable {var} does not exist", r.lineno)
        if allow_none and val == -1:
            return
        if not 0 <= val < domains[var]:
            raise ParseError(f"value {val} out of range for variable {var}", r.lineno)

    for _ in range(r.int()):
        r.expect("begin_mutex_group")
        for _ in range(r.int()):
            r.ints(2)
        r.expect("end_mutex_group")

    r.expect("begin_state")
    initial = []
    for var in range(len(variables)):
        val = r.int()
        check(var, val)
        initial.append(val)
    r.expect("end_state")

    r.expect("begin_goal")
    goal = []
    for _ in range(r.int()):
        var, val = r.ints(2)
        check(var, val)
        goal.append((var, val))
    r.expect("end_goal")

    actions = []
    for _ in range(r.int()):
        r.expect("begin_operator")
        name = r.next().strip()
        pre, eff = {}, {}
        for _ in range(r.int()):
            var, val = r.ints(2)
            check(var, val)
            pre[var] = val
        for _ in range(r.int()):
            fields = r.ints()
            if not fields:
                raise ParseError("empty effect line", r.lineno)
            if fields[0] != 0:
                raise UnsupportedFeatureError(f"operator {name!r} has a conditional effect", r.lineno)
            if len(fields) != 4:
                raise ParseError("effect line must be '0 var pre post'", r.lineno)
            _, var, pre_val, post = fields
            check(var, pre_val, allow_none=True)
            check(var, post)
            if var in eff or var in pre:
                raise ParseError(f"variable {var} mentioned twice in operator {name!r}", r.lineno)
            if pre_val != -1:
                pre[var] = pre_val
            eff[var] = post
        cost = r.int()
        r.expect("end_operator")
        actions.append(Action(name, pre, eff, cost if metric else 1))

    axioms = r.int()
    if axioms > 0:
        raise UnsupportedFeatureError(f"{axioms} axioms declared", r.lineno)
    while r.pos < len(r.lines):
        if r.next().strip():
            raise ParseError("trailing content after axiom section", r.lineno)
    return Task(variables, actions, initial, goal, metric)


def write_sas(task: Task, stream: IO[str]) -> None:
    w = stream.write
    w(f"begin_version\n{SAS_FILE_VERSION}\nend_version\n")
    w(f"begin_metric\n{int(task.metric)}\nend_metric\n")
    w(f"{len(task.variables)}\n")
    for v in task.variables:
        w("begin_variable\n")
        w(f"{v.name}\n-1\n{v.domain_size}\n")
        for value in v.value_names:
            w(f"{value}\n")
        w("end_variable\n")
    w("0\n")
    w("begin_state\n")
    for val in task.initial:
        w(f"{val}\n")
    w("end_state\n")
    w(f"begin_goal\n{len(task.goal)}\n")
    for var, val in task.goal:
        w(f"{var} {val}\n")
    w("end_goal\n")
    w(f"{len(task.actions)}\n")
    for a in task.actions:
        pre = dict(a.pre)
        prevail = a.prevail
        w(f"begin_operator\n{a.name}\n{len(prevail)}\n")
        for var, val in prevail:
            w(f"{var} {val}\n")
        w(f"{len(a.eff)}\n")
        for var, val in a.eff:
            w(f"0 {var} {pre.get(var, -1)} {val}\n")
        w(f"{a.cost}\nend_operator\n")
    w("0\n")


def serialize_sas(task: Task) -> bytes:
    buf = io.StringIO()
    write_sas(task, buf)
    return buf.getvalue().encode("utf-8")
