# One variable, three values. a: 0->1, b: 1->2, c: 1->0. Goal is value 2.
# Every plan is <a, (c, a)*, b>, so there are infinitely many of them.

from topcert import (Relation, certify_dominance, check_definition1_oracle, enumerate_plans,
                     forbid_loopless, forward_map, validate_plan)
from topcert.errors import PlanForbidden
from topcert.generate import t1

task = t1()
for plan in enumerate_plans(task, 6).plans:
    print(plan.cost, plan.names(task), [s[0] for s in plan.states])

ab = validate_plan(task, [0, 1])
acab = validate_plan(task, [0, 2, 0, 1])

# forbidding <a, b> also kills every plan that walks through 0 or 1 twice
result = forbid_loopless(task, ab)
print(len(result.task.variables), "variables,", len(result.task.actions), "actions")
for name in sorted(a.name for a in result.task.actions):
    print("  ", name)

try:
    forward_map(result, acab)
except PlanForbidden as exc:
    print("a c a b lifted:", exc.reason, "at step", exc.step)

print(enumerate_plans(result.task, 10).plans)  # nothing survives

# so {<a, b>} is the whole loopless top-quality answer for any bound
for q in (2, 4, 8):
    a = certify_dominance(task, [ab], q, Relation.LOOPLESS)
    b = check_definition1_oracle(task, [ab], q, Relation.LOOPLESS)
    print(q, a.verdict.value, b.verdict.value)

print(certify_dominance(task, [ab], 4, Relation.LOOPLESS).to_json())
