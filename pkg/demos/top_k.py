# Top-k by iterated forbidding, and the certificate that checks it without
# enumerating anything.

from topcert import certify_top_k, plan_top_k, validate_plan
from topcert.generate import t1

task = t1()
plans, trace = plan_top_k(task, 3)
for p in plans:
    print(p.cost, p.names(task))
print(trace.termination.value)

report = certify_top_k(task, plans, 3)
print(report.verdict.value)
for step in report.steps:
    print("  ", step.name, step.status, step.cost)

# a set that skips a cheaper plan gets refuted with that plan as witness
worse = [plans[0], plans[1], validate_plan(task, [0, 2, 0, 2, 0, 2, 0, 1])]
bad = certify_top_k(task, worse, 3)
print(bad.verdict.value, bad.witness.condition, bad.witness.plan.names(task))

# without c there is a single plan, so asking for five returns one
plain = t1(with_c=False)
plans, trace = plan_top_k(plain, 5)
print(len(plans), trace.termination.value, certify_top_k(plain, plans, 5).verdict.value)
