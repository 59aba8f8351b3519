# Same random task, four notions of "enough plans".
# Each solution is built by search-and-forbid and then certified twice:
# once through transformed tasks, once by brute-force enumeration.

import random

from topcert import (Relation, certify_dominance, check_definition1_oracle, enumerate_plans,
                     optimal_search, plan_top_quality)
from topcert.generate import random_task

rng = random.Random(7)
while True:
    task = random_task(rng, n_vars=(3, 3), n_actions=(6, 6))
    best = optimal_search(task)
    if best.plan is not None and 4 <= len(enumerate_plans(task, best.cost + 2).plans) <= 12:
        break

q = best.cost + 2
print("optimum", best.cost, "bound", q)
for plan in enumerate_plans(task, q).plans:
    print("  ", plan.cost, plan.names(task))

for relation in Relation:
    plans, trace = plan_top_quality(task, q, relation)
    via_transform = certify_dominance(task, plans, q, relation)
    via_enumeration = check_definition1_oracle(task, plans, q, relation)
    print(f"{relation.value:10s} {len(plans)} plans in {len(trace.rounds)} rounds,",
          via_transform.verdict.value, via_enumeration.verdict.value,
          "largest task", max(r.actions for r in trace.rounds), "actions")

# dropping a member breaks coverage
plans, _ = plan_top_quality(task, q, Relation.UNORDERED)
print(certify_dominance(task, plans[1:], q, Relation.UNORDERED).reason)
