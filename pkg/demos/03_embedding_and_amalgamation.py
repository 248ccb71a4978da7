"""Iterated doubling embeds any partial system, and gluing two systems with a
witness gives an amalgam that avoids a forbidden class."""
# %%
from stsembed import glued_union, projective_triple_system
from stsembed.embedding import AmalgamationProblem, amalgamate, plan_embedding, run_embedding

fano = projective_triple_system(2)
two_fanos = glued_union(fano, fano, {0: 0, 1: 1, 2: 2})
plan = plan_embedding(two_fanos)
print("padded to", plan.padded_order, "with", plan.t, "hexagons in the leave")
print("orders after k steps:", [plan.order_after(k) for k in range(4)])

# %% Two steps are cheap to build and verify; the rest of the chain is just
# more of the same.
run = run_embedding(plan, step_limit=2, verify="full")
for c in run.certificates:
    print(c.step, c.input_order, "->", c.output_order, "verified", c.verified, c.failures)
print(run.status, run.reason)

# %% Amalgamate the two planes over a shared line while forbidding PG(3,2).
res = amalgamate(AmalgamationProblem(fano, fano, {0: 0, 1: 1, 2: 2},
                                     [projective_triple_system(3)]))
print("union", res.union, "witness order", len(res.injections["witness"]))
for check in res.step_checks:
    print(check)
