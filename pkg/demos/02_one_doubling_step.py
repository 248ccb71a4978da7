"""One doubling step: a partial system whose leave is a hexagon becomes a
complete system on 2u + 1 points with no new subsystems."""
# %%
from collections import Counter

from stsembed.doubling import double, find_six_cycle, verify_doubling
from stsembed.generators import partial_with_hexagon_leave

ps = partial_with_hexagon_leave(13, seed=4)
H = find_six_cycle(ps)
print("input", ps, "hexagon", H.points)

# %%
res = double(ps, H, seed=4)
print("output", res.output)
print(res.certificate_line())

# %% The bijection phi sends Z_13 onto the points of the input.
print("phi =", res.phi)

# %% Block types in the output: how many points of each block lie in the
# original point set.
census = Counter(sum(p < ps.order for p in b) for b in res.output.blocks)
print(sorted(census.items()))

# %%
rep = verify_doubling(ps, res, H)
print("verified:", rep.ok, "unsafe cosets:", rep.unsafe_cosets, "new subsystems:",
      rep.new_subsystems)
