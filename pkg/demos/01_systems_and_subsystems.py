"""Small triple systems, their leave graphs and their subsystem lattices."""
# %%
import numpy as np

from stsembed import (PartialSTS, enumerate_subsystems, leave_graph, projective_triple_system,
                      quasigroup_op)
from stsembed.generators import bose, skolem

fano = projective_triple_system(2)
print(fano)
print(np.asarray(fano.blocks))

# %% The pair index is a v x v matrix: entry (x, y) is the third point of the
# block through x and y, or -1 when the pair is uncovered.
print(fano.third_matrix)

# %% The Steiner quasigroup is read straight off that matrix.
table = np.array([[quasigroup_op(fano, x, y) for y in range(7)] for x in range(7)])
print(table)
assert (table == table.T).all()

# %% A partial system on 9 points with two blocks leaves 30 uncovered pairs.
ps = PartialSTS(9, [(0, 1, 2), (0, 3, 4)])
L = leave_graph(ps)
print(len(L.edges), "leave edges, degrees", L.degrees())

# %% PG(3,2) has 15 Fano planes inside it, while the two cyclic constructions
# of order 13 and 15 give quite different lattices.
for name, sts in [("pg3", projective_triple_system(3)), ("bose15", bose(15)),
                  ("skolem13", skolem(13))]:
    print(name, enumerate_subsystems(sts).orders())
