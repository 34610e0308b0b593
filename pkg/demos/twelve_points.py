# Two permutations f, g of twelve points for which every subset S has
# |S ∩ S^f| = |S ∩ S^g|.
#
# The count of balanced subsets is at most 3/4 of all subsets unless F - G
# (difference of the permutation matrices) is antisymmetric. Here it is:
# f and g agree on the 3-cycle and are mutually inverse on the rest.

import numpy as np

from grrcensus.oracles import (antisymmetry_witness, equal_intersection_count,
                               intersection_trichotomy, twelve_point_pair)
from grrcensus.perm import cycles_of

f, g = twelve_point_pair()
print("f cycles (1-based):", [[x + 1 for x in c] for c in cycles_of(f) if len(c) > 1])
print("g cycles (1-based):", [[x + 1 for x in c] for c in cycles_of(g) if len(c) > 1])

F = np.zeros((12, 12), dtype=int)
G = np.zeros((12, 12), dtype=int)
F[np.arange(12), f] = 1
G[np.arange(12), g] = 1
print("F - G antisymmetric:", bool(((F - G) + (F - G).T == 0).all()))

I = antisymmetry_witness(f, g)
print("points where f = g:", [x + 1 for x in I])
print("balanced subsets:", equal_intersection_count(f, g), "of", 2 ** 12)

out = intersection_trichotomy(12, f, g)
print("verdict:", out.case_tag, out.clause)
