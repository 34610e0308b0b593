# Two counting statements that fail on small groups, found by the sweeps.
#
# 1. Sets invariant under gamma·n -> gamma·t·n^-1.
#    T = <a, b | a^4 = b^4 = 1, b^-1 a b = a^-1>, N = <b, a^2>, gamma = a, t = 1.
#    Every one of the 2^10 inverse-closed subsets of T is invariant, which is
#    more than 2^(c - |N|/24) = 2^(29/3). The shape matches the listed
#    C4 ⋊ C4 exception except that t = gamma^2 fails: gamma^2 = a^2 while
#    the squares in N are b^2 and 1.
#
# 2. Equal sigma-sizes for a pair u, v in one coset.
#    R = C12, N = {0, 6}, u = 2, v = 8, j = 3. All 128 sets have
#    |sigma(S, u, j)| = |sigma(S, v, j)|, above 3/4·128 = 96. The shape is
#    the order-two exception, but the coset of u has odd order in R/N.

from fractions import Fraction

from grrcensus import groups as gr
from grrcensus.cayley import SetCodec, adjacency_from_bits
from grrcensus.groups import GroupElementSet
from grrcensus.oracles import (SigmaContext, count_invariant_sets_by_orbits,
                               inverted_twist_invariant_count, pair_clauses, psi_count,
                               restriction_identity, twisted_map)
from grrcensus.parse import parse_group_spec

T = gr.c4_by_c4()
a, b = 1, 4
N = GroupElementSet(T, gr.subgroup_closure(T, [b, T.mul(a, a)]))
out = inverted_twist_invariant_count(T, N, a, 0, restriction_identity(N))
perm = twisted_map(T, N, a, 0, restriction_identity(N), twist=T.inv)
print("T order", T.order, "c(T) =", SetCodec(T).c, "|N| =", len(N))
print("invariant sets:", out.exact_count, "by orbits:", count_invariant_sets_by_orbits(T, perm))
print("bound: 2^" + str(out.bound_log2), "=", float(2 ** out.bound_log2))
print("verdict:", out.case_tag, "| group shape matches:", out.readings.get("c4sc4_shape"))

print()
R = parse_group_spec("C12")
N = GroupElementSet.from_elements(R, [0, 6])
ctx = SigmaContext(R, N)
out = psi_count(ctx, (2, 8), 3)
print("C12, N = {0, 6}: pair (2, 8), coset j = 3")
print("equal sigma sizes:", out.exact_count, "of", ctx.codec.size, "| bound", out.bound_value)
print("listed shapes:", pair_clauses(ctx, 2, 8, 3))
print("shapes without the parity condition:",
      [c["clause"] for c in pair_clauses(ctx, 2, 8, 3, require_even_i=False)])
print("order of the coset of u in R/N:", ctx.quotient.elem_order[ctx.coset_of[2]])

# the same count from the Cayley graph adjacency, no sigma formula involved
coset = ctx.coset_bits[3]
direct = sum((adj[0] & adj[2] & coset).bit_count() == (adj[0] & adj[8] & coset).bit_count()
             for adj in (adjacency_from_bits(R, ctx.codec.decode_bits(k))
                         for k in range(ctx.codec.size)))
print("direct count:", direct)
