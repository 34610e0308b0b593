# Exhaustive census of one small group.
#
# Every inverse-closed subset S of D6 gives a Cayley graph. For each proper
# normal subgroup N we sort the graphs by the kind of identity-fixing,
# N-normalising automorphism they admit, then compare the counts with the
# upper bounds.
#
# Run: python3 demos/census_walkthrough.py

from grrcensus.census import (check_bounds, census_report, proper_normal_subgroups,
                              run_census_multi)
from grrcensus.cayley import SetCodec
from grrcensus.parse import parse_group_spec

G = parse_group_spec("D6")
codec = SetCodec(G)
print(f"{G.label}: order {G.order}, c = {codec.c}, {codec.size} connection sets")

normals = proper_normal_subgroups(G)
totals = run_census_multi(G, normals, worker_count=1)

for N, counts in zip(normals, totals):
    counts.check_invariants()
    print()
    print("N =", N.elements())
    for name, value in counts.counts().items():
        if value:
            print(f"  {name:22s} {value}")
    records = check_bounds(G, N, counts)
    tight = min((r for r in records if r.applicable and r.count), key=lambda r: r.slack)
    print(f"  closest bound: {tight.bound_id} (slack {tight.slack:.2f} in log2)")

# A report is plain JSON; witnesses are hex bit vectors of connection sets.
report = census_report(G, normals[0], totals[0], check_bounds(G, normals[0], totals[0]))
print()
print("witness strata:", sorted(report["witnesses"]))
