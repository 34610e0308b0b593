import collections
import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from grrcensus import groups as gr
from grrcensus.cayley import SetCodec, adjacency_from_bits
from grrcensus.catalog import catalog_groups
from grrcensus.groups import GroupElementSet
from grrcensus.oracles import (BOUND_HOLDS, EXCEPTIONAL, VIOLATION, OracleMismatch,
                               PreconditionError, SigmaContext, SigmaTable, SweepRow,
                               TrichotomyOutcome, antisymmetry_witness,
                               count_invariant_sets, count_invariant_sets_by_orbits,
                               dicyclic_index_two, dicyclic_subgroup,
                               dicyclic_twist_invariant_count, equal_intersection_count,
                               gelato_count, icecream_count, intersection_trichotomy,
                               inverted_twist_invariant_count, pair_clauses, pow2_at_least,
                               product_counts_all_t, product_equation_count, psi_count,
                               quotient_equation_count, random_perm_pair, restriction_bar_iota,
                               restriction_identity, restriction_inversion, rows_to_csv,
                               run_sweep, sigma, sigma_pairs, twelve_point_pair,
                               twisted_invariant_count, twisted_map, verify_witness)
from grrcensus.parse import parse_group_spec

SMALL = catalog_groups(12)


def outcome_counts(rows):
    return dict(sorted(collections.Counter(r.outcome for r in rows).items()))


# ------------------------------------------------------------------ exact arithmetic

@given(st.integers(0, 5000), st.fractions(min_value=-20, max_value=40, max_denominator=30))
def test_pow2_at_least_matches_float_away_from_ties(count, exponent):
    exact = pow2_at_least(count, exponent)
    if count == 0:
        assert exact
        return
    margin = abs(count - 2 ** float(exponent))
    if margin > 1e-6 * count:
        assert exact == (count <= 2 ** float(exponent))


def test_pow2_at_least_on_ties():
    assert pow2_at_least(8, Fraction(3))
    assert not pow2_at_least(9, Fraction(3))
    assert pow2_at_least(1024, Fraction(10))
    assert not pow2_at_least(1024, Fraction(29, 3))


def test_bound_holds_cannot_be_claimed_above_the_bound():
    with pytest.raises(OracleMismatch):
        TrichotomyOutcome("x", BOUND_HOLDS, 10, bound_value=Fraction(9))


# ------------------------------------------------------------------ equation counts

@given(st.sampled_from(SMALL), st.data())
def test_equation_counts_match_direct_definition(N, data):
    auts = gr.automorphism_group(N)
    alpha = data.draw(st.sampled_from(auts))
    t = data.draw(st.integers(0, N.order - 1))
    prod = product_equation_count(N, alpha, t)
    quot = quotient_equation_count(N, alpha, t)
    assert prod.exact_count == sum(1 for n in range(N.order) if N.mul(n, alpha(n)) == t)
    assert quot.exact_count == sum(1 for n in range(N.order) if N.mul(n, N.inv[alpha(n)]) == t)
    assert product_counts_all_t(N, alpha.images, False)[t] == prod.exact_count
    assert product_counts_all_t(N, alpha.images, True)[t] == quot.exact_count
    for out in (prod, quot):
        assert out.case_tag in (BOUND_HOLDS, EXCEPTIONAL)
        assert out.bound_value == Fraction(3, 4) * N.order


def test_exceptional_shapes_reach_full_count():
    N = parse_group_spec("C5")
    inv = N.inv
    out = icecream_count(N, inv, 0)
    assert out.case_tag == EXCEPTIONAL and out.exact_count == 5
    out = gelato_count(N, tuple(range(5)), 0)
    assert out.case_tag == EXCEPTIONAL and out.exact_count == 5
    # inversion is not an automorphism of a nonabelian group
    with pytest.raises(PreconditionError):
        icecream_count(parse_group_spec("D3"), parse_group_spec("D3").inv, 0)


@pytest.mark.parametrize("name,rows,outcomes", [
    ("icecream", 1847, {BOUND_HOLDS: 1836, EXCEPTIONAL: 11}),
    ("gelato", 1847, {BOUND_HOLDS: 1833, EXCEPTIONAL: 14}),
])
def test_equation_sweeps_frozen(name, rows, outcomes):
    out = run_sweep(name, 8)
    assert len(out) == rows and outcome_counts(out) == outcomes


# ------------------------------------------------------------------ invariant-set counts

@given(st.sampled_from(SMALL), st.data())
def test_invariant_counts_two_routes(G, data):
    """Exhaustive count over 2^c sets equals 2^(orbits) for maps commuting with inversion."""
    perm = data.draw(st.sampled_from(gr.automorphism_group(G))).images
    assert count_invariant_sets(G, perm) == count_invariant_sets_by_orbits(G, perm)


def c4_by_c4_instance():
    T = gr.c4_by_c4()
    a, b = 1, 4
    N = GroupElementSet(T, gr.subgroup_closure(T, [b, T.mul(a, a)]))
    return T, N, a


def test_twisted_map_is_bijective_and_fixes_coset_structure():
    T, N, gamma = c4_by_c4_instance()
    for t in N:
        perm = twisted_map(T, N, gamma, t, restriction_identity(N), twist=T.inv)
        assert sorted(perm) == list(range(T.order))
        assert all((perm[g] in N) == (g in N) for g in range(T.order))


@pytest.mark.parametrize("name,rows,outcomes", [
    ("aux1", 614, {BOUND_HOLDS: 412, EXCEPTIONAL: 202}),
    ("aux2", 228, {BOUND_HOLDS: 102, EXCEPTIONAL: 126}),
])
def test_twisted_sweeps_frozen_small(name, rows, outcomes):
    out = run_sweep(name, 8)
    assert len(out) == rows and outcome_counts(out) == outcomes


def test_aux1_trivial_twist_is_excused():
    T = parse_group_spec("C4xC2")
    N = GroupElementSet(T, gr.index_two_subgroups(T)[0])
    gamma = next(g for g in range(T.order) if g not in N)
    out = twisted_invariant_count(T, N, gamma, 0, restriction_identity(N))
    assert out.case_tag == EXCEPTIONAL and "t=1" in [out.clause] + out.exceptional_witness.get("also", [])


AUX2_COUNTEREXAMPLES = sorted(
    f"N={n};gamma={g};t=0;r={r}"
    for n in ("3333", "cc33") for g in (2, 3, 6, 7) for r in ("id", "inv"))


def test_inverted_twist_counterexamples_frozen():
    rows = [r for r in run_sweep("aux2", 16) if r.outcome == VIOLATION]
    assert sorted(r.parameters for r in rows) == AUX2_COUNTEREXAMPLES
    assert {r.group for r in rows} == {"Dic(C4xC2;y=1)"}
    assert {(r.count, r.bound) for r in rows} == {(1024, "2^29/3")}
    assert {r.exceptional_clause for r in rows} == {"none;nearest=C4sC4xC2^l"}


def test_inverted_twist_counterexample_explicit():
    """a^4 = b^4 = 1, b^-1 a b = a^-1; N = <b, a^2>, gamma = a, t = 1."""
    T, N, gamma = c4_by_c4_instance()
    assert len(N) == 8 and gamma not in N
    assert T.mul(gamma, gamma) == 2 and T.mul(4, 4) == 8
    for restriction in (restriction_identity(N), restriction_inversion(N)):
        out = inverted_twist_invariant_count(T, N, gamma, 0, restriction)
        perm = twisted_map(T, N, gamma, 0, restriction, twist=T.inv)
        assert out.exact_count == 1024 == 2 ** SetCodec(T).c
        assert count_invariant_sets_by_orbits(T, perm) == 1024
        assert out.case_tag == VIOLATION
        assert out.readings.get("c4sc4_shape") is True
        assert out.bound_log2 == Fraction(29, 3)


def test_inverted_twist_requires_abelian_exponent_above_two():
    T = parse_group_spec("D4")
    N = next(GroupElementSet(T, b) for b in gr.index_two_subgroups(T)
             if all(T.elem_order[n] <= 2 for n in gr.bits_to_list(b)))
    gamma = next(g for g in range(T.order) if g not in N)
    with pytest.raises(PreconditionError):
        inverted_twist_invariant_count(T, N, gamma, 0, restriction_identity(N))


def test_dicyclic_twist_over_index_two_quaternion():
    T = parse_group_spec("Q8xC2")
    decs = dicyclic_index_two(T)
    assert decs
    d = decs[0]
    N = dicyclic_subgroup(d)
    assert 2 * len(N) == T.order
    seen = set()
    for gamma in range(T.order):
        if gamma in N:
            continue
        for t in N:
            out = dicyclic_twist_invariant_count(T, d, gamma, t, restriction_bar_iota(d))
            assert out.case_tag != VIOLATION
            assert "coset_base_holds" in out.readings
            seen.add(out.case_tag)
    assert BOUND_HOLDS in seen


def test_dicyclic_twist_sweep_has_no_violations():
    rows = run_sweep("aux3", 16)
    assert len(rows) == 4608 and VIOLATION not in outcome_counts(rows)
    # the alternative base c(gamma·N) never suffices
    assert all("coset_base_holds=False" in r.parameters for r in rows)


# ------------------------------------------------------------------ intersections

def test_twelve_point_pair():
    f, g = twelve_point_pair()
    assert equal_intersection_count(f, g) == 4096
    I = antisymmetry_witness(f, g)
    assert I == [5, 6, 7] and verify_witness(f, g, I)
    out = intersection_trichotomy(12, f, g)
    assert out.case_tag == EXCEPTIONAL and out.readings["all_subsets_equal"]


def brute_equal_intersections(f, g):
    n = len(f)
    total = 0
    for S in range(1 << n):
        Sf = sum(1 << f[x] for x in range(n) if S >> x & 1)
        Sg = sum(1 << g[x] for x in range(n) if S >> x & 1)
        total += (S & Sf).bit_count() == (S & Sg).bit_count()
    return total


@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 9), st.booleans())
def test_intersection_counts_two_routes(seed, n, structured):
    f, g = random_perm_pair(random.Random(seed), n, structured)
    assert equal_intersection_count(f, g) == brute_equal_intersections(f, g)
    out = intersection_trichotomy(n, f, g)
    assert out.holds
    if structured:
        assert out.case_tag == EXCEPTIONAL
    if out.case_tag == BOUND_HOLDS:
        assert 4 * out.exact_count <= 3 * 2 ** n


def test_trichotomy_sweep_frozen():
    rows = run_sweep("trichotomy", seed=0)
    assert len(rows) == 1001
    assert outcome_counts(rows) == {BOUND_HOLDS: 500, EXCEPTIONAL: 501}


# ------------------------------------------------------------------ sigma and psi

def test_sigma_contexts_cover_several_pairs():
    contexts = [c for c in sigma_pairs(12) if c.b >= 3]
    assert len({(c.group.label, c.normal.bits) for c in contexts}) >= 3


@given(st.integers(0, 2 ** 32 - 1))
def test_sigma_formula_equals_common_neighbours(seed):
    rng = random.Random(seed)
    contexts = [c for c in sigma_pairs(12) if c.b >= 3]
    ctx = rng.choice(contexts)
    reps = [0] + [rng.choice(gr.bits_to_list(ctx.coset_bits[k])) for k in range(1, ctx.b)]
    ctx = SigmaContext(ctx.group, ctx.normal, reps)
    S = ctx.codec.decode_bits(rng.randrange(ctx.codec.size))
    adj = adjacency_from_bits(ctx.group, S)
    for u in range(ctx.group.order):
        i = ctx.coset_of[u]
        for j in range(1, ctx.b):
            if i == 0 or j == i:
                continue
            got = sigma(ctx, S, u, j)
            assert got.bits == adj[0] & adj[u] & ctx.coset_bits[j]


def test_sigma_table_matches_pointwise_sigma():
    R = parse_group_spec("D6")
    N = GroupElementSet(R, gr.subgroup_closure(R, [3]))
    ctx = SigmaContext(R, N)
    table = SigmaTable(ctx)
    u, j = 1, 2
    for idx in range(0, ctx.codec.size, 37):
        assert table.sizes(u, j)[idx] == len(sigma(ctx, ctx.codec.decode_bits(idx), u, j))


def test_sigma_preconditions():
    R = parse_group_spec("C6")
    ctx = SigmaContext(R, GroupElementSet(R, gr.subgroup_closure(R, [3])))
    with pytest.raises(PreconditionError):
        sigma(ctx, 0, 3, 1)
    with pytest.raises(PreconditionError):
        SigmaContext(R, R.all())


PSI_COUNTEREXAMPLES = [
    ("i=2;v=2,8;j=3", "order-two-j"), ("i=2;v=2,8;j=5", "order-two-ji"),
    ("i=4;v=4,10;j=1", "order-two-ji"), ("i=4;v=4,10;j=3", "order-two-j"),
]


def test_psi_counterexamples_frozen():
    rows = run_sweep("psi", 12)
    bad = [r for r in rows if r.outcome == VIOLATION]
    assert {r.group for r in bad} == {"C12/N=41"}
    assert sorted((r.parameters, r.exceptional_clause.split("=")[-1]) for r in bad) == PSI_COUNTEREXAMPLES
    assert {(r.count, r.bound) for r in bad} == {(128, "96")}
    assert all(r.outcome != VIOLATION for r in rows if r.parameters.endswith("j=all"))


def test_psi_counterexample_independent_of_representatives():
    R = parse_group_spec("C12")
    N = GroupElementSet.from_elements(R, [0, 6])
    base = SigmaContext(R, N)
    choices = [gr.bits_to_list(base.coset_bits[k]) for k in range(1, base.b)]
    for reps in itertools.product(*choices):
        ctx = SigmaContext(R, N, (0,) + reps)
        out = psi_count(ctx, (2, 8), 3)
        assert out.exact_count == 128 and out.case_tag == VIOLATION
        assert not pair_clauses(ctx, 2, 8, 3)
        assert pair_clauses(ctx, 2, 8, 3, require_even_i=False)


def test_psi_counterexample_by_adjacency():
    R = parse_group_spec("C12")
    N = GroupElementSet.from_elements(R, [0, 6])
    ctx = SigmaContext(R, N)
    codec = SetCodec(R)
    agree = 0
    for idx in range(codec.size):
        S = codec.decode_bits(idx)
        adj = adjacency_from_bits(R, S)
        coset = ctx.coset_bits[3]
        agree += (adj[0] & adj[2] & coset).bit_count() == (adj[0] & adj[8] & coset).bit_count()
    assert agree == 128 == codec.size


def test_psi_all_needs_odd_order_coset():
    R = parse_group_spec("C12")
    ctx = SigmaContext(R, GroupElementSet.from_elements(R, [0, 6]))
    with pytest.raises(PreconditionError):
        psi_count(ctx, (3, 9))


# ------------------------------------------------------------------ rows

def test_sweep_rows_to_csv():
    rows = run_sweep("trichotomy", seed=3)[:3]
    text = rows_to_csv(rows)
    lines = text.strip().splitlines()
    assert lines[0].startswith("lemma_id,group,parameters") and len(lines) == 4
    assert isinstance(rows[0], SweepRow)


def test_sweeps_are_seeded():
    a = [r.as_tuple() for r in run_sweep("sigma", seed=11)]
    b = [r.as_tuple() for r in run_sweep("sigma", seed=11)]
    c = [r.as_tuple() for r in run_sweep("sigma", seed=12)]
    assert a == b and a != c
