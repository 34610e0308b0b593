import itertools

import pytest
from hypothesis import given, strategies as st

from grrcensus import groups as gr
from grrcensus.catalog import CATALOG_SPECS, catalog_groups
from grrcensus.groups import GroupElementSet, GroupError
from grrcensus.parse import SpecSyntaxError, parse_group_spec

SMALL = catalog_groups(12)
ALL = catalog_groups(24)


def brute_subgroups(G):
    """Every subgroup, as the closure of at most two generators plus joins."""
    subs = {gr.subgroup_closure(G, [a, b]) for a in range(G.order) for b in range(G.order)}
    changed = True
    while changed:
        changed = False
        for x, y in itertools.combinations(list(subs), 2):
            z = gr.subgroup_closure(G, gr.bits_to_list(x | y))
            if z not in subs:
                subs.add(z)
                changed = True
    return subs


def brute_normal(G, bits):
    elems = gr.bits_to_list(bits)
    return all(bits >> G.mul(G.mul(g, n), G.inv[g]) & 1 for g in range(G.order) for n in elems)


# ------------------------------------------------------------------ parsing

def test_parse_cyclic():
    G = parse_group_spec("C6")
    assert G.order == 6 and G.is_abelian() and G.exponent() == 6


def test_parse_product_order():
    assert parse_group_spec("Q8xC2").order == 16


def test_parse_dic_needs_exponent_above_two():
    with pytest.raises(GroupError, match="exponent"):
        parse_group_spec("Dic(C2)")


@pytest.mark.parametrize("text,pos", [("C0", 2), ("Cx3", 1), ("Q8x", 3), ("Dic(C4", 6)])
def test_syntax_errors_report_position(text, pos):
    with pytest.raises(SpecSyntaxError) as exc:
        parse_group_spec(text)
    assert exc.value.pos == pos


def test_labels_are_normalised_spec_text():
    assert parse_group_spec("Dic(C4xC2;y=1)").label == "Dic(C4xC2;y=1)"


def test_catalog_specs_distinct_and_nonisomorphic_per_order():
    assert len(set(CATALOG_SPECS)) == len(CATALOG_SPECS)
    by_order = {}
    for G in ALL:
        by_order.setdefault(G.order, []).append(G)
    for n, gs in by_order.items():
        if n > 16:
            continue
        for G, H in itertools.combinations(gs, 2):
            assert not gr.is_isomorphic(G, H), (G.label, H.label)


def test_catalog_counts_small_orders():
    # numbers of isomorphism types of orders 1..16
    known = {1: 1, 2: 1, 3: 1, 4: 2, 5: 1, 6: 2, 7: 1, 8: 5, 9: 2, 10: 2,
             11: 1, 12: 5, 13: 1, 14: 2, 15: 1, 16: 14}
    counts = {}
    for G in catalog_groups(16):
        counts[G.order] = counts.get(G.order, 0) + 1
    assert counts == known


# ------------------------------------------------------------------ axioms

@pytest.mark.parametrize("G", ALL, ids=lambda G: G.label)
def test_group_axioms(G):
    G.check_axioms()
    assert all(G.mul(g, G.inv[g]) == 0 for g in range(G.order))


@given(st.sampled_from(SMALL), st.data())
def test_associativity_and_orders(G, data):
    a, b, c = (data.draw(st.integers(0, G.order - 1)) for _ in range(3))
    assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
    assert G.power(a, G.elem_order[a]) == 0
    assert all(G.power(a, k) != 0 for k in range(1, G.elem_order[a]))


def test_c4_by_c4_presentation():
    G = gr.c4_by_c4()
    assert G.order == 16
    assert gr.is_isomorphic(G, parse_group_spec("Dic(C4xC2;y=1)"))


# ------------------------------------------------------------------ c-values

@pytest.mark.parametrize("G", [G for G in SMALL], ids=lambda G: G.label)
def test_c_value_matches_subset_count(G):
    n = G.order
    count = sum(1 for bits in range(1 << n)
                if all(bits >> G.inv[g] & 1 for g in gr.bits_to_list(bits)))
    assert count == 2 ** gr.c_value(G, G.all())


@given(st.sampled_from(SMALL), st.data())
def test_c_value_of_inverse_closed_subset(G, data):
    elems = data.draw(st.sets(st.integers(0, G.order - 1)))
    X = GroupElementSet.from_elements(G, elems | {G.inv[g] for g in elems})
    assert X.is_inverse_closed()
    invol = sum(1 for g in X if G.elem_order[g] <= 2)
    assert 2 * gr.c_value(G, X) == len(X) + invol


# ------------------------------------------------------------------ subgroups

@pytest.mark.parametrize("G", [G for G in SMALL if G.order > 1], ids=lambda G: G.label)
def test_normal_subgroups_match_brute_force(G):
    expected = {b for b in brute_subgroups(G) if brute_normal(G, b)}
    assert {N.bits for N in gr.normal_subgroups(G)} == expected


@pytest.mark.parametrize("spec,n", [("D4", 4), ("Q8", 4), ("A4", 1), ("D3", 1), ("EA3", 14)])
def test_proper_normal_counts(spec, n):
    G = parse_group_spec(spec)
    assert sum(1 for N in gr.normal_subgroups(G) if 1 < len(N) < G.order) == n


def test_quotient_group_cosets():
    G = parse_group_spec("D4")
    for N in gr.normal_subgroups(G):
        Q, coset_of, reps = gr.quotient_group(G, N)
        assert Q.order * len(N) == G.order
        assert coset_of[0] == 0 and all(coset_of[r] == i for i, r in enumerate(reps))
        for a in range(G.order):
            for b in range(G.order):
                assert coset_of[G.mul(a, b)] == Q.mul(coset_of[a], coset_of[b])


# ------------------------------------------------------------------ automorphisms

@pytest.mark.parametrize("spec,order", [("C8", 4), ("EA2", 6), ("EA3", 168), ("D4", 8),
                                        ("Q8", 24), ("D3", 6), ("A4", 24), ("C4xC2", 8)])
def test_automorphism_group_orders(spec, order):
    assert len(gr.automorphism_group(parse_group_spec(spec))) == order


@pytest.mark.parametrize("spec", ["C6", "D3", "C4xC2", "D4", "Q8", "C8"])
def test_automorphisms_match_brute_force(spec):
    G = parse_group_spec(spec)
    brute = {(0,) + p for p in itertools.permutations(range(1, G.order))
             if gr.is_automorphism(G, (0,) + p)}
    assert {a.images for a in gr.automorphism_group(G)} == brute


# ------------------------------------------------------------------ families

@pytest.mark.parametrize("spec,expected", [
    ("Q8", True), ("Dic(C6)", True), ("Dic(C4xC2;y=1)", True), ("Q8xC2", True),
    ("Dic(C8)", True), ("D4", False), ("C8", False), ("Pauli", False), ("A4", False),
])
def test_generalized_dicyclic_detection(spec, expected):
    assert bool(gr.is_generalized_dicyclic(parse_group_spec(spec))) == expected


@pytest.mark.parametrize("spec", ["Q8", "Dic(C6)", "Dic(C4xC2;y=1)", "Q8xC2"])
def test_dicyclic_decomposition_is_a_witness(spec):
    G = parse_group_spec(spec)
    for d in gr.is_generalized_dicyclic(G):
        A = d.A.elements()
        assert 2 * len(A) == G.order and d.x not in d.A
        assert G.mul(d.x, d.x) == d.y and G.elem_order[d.y] == 2
        assert all(G.mul(G.mul(G.inv[d.x], a), d.x) == G.inv[a] for a in A)
        assert gr.is_automorphism(G, gr.bar_iota(d).images)


@pytest.mark.parametrize("spec,expected", [("Q8", True), ("Q8xC2", True), ("Q8xEA2", True),
                                           ("Dic(C6)", False), ("D4", False)])
def test_q8_times_elementary(spec, expected):
    assert gr.is_q8_times_elementary(parse_group_spec(spec)) == expected


@pytest.mark.parametrize("spec,expected", [("C3", True), ("C4xC2", True), ("EA3", False),
                                           ("D4", False), ("C2", False)])
def test_abelian_exponent_above_two(spec, expected):
    assert gr.is_abelian_exp_gt2(parse_group_spec(spec)) == expected


def test_budget_rejects_large_groups():
    with pytest.raises(gr.BudgetError):
        gr.normal_subgroups(parse_group_spec("C70"))
