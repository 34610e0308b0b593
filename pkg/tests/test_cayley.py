import pytest
from hypothesis import given, strategies as st

from grrcensus import groups as gr
from grrcensus.catalog import catalog_groups
from grrcensus.cayley import (ConnectionSet, SetCodec, build_graph, enumerate_inverse_closed,
                              partition_range, right_translation, split_range)
from grrcensus.groups import BudgetError, GroupError
from grrcensus.parse import parse_group_spec
from grrcensus.perm import is_graph_automorphism

SMALL = catalog_groups(12)


@st.composite
def group_and_set(draw, groups=SMALL):
    G = draw(st.sampled_from(groups))
    codec = SetCodec(G)
    return G, codec.decode(draw(st.integers(0, codec.size - 1)))


@pytest.mark.parametrize("G", SMALL, ids=lambda G: G.label)
def test_codec_is_a_bijection_onto_inverse_closed_sets(G):
    codec = SetCodec(G)
    seen = set()
    for k, S in enumerate(enumerate_inverse_closed(G)):
        assert S.is_inverse_closed()
        assert codec.encode(S) == k
        seen.add(S.bits)
    assert len(seen) == codec.size == 2 ** gr.c_value(G, G.all())


def test_involution_slots_come_first():
    G = parse_group_spec("D4")
    codec = SetCodec(G)
    k = sum(1 for g in range(G.order) if G.elem_order[g] <= 2)
    assert all(m.bit_count() == 1 for m in codec.slots[:k])
    assert all(m.bit_count() == 2 for m in codec.slots[k:])


def test_enumeration_budget():
    with pytest.raises(BudgetError):
        next(enumerate_inverse_closed(parse_group_spec("EA4"), max_c=12))


@pytest.mark.parametrize("total,parts", [(0, 3), (7, 1), (7, 3), (1024, 4), (5, 8)])
def test_split_range_partitions(total, parts):
    blocks = split_range(0, total, parts)
    assert len(blocks) == parts and blocks[0][0] == 0 and blocks[-1][1] == total
    assert all(a[1] == b[0] for a, b in zip(blocks, blocks[1:]))
    sizes = [hi - lo for lo, hi in blocks]
    assert max(sizes) - min(sizes) <= 1


def test_partition_range_covers_all_indices():
    G = parse_group_spec("D5")
    assert partition_range(G, 3)[-1][1] == SetCodec(G).size


def test_from_elements_rejects_non_inverse_closed():
    with pytest.raises(GroupError):
        ConnectionSet.from_elements(parse_group_spec("C5"), [1])


@given(group_and_set())
def test_hex_round_trip(pair):
    G, S = pair
    assert ConnectionSet.from_hex(G, S.to_hex()).bits == S.bits


@given(group_and_set())
def test_edges_follow_the_defining_rule(pair):
    G, S = pair
    graph = build_graph(G, S)
    for r in range(G.order):
        for t in range(G.order):
            expected = t != r and G.mul(t, G.inv[r]) in S
            assert graph.has_edge(r, t) == expected
    assert graph.degree() == len(S) - (1 if 0 in S else 0)


@given(group_and_set())
def test_right_translations_are_automorphisms(pair):
    G, S = pair
    adj = build_graph(G, S).adjacency
    for g in range(G.order):
        assert is_graph_automorphism(adj, right_translation(G, g))


@given(group_and_set())
def test_graph_is_undirected(pair):
    G, S = pair
    adj = build_graph(G, S).adjacency
    assert all(bool(adj[r] >> t & 1) == bool(adj[t] >> r & 1)
               for r in range(G.order) for t in range(G.order))
