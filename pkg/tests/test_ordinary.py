import itertools
import random

import networkx as nx
import pytest
from hypothesis import given

from conftest import multigraphs, random_3ec_series_parallel, random_multigraph
from hyperimmerse.hypergraph import HypergraphError, coalesce, complete_uniform, dewet, is_isomorphic
from hyperimmerse.immersion import find_immersion_bruteforce
from hyperimmerse.lattices import double_edge_cycle, honeycomb_patch
from hyperimmerse.ordinary import (MultiGraph, cut_points_and_biconnected, edge_disjoint_paths,
                                   is_series_parallel, is_three_edge_connected, k4_immersion_multigraph, lift,
                                   prune, test_k4, three_edge_classes, three_edge_connected_components)

K4 = complete_uniform(4, 2)


def M(*pairs, vertices=()):
    return MultiGraph.from_pairs([tuple(p) for p in pairs], vertices=vertices)


def chain(*mults):
    """Path v0-v1-...; the i-th pair carries mults[i] parallel edges."""
    pairs = []
    for i, k in enumerate(mults):
        pairs += [(f"v{i}", f"v{i + 1}")] * k
    return M(*pairs)


def pairs_of(g):
    return sorted((tuple(sorted(m)), c) for m, c in g.pair_counts().items())


# -- oracles -------------------------------------------------------------------------


def has_k4_subdivision(g: MultiGraph) -> bool:
    """Brute force: four branch vertices joined by six internally disjoint paths."""
    simple = nx.Graph()
    simple.add_nodes_from(g.vertices)
    simple.add_edges_from(tuple(m) for m in g.edges.values())
    for branch in itertools.combinations(sorted(g.vertices), 4):
        pairs = list(itertools.combinations(branch, 2))
        options = [list(nx.all_simple_paths(simple, a, b)) for a, b in pairs]

        def rec(i, used):
            if i == len(pairs):
                return True
            for p in options[i]:
                inner = set(p[1:-1])
                if inner & used or inner & set(branch):
                    continue
                if rec(i + 1, used | inner):
                    return True
            return False

        if rec(0, set()):
            return True
    return False


def max_flow(g: MultiGraph, s, t) -> int:
    d = nx.DiGraph()
    d.add_nodes_from(g.vertices)
    for m, c in g.pair_counts().items():
        a, b = sorted(m)
        for x, y in ((a, b), (b, a)):
            d.add_edge(x, y, capacity=d.get_edge_data(x, y, {"capacity": 0})["capacity"] + c)
    return int(nx.maximum_flow_value(d, s, t))


# -- lifting ---------------------------------------------------------------------------


def test_lift_path():
    g = lift(M("AB", "BC"), "e0", "e1")
    assert pairs_of(g) == [(("A", "C"), 1)]


def test_lift_keeps_other_edges():
    g = lift(M("AB", "BC", "BD"), "e0", "e1")
    assert pairs_of(g) == [(("A", "C"), 1), (("B", "D"), 1)]


def test_lift_rejects_parallel_and_disjoint():
    with pytest.raises(HypergraphError):
        lift(M("AB", "AB"), "e0", "e1")
    with pytest.raises(HypergraphError):
        lift(M("AB", "CD"), "e0", "e1")


@given(multigraphs(max_v=5, max_e=6))
def test_lift_is_coalesce_then_dewet(g):
    for e1, e2 in itertools.combinations(g.edge_ids, 2):
        shared = g.edges[e1] & g.edges[e2]
        if len(shared) != 1:
            continue
        (u,) = shared
        lifted = lift(g, e1, e2)
        via = dewet(coalesce(g, e1, e2), e1, u)
        assert is_isomorphic(lifted.to_hypergraph(), via)


# -- blocks ------------------------------------------------------------------------------


def test_cut_points_examples():
    cuts, blocks = cut_points_and_biconnected(M("AB", "BC"))
    assert cuts == {"B"} and sorted(sorted(b.vertices) for b in blocks) == [["A", "B"], ["B", "C"]]
    cuts, _ = cut_points_and_biconnected(M("XA", "AB", "BX", "XC", "CD", "DX"))
    assert cuts == {"X"}
    cuts, blocks = cut_points_and_biconnected(M("AB", "BC", "CD", "DA"))
    assert cuts == set() and len(blocks) == 1


@given(multigraphs(max_v=6, max_e=8))
def test_cut_points_match_networkx(g):
    simple = nx.Graph()
    simple.add_nodes_from(g.vertices)
    simple.add_edges_from(tuple(m) for m in g.edges.values())
    cuts, blocks = cut_points_and_biconnected(g)
    assert cuts == set(nx.articulation_points(simple))
    assert sorted(sorted(b.vertices) for b in blocks) == sorted(sorted(c) for c in nx.biconnected_components(simple))


# -- series-parallel ------------------------------------------------------------------


def test_series_parallel_examples():
    assert is_series_parallel(double_edge_cycle(4))
    assert not is_series_parallel(MultiGraph.from_hypergraph(K4))
    assert is_series_parallel(M("AB"))


@given(multigraphs(max_v=5, max_e=7))
def test_series_parallel_iff_no_k4_subdivision(g):
    assert is_series_parallel(g) == (not has_k4_subdivision(g))


# -- edge connectivity ----------------------------------------------------------------


@given(multigraphs(max_v=6, max_e=9))
def test_edge_disjoint_paths_match_max_flow(g):
    for s, t in itertools.combinations(g.vertex_list, 2):
        assert edge_disjoint_paths(g, s, t) == max_flow(g, s, t)


def test_three_edge_examples():
    comps = three_edge_connected_components(MultiGraph.from_hypergraph(K4))
    assert [c.vertices for c in comps] == [frozenset("ABCD")]
    assert len(three_edge_classes(M("AB", "BC", "CA"))) == 3
    comps = three_edge_connected_components(double_edge_cycle(4))
    assert len(comps) == 1 and len(comps[0].vertices) == 4


@given(multigraphs(max_v=6, max_e=9))
def test_three_edge_classes_by_max_flow(g):
    classes = three_edge_classes(g)
    assert sorted(v for c in classes for v in c) == sorted(g.vertices)
    label = {v: i for i, c in enumerate(classes) for v in c}
    for s, t in itertools.combinations(g.vertex_list, 2):
        assert (max_flow(g, s, t) >= 3) == (label[s] == label[t])


def test_virtual_edge_on_two_edge_cut():
    # two K4-like blobs joined through a 2-edge cut; each side gets one virtual edge
    left = [("a", "b")] * 3 + [("b", "c")] * 3 + [("a", "c")] * 3
    right = [("x", "y")] * 3 + [("y", "z")] * 3 + [("x", "z")] * 3
    g = M(*left, *right, ("a", "x"), ("b", "y"))
    comps = three_edge_connected_components(g)
    assert len(comps) == 2
    for c in comps:
        assert len(c.virtual) == 1
        (vid,) = c.virtual
        assert c.edges[vid] in (frozenset("ab"), frozenset("xy"))


# -- pruning ----------------------------------------------------------------------------


def test_prune_documented_example():
    g = M(*[("u", "v")] * 3, *[("v", "w")] * 2, ("u", "w"))
    assert pairs_of(prune(g)) == [(("u", "v"), 2), (("u", "w"), 1), (("v", "w"), 2)]


def test_prune_without_profile_is_identity():
    g = MultiGraph.from_hypergraph(K4)
    assert prune(g) == g


def test_prune_single_edge_at_vertex():
    # 4-cycle whose vertex v2 meets v0 once and v1 four times
    g = M(("v0", "v2"), *[("v2", "v1")] * 4, *[("v1", "v3")] * 2, *[("v3", "v0")] * 2)
    p = prune(g)
    assert p.multiplicity("v1", "v2") == 2 and p.multiplicity("v0", "v2") == 1


def test_prune_chain_is_order_independent():
    # two prunable vertices in a ring; try both vertex orders
    pairs = [("a", "b")] * 3 + [("b", "c")] + [("c", "d")] * 4 + [("d", "a")]
    g = M(*pairs)
    renamed = g.relabel({"a": "z", "b": "y", "c": "x", "d": "w"})
    p1 = prune(g)
    p2 = prune(MultiGraph.from_hypergraph(renamed))
    assert is_isomorphic(p1.to_hypergraph(), p2.to_hypergraph())
    assert p1.multiplicity("a", "b") == 2 and p1.multiplicity("c", "d") == 2


def test_prune_preserves_k4_verdict():
    rng = random.Random(7)
    for _ in range(60):
        g = random_3ec_series_parallel(rng)
        for block in cut_points_and_biconnected(g)[1]:
            before = find_immersion_bruteforce(K4, block).status
            after = find_immersion_bruteforce(K4, prune(block)).status
            assert before == after


# -- K_4 immersion -----------------------------------------------------------------------


def test_k4_chain_yes():
    assert test_k4(chain(3, 4, 3))
    assert k4_immersion_multigraph(chain(3, 4, 3))


def test_k4_double_edge_cycle_no():
    assert not test_k4(double_edge_cycle(4))


def test_k4_three_vertices_no():
    assert not test_k4(chain(3, 3))


def test_k4_precondition_checked():
    with pytest.raises(HypergraphError):
        test_k4(M("AB", "BC", "CA"))
    with pytest.raises(HypergraphError):
        test_k4(MultiGraph.from_hypergraph(K4).replace(edges={**K4.edges, "x": "AB", "y": "CD"}))


def test_k4_multigraph_examples():
    assert k4_immersion_multigraph(honeycomb_patch(2))
    for n in range(4, 8):
        assert not k4_immersion_multigraph(double_edge_cycle(n))


def test_test_k4_matches_bruteforce_on_3ec_sp():
    rng = random.Random(11)
    for _ in range(120):
        g = random_3ec_series_parallel(rng)
        assert test_k4(g) == (find_immersion_bruteforce(K4, g).status == "yes"), pairs_of(g)


def test_k4_multigraph_matches_bruteforce():
    rng = random.Random(5)
    for _ in range(200):
        g = random_multigraph(rng, 6, 9)
        assert k4_immersion_multigraph(g) == (find_immersion_bruteforce(K4, g).status == "yes"), pairs_of(g)
