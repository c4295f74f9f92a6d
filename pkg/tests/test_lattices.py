import pytest

from hyperimmerse.hypergraph import HypergraphError, format_hypergraph
from hyperimmerse.lattices import (FAMILIES, LatticeSpec, cuboid_lattice, double_edge_cycle,
                                   honeycomb_hyperlattice_patch, honeycomb_patch)


def test_honeycomb_counts():
    assert (len(honeycomb_patch(1).vertices), len(honeycomb_patch(1).edges)) == (6, 6)
    assert (len(honeycomb_patch(2).vertices), len(honeycomb_patch(2).edges)) == (24, 30)
    assert (len(honeycomb_patch(3).vertices), len(honeycomb_patch(3).edges)) == (54, 72)


@pytest.mark.parametrize("rings", [1, 2, 3])
def test_honeycomb_degrees(rings):
    g = honeycomb_patch(rings)
    degrees = {g.degree(v) for v in g.vertices}
    assert degrees <= {2, 3}
    # every corner shared by three cells of the patch is an interior corner of degree 3
    hyper = honeycomb_hyperlattice_patch(rings)
    for v in g.vertices:
        if hyper.degree(v) == 3:
            assert g.degree(v) == 3
    assert set(g.pair_counts().values()) == {1}


def test_honeycomb_nested():
    for r in (1, 2, 3):
        small, big = honeycomb_patch(r), honeycomb_patch(r + 1)
        assert small.vertices <= big.vertices
        assert all(big.edges.get(e) == m for e, m in small.edges.items())


def test_hyperlattice_counts_and_dewetting():
    assert (len(honeycomb_hyperlattice_patch(1).vertices), len(honeycomb_hyperlattice_patch(1).edges)) == (6, 1)
    g = honeycomb_hyperlattice_patch(2)
    assert (len(g.vertices), len(g.edges)) == (24, 7)
    assert all(len(m) == 6 for m in g.edges.values())
    pairs = {m for cell in g.edges.values() for m in map(frozenset, _pairs(cell))}
    assert set(honeycomb_patch(2).edges.values()) <= pairs


def _pairs(cell):
    cell = sorted(cell)
    return [(a, b) for i, a in enumerate(cell) for b in cell[i + 1:]]


def test_double_edge_cycle():
    for n in (4, 7):
        g = double_edge_cycle(n)
        assert len(g.vertices) == n and len(g.edges) == 2 * n
        assert all(g.degree(v) == 4 for v in g.vertices)
        assert set(g.pair_counts().values()) == {2}


def test_cuboid_counts():
    assert (len(cuboid_lattice(1).vertices), len(cuboid_lattice(1).edges)) == (8, 4)
    assert (len(cuboid_lattice(1, "alternating").vertices), len(cuboid_lattice(1, "alternating").edges)) == (8, 2)
    assert (len(cuboid_lattice(3, "alternating").vertices), len(cuboid_lattice(3, "alternating").edges)) == (16, 6)


@pytest.mark.parametrize("length", [1, 2, 3, 4])
def test_alternating_is_sub_multiset_of_full(length):
    full = sorted(map(sorted, cuboid_lattice(length).edges.values()))
    alt = sorted(map(sorted, cuboid_lattice(length, "alternating").edges.values()))
    rest = list(full)
    for m in alt:
        rest.remove(m)
    # one face of each opposite pair per cell
    for cell in range(length):
        faces = [e for e in cuboid_lattice(length, "alternating").edges if e.startswith(f"f{cell}")]
        js = sorted(int(e.rsplit("_", 1)[1]) for e in faces)
        assert len(js) == 2 and (js[1] - js[0]) % 2 == 1


@pytest.mark.parametrize("family", FAMILIES)
def test_deterministic(family):
    spec = LatticeSpec(family, 3)
    assert format_hypergraph(spec.build()) == format_hypergraph(LatticeSpec(family, 3).build())


@pytest.mark.parametrize("call", [
    lambda: honeycomb_patch(0),
    lambda: honeycomb_hyperlattice_patch(0),
    lambda: double_edge_cycle(2),
    lambda: cuboid_lattice(0),
    lambda: cuboid_lattice(2, "diagonal"),
    lambda: LatticeSpec("triangular", 2),
    lambda: LatticeSpec("double_edge_cycle", 2),
])
def test_bad_parameters(call):
    with pytest.raises(HypergraphError):
        call()
