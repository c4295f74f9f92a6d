"""Finite patches of the lattices used as example topologies.

Vertex id schemes
-----------------
honeycomb
    A honeycomb corner is the meeting point of three hexagonal cells. Cells
    use axial coordinates (q, r); a corner is an up-triangle ``U`` or a
    down-triangle ``D`` of cell centres, anchored at (q, r)::

        U(q, r) = {(q, r), (q+1, r), (q, r+1)}
        D(q, r) = {(q+1, r), (q, r+1), (q+1, r+1)}

    and is written ``U+0+0``, ``D-1+0`` and so on. Edges are named after the
    two cells they separate. Cell (q, r) lies in the patch iff
    max(|q|, |r|, |q+r|) < rings.
double edge cycle
    Vertices ``c0 .. c{n-1}``; the two edges between ci and c(i+1) are
    ``e{i}a`` and ``e{i}b``.
cuboid
    Vertex ``q{layer}_{corner}`` with corners 0..3 around the square cross
    section; the side face between corners j and j+1 of cell i is edge
    ``f{i}_{j}``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .hypergraph import Hypergraph, HypergraphError
from .ordinary import MultiGraph

FAMILIES = ("honeycomb", "double_edge_cycle", "honeycomb_hyper", "cuboid_full", "cuboid_alternating")


def _corner(kind: str, q: int, r: int) -> str:
    return f"{kind}{q:+d}{r:+d}"


def _cell_corners(q: int, r: int) -> list[str]:
    """The six corners around cell (q, r), in cyclic order."""
    return [
        _corner("U", q, r),
        _corner("D", q - 1, r),
        _corner("U", q - 1, r),
        _corner("D", q - 1, r - 1),
        _corner("U", q, r - 1),
        _corner("D", q, r - 1),
    ]


def _cells(rings: int) -> list[tuple[int, int]]:
    if rings < 1:
        raise HypergraphError("rings must be >= 1")
    n = rings - 1
    return sorted((q, r) for q in range(-n, n + 1) for r in range(-n, n + 1) if abs(q + r) <= n)


def honeycomb_patch(rings: int) -> MultiGraph:
    """Honeycomb made of ``rings`` concentric layers of hexagons (1, 7, 19, ... cells)."""
    edges: dict[frozenset, str] = {}
    for q, r in _cells(rings):
        corners = _cell_corners(q, r)
        for i in range(6):
            pair = frozenset((corners[i], corners[(i + 1) % 6]))
            if pair not in edges:
                a, b = sorted(pair)
                edges[pair] = f"{a}|{b}"
    return MultiGraph.from_hypergraph(Hypergraph.from_edges({eid: pair for pair, eid in edges.items()}))


def honeycomb_hyperlattice_patch(rings: int) -> Hypergraph:
    """Same corners as :func:`honeycomb_patch`; each cell is one size-6 hyperedge."""
    return Hypergraph.from_edges({f"H{q:+d}{r:+d}": _cell_corners(q, r) for q, r in _cells(rings)})


def double_edge_cycle(n: int) -> MultiGraph:
    if n < 3:
        raise HypergraphError("a double-edge cycle needs n >= 3")
    w = len(str(n - 1))
    name = lambda i: f"c{i % n:0{w}d}"  # noqa: E731
    edges = {}
    for i in range(n):
        edges[f"e{i:0{w}d}a"] = (name(i), name(i + 1))
        edges[f"e{i:0{w}d}b"] = (name(i), name(i + 1))
    return MultiGraph.from_hypergraph(Hypergraph.from_edges(edges))


def cuboid_lattice(length: int, mode: str = "full") -> Hypergraph:
    """Square tube of ``length`` cells with size-4 hyperedges on the side faces.

    ``full`` fills all four side faces of every cell. ``alternating`` keeps one
    face of each opposite pair per cell and swaps both along the axis: faces
    0 and 1 in even cells, faces 2 and 3 in odd cells.
    """
    if length < 1:
        raise HypergraphError("cuboid length must be >= 1")
    if mode not in ("full", "alternating"):
        raise HypergraphError(f"unknown cuboid mode {mode!r}")
    w = len(str(length))
    vid = lambda layer, c: f"q{layer:0{w}d}_{c % 4}"  # noqa: E731
    edges = {}
    for cell in range(length):
        if mode == "full":
            faces = (0, 1, 2, 3)
        else:
            faces = (0, 1) if cell % 2 == 0 else (2, 3)
        for j in faces:
            edges[f"f{cell:0{w}d}_{j}"] = (vid(cell, j), vid(cell, j + 1), vid(cell + 1, j), vid(cell + 1, j + 1))
    verts = [vid(layer, c) for layer in range(length + 1) for c in range(4)]
    return Hypergraph.from_edges(edges, vertices=verts)


@dataclass(frozen=True)
class LatticeSpec:
    family: str
    size: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise HypergraphError(f"unknown lattice family {self.family!r}")
        low = 3 if self.family == "double_edge_cycle" else 1
        if self.size < low:
            raise HypergraphError(f"{self.family} needs size >= {low}")

    def build(self) -> Hypergraph:
        if self.family == "honeycomb":
            return honeycomb_patch(self.size)
        if self.family == "honeycomb_hyper":
            return honeycomb_hyperlattice_patch(self.size)
        if self.family == "double_edge_cycle":
            return double_edge_cycle(self.size)
        return cuboid_lattice(self.size, "full" if self.family == "cuboid_full" else "alternating")
