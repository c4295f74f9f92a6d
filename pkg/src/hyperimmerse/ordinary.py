"""Algorithms on ordinary (2-uniform) multigraphs.

Covers lifting, cut points and blocks, series-parallel recognition by
reduction, three-edge-connected components with virtual edges, pruning, and
the K_4 immersion test for three-edge-connected series-parallel graphs.
"""

from __future__ import annotations

from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .hypergraph import Hypergraph, HypergraphError, fresh_edge_id


@dataclass(frozen=True, repr=False)
class MultiGraph(Hypergraph):
    """A hypergraph whose edges all have exactly two members.

    ``virtual`` lists edge ids standing in for connectivity outside a
    three-edge-connected component; they count towards degrees like real edges.
    """

    virtual: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "virtual", frozenset(self.virtual))
        for eid, m in self.edges.items():
            if len(m) != 2:
                raise HypergraphError(f"edge {eid!r} has size {len(m)}, expected 2")
        if not self.virtual <= set(self.edges):
            raise HypergraphError("virtual flags on unknown edges")

    @classmethod
    def from_hypergraph(cls, g: Hypergraph) -> "MultiGraph":
        if isinstance(g, MultiGraph):
            return g
        return cls(g.vertices, dict(g.edges), g.cross)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]], vertices: Iterable[str] = (),
                   cross: Iterable[str] = ()) -> "MultiGraph":
        pairs = list(pairs)
        width = len(str(max(len(pairs) - 1, 0)))
        return cls.from_hypergraph(Hypergraph.from_edges(
            {f"e{i:0{width}d}": p for i, p in enumerate(pairs)}, vertices, cross))

    def ends(self, eid: str) -> tuple[str, str]:
        u, v = sorted(self.members(eid))
        return u, v

    def other(self, eid: str, v: str) -> str:
        u, w = self.ends(eid)
        return w if v == u else u

    def neighbours(self, v: str) -> set[str]:
        return {self.other(e, v) for e in self.incidence[v]}

    def multiplicity(self, u: str, v: str) -> int:
        key = frozenset((u, v))
        return sum(1 for m in self.edges.values() if m == key)

    def pair_counts(self) -> Counter:
        return Counter(self.edges.values())

    def replace(self, edges=None, vertices=None, cross=None, virtual=None) -> "MultiGraph":
        edges = dict(self.edges if edges is None else {k: frozenset(v) for k, v in edges.items()})
        virt = self.virtual if virtual is None else frozenset(virtual)
        return MultiGraph(
            frozenset(self.vertices if vertices is None else vertices),
            edges,
            frozenset(self.cross if cross is None else cross),
            virt & set(edges),
        )

    def induced(self, vertices: Iterable[str]) -> "MultiGraph":
        vs = frozenset(vertices)
        edges = {e: m for e, m in self.edges.items() if m <= vs}
        return MultiGraph(vs, edges, self.cross & vs, self.virtual & set(edges))

    def to_hypergraph(self) -> Hypergraph:
        return Hypergraph(self.vertices, dict(self.edges), self.cross)


def as_multigraph(g: Hypergraph) -> MultiGraph:
    return MultiGraph.from_hypergraph(g)


# -- lifting ------------------------------------------------------------------------


def lift(g: MultiGraph, e1: str, e2: str, new_id: str | None = None) -> MultiGraph:
    """Replace adjacent edges {v,u}, {u,w} by the single edge {v,w}."""
    if e1 == e2:
        raise HypergraphError("lifting needs two distinct edges")
    m1, m2 = g.members(e1), g.members(e2)
    shared = m1 & m2
    if len(shared) != 1:
        if not shared:
            raise HypergraphError(f"edges {e1!r} and {e2!r} are not adjacent")
        raise HypergraphError("lifting parallel edges would create a loop")
    (v,) = m1 - shared
    (w,) = m2 - shared
    edges = dict(g.edges)
    del edges[e1], edges[e2]
    nid = e1 if new_id is None else new_id
    edges[nid] = frozenset((v, w))
    return g.replace(edges=edges)


# -- cut points and blocks -------------------------------------------------------------


def cut_points_and_biconnected(g: MultiGraph) -> tuple[set[str], list[MultiGraph]]:
    """Articulation points and biconnected components (as edge-induced subgraphs).

    Components are lists of edges; isolated vertices form no component.
    Parallel edges stay together in one block and never create cut points.
    """
    disc: dict[str, int] = {}
    low: dict[str, int] = {}
    cuts: set[str] = set()
    blocks: list[list[str]] = []
    counter = 0
    for root in g.vertex_list:
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        edge_stack: list[str] = []
        # iterative DFS; frames are (vertex, parent edge, incident edge iterator)
        stack = [(root, None, iter(g.incidence[root]))]
        root_children = 0
        while stack:
            v, pedge, it = stack[-1]
            advanced = False
            for e in it:
                if e == pedge:
                    continue
                w = g.other(e, v)
                if w not in disc:
                    edge_stack.append(e)
                    disc[w] = low[w] = counter
                    counter += 1
                    if v == root:
                        root_children += 1
                    stack.append((w, e, iter(g.incidence[w])))
                    advanced = True
                    break
                if disc[w] < disc[v]:
                    edge_stack.append(e)
                    low[v] = min(low[v], disc[w])
            if advanced:
                continue
            stack.pop()
            if stack:
                u = stack[-1][0]
                low[u] = min(low[u], low[v])
                if low[v] >= disc[u]:
                    if u != root:
                        cuts.add(u)
                    block = []
                    while edge_stack:
                        e = edge_stack.pop()
                        block.append(e)
                        if e == pedge:
                            break
                    blocks.append(block)
        if root_children > 1:
            cuts.add(root)
    comps = []
    for block in blocks:
        verts = set()
        for e in block:
            verts |= g.edges[e]
        comps.append(MultiGraph(frozenset(verts), {e: g.edges[e] for e in block},
                                g.cross & verts, g.virtual & set(block)))
    comps.sort(key=lambda b: (min(b.vertices), b.edge_ids))
    return cuts, comps


# -- series-parallel ---------------------------------------------------------------------


def _reduces_to_edge(block: MultiGraph) -> bool:
    """Series/parallel reduction of one biconnected block down to a single edge."""
    adj: dict[str, Counter] = defaultdict(Counter)
    for m in block.edges.values():
        u, v = tuple(m)
        adj[u][v] += 1
        adj[v][u] += 1
    # parallel reduction is implicit: adjacency stores pairs, multiplicity is irrelevant
    work = deque(sorted(adj))
    while work:
        v = work.popleft()
        if v not in adj or len(adj[v]) != 2:
            continue
        u, w = sorted(adj[v])
        del adj[u][v], adj[w][v], adj[v]
        adj[u][w] += 1
        adj[w][u] += 1
        work.extend((u, w))
    return len(adj) <= 2


def is_series_parallel(g: MultiGraph) -> bool:
    """True iff every block reduces to one edge by series and parallel steps.

    Equivalently, ``g`` contains no subdivision of K_4.
    """
    _, blocks = cut_points_and_biconnected(as_multigraph(g))
    return all(_reduces_to_edge(b) for b in blocks)


# -- edge connectivity ---------------------------------------------------------------------


def edge_disjoint_paths(g: Hypergraph, s: str, t: str, cap: int | None = None,
                        removed: Iterable[str] = ()) -> int:
    """Number of pairwise edge-disjoint s-t paths (unit-capacity max-flow).

    Stops counting at ``cap`` when given. Edges in ``removed`` are ignored.
    Works on any hypergraph by treating each edge as a unit-capacity hub.
    """
    if s == t:
        raise HypergraphError("endpoints must differ")
    skip = set(removed)
    # node-split network: vertex nodes ('v', x) and edge hubs ('in'/'out', e)
    residual: dict[tuple, dict[tuple, int]] = defaultdict(lambda: defaultdict(int))
    for e, m in g.edges.items():
        if e in skip or len(m) < 2:
            continue
        ein, eout = ("in", e), ("out", e)
        residual[ein][eout] += 1
        for x in m:
            residual[("v", x)][ein] += 1
            residual[eout][("v", x)] += 1
    source, sink = ("v", s), ("v", t)
    flow = 0
    while cap is None or flow < cap:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            x = queue.popleft()
            for y, c in residual[x].items():
                if c > 0 and y not in parent:
                    parent[y] = x
                    queue.append(y)
        if sink not in parent:
            break
        y = sink
        while parent[y] is not None:
            x = parent[y]
            residual[x][y] -= 1
            residual[y][x] += 1
            y = x
        flow += 1
    return flow


def _components_after_removal(g: MultiGraph, removed: set[str]) -> int:
    seen: set[str] = set()
    count = 0
    for s in g.vertex_list:
        if s in seen:
            continue
        count += 1
        seen.add(s)
        stack = [s]
        while stack:
            v = stack.pop()
            for e in g.incidence[v]:
                if e in removed:
                    continue
                w = g.other(e, v)
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    return count


def three_edge_classes(g: Hypergraph) -> list[frozenset[str]]:
    """Maximal vertex sets that are pairwise joined by >= 3 edge-disjoint paths."""
    classes: list[list[str]] = []
    for v in g.vertex_list:
        for cls in classes:
            if edge_disjoint_paths(g, cls[0], v, cap=3) >= 3:
                cls.append(v)
                break
        else:
            classes.append([v])
    return sorted((frozenset(c) for c in classes), key=min)


def three_edge_connected_components(g: MultiGraph) -> list[MultiGraph]:
    """Three-edge-connected components with induced and virtual edges.

    A virtual edge {u, v} is added for every pair of edges {u, x}, {v, y}
    (u != v inside the component, x != y outside) whose removal disconnects
    the graph. Virtual edge ids start with ``~v``.
    """
    g = as_multigraph(g)
    base = _components_after_removal(g, set())
    out = []
    for cls in three_edge_classes(g):
        comp = g.induced(cls)
        leaving = []  # (inner vertex, outer vertex, edge id)
        for e, m in g.edges.items():
            inside = m & cls
            if len(inside) == 1:
                (u,) = inside
                (x,) = m - inside
                leaving.append((u, x, e))
        edges = dict(comp.edges)
        virtual = set()
        for i, (u, x, e1) in enumerate(leaving):
            for v, y, e2 in leaving[i + 1:]:
                if u == v or x == y:
                    continue
                if _components_after_removal(g, {e1, e2}) > base:
                    vid = f"~v{len(virtual)}"
                    while vid in edges:
                        vid += "'"
                    edges[vid] = frozenset((u, v))
                    virtual.add(vid)
        out.append(MultiGraph(cls, edges, g.cross & cls, frozenset(virtual)))
    return out


def is_three_edge_connected(g: Hypergraph) -> bool:
    verts = g.vertex_list
    return all(edge_disjoint_paths(g, verts[0], v, cap=3) >= 3 for v in verts[1:])


# -- pruning and the K_4 test ---------------------------------------------------------


def _set_multiplicity(g: MultiGraph, u: str, v: str, k: int) -> MultiGraph:
    key = frozenset((u, v))
    ids = [e for e, m in g.edges.items() if m == key]
    edges = dict(g.edges)
    if len(ids) > k:
        # drop real copies before virtual ones, highest ids first
        ids.sort(key=lambda e: (e in g.virtual, e))
        for e in ids[k:]:
            del edges[e]
    else:
        for _ in range(k - len(ids)):
            nid = fresh_edge_id(g.replace(edges=edges), f"{u}-{v}")
            edges[nid] = key
    return g.replace(edges=edges)


def prune(g: MultiGraph) -> MultiGraph:
    """Cap edge multiplicities at vertices v with exactly two neighbours u, w.

    Two triggers, applied until nothing changes: when {u,w} is a single edge
    both v-u and v-w are capped at 2; when v-u is a single edge, v-w is capped
    at 2. Either way v can route at most one extra path through itself.
    """
    g = as_multigraph(g)
    changed = True
    while changed:
        changed = False
        for v in g.vertex_list:
            nbrs = sorted(g.neighbours(v))
            if len(nbrs) != 2:
                continue
            u, w = nbrs
            capped = set()
            if g.multiplicity(u, w) == 1:
                capped |= {u, w}
            for a, b in ((u, w), (w, u)):
                if g.multiplicity(v, a) == 1:
                    capped.add(b)
            for x in sorted(capped):
                if g.multiplicity(v, x) > 2:
                    g = _set_multiplicity(g, v, x, 2)
                    changed = True
    return g


def test_k4(x: MultiGraph, check: bool = True) -> bool:
    """Decide whether a three-edge-connected series-parallel multigraph immerses K_4."""
    x = as_multigraph(x)
    if check:
        if len(x.vertices) > 1 and not is_three_edge_connected(x):
            raise HypergraphError("test_k4 requires a three-edge-connected graph")
        if not is_series_parallel(x):
            raise HypergraphError("test_k4 requires a series-parallel graph")
    if len(x.vertices) < 4:
        return False
    for v in x.vertex_list:
        nbrs = x.neighbours(v)
        if len(nbrs) == 1:
            (u,) = nbrs
            if x.multiplicity(u, v) > 3:
                x = _set_multiplicity(x, u, v, 3)
    cuts, blocks = cut_points_and_biconnected(x)
    if any(x.degree(c) >= 7 for c in cuts):
        return True
    for block in blocks:
        if len(block.vertices) < 4:
            continue
        pruned = prune(block)
        if any(pruned.degree(v) >= 5 for v in pruned.vertex_list):
            return True
    return False


test_k4.__test__ = False  # not a pytest test despite the name


def k4_immersion_multigraph(g: MultiGraph) -> bool:
    """K_4 immerses in ``g`` iff g is not series-parallel or a 3EC component passes test_k4."""
    g = as_multigraph(g)
    if not is_series_parallel(g):
        return True
    for comp in three_edge_connected_components(g):
        if len(comp.vertices) >= 4 and test_k4(comp, check=False):
            return True
    return False
