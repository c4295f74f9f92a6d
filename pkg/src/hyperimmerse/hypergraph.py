"""Multi-hypergraph value type, routing operations and Berge connectivity.

Hypergraphs are immutable. Vertices and edges are addressed by string ids and
always enumerated in sorted id order, so every search built on top of this
module is deterministic.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping


class HypergraphError(ValueError):
    """Raised for malformed hypergraphs or invalid operations."""


class ParseError(HypergraphError):
    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = "<text>"):
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.source = source


@dataclass(frozen=True)
class Hypergraph:
    """A loopless multi-hypergraph.

    ``edges`` maps an edge id to its member set. Parallel hyperedges (same
    member set) are distinct entries with distinct ids. ``cross`` holds the
    vertices carrying the "x" label used by factor graphs; it is empty for
    ordinary inputs.
    """

    vertices: frozenset[str]
    edges: Mapping[str, frozenset[str]]
    cross: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "cross", frozenset(self.cross))
        edges = {str(k): frozenset(v) for k, v in sorted(self.edges.items())}
        object.__setattr__(self, "edges", edges)
        for eid, members in edges.items():
            if not members:
                raise HypergraphError(f"edge {eid!r} is empty")
            missing = members - self.vertices
            if missing:
                raise HypergraphError(f"edge {eid!r} uses undeclared vertices {sorted(missing)}")
        if not self.cross <= self.vertices:
            raise HypergraphError("cross labels on undeclared vertices")

    @classmethod
    def from_edges(
        cls,
        edges: Mapping[str, Iterable[str]] | Iterable[Iterable[str]],
        vertices: Iterable[str] = (),
        cross: Iterable[str] = (),
    ) -> "Hypergraph":
        """Build from an id->members mapping or a plain list of member lists.

        Unnamed edges get ids ``e0, e1, ...`` zero-padded to sort naturally.
        Vertices mentioned by edges are declared implicitly.
        """
        if not isinstance(edges, Mapping):
            edges = list(edges)
            width = len(str(max(len(edges) - 1, 0)))
            edges = {f"e{i:0{width}d}": members for i, members in enumerate(edges)}
        table = {}
        for eid, members in edges.items():
            members = list(members)
            if len(set(members)) != len(members):
                raise HypergraphError(f"edge {eid!r} repeats a vertex (loops are not allowed)")
            table[str(eid)] = frozenset(str(m) for m in members)
        verts = set(map(str, vertices))
        for members in table.values():
            verts |= members
        return cls(frozenset(verts), table, frozenset(map(str, cross)))

    # -- basic views -------------------------------------------------------

    @cached_property
    def vertex_list(self) -> tuple[str, ...]:
        return tuple(sorted(self.vertices))

    @cached_property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(self.edges)

    def members(self, eid: str) -> frozenset[str]:
        try:
            return self.edges[eid]
        except KeyError:
            raise HypergraphError(f"unknown edge id {eid!r}") from None

    def size(self, eid: str) -> int:
        return len(self.members(eid))

    @cached_property
    def incidence(self) -> dict[str, tuple[str, ...]]:
        inc: dict[str, list[str]] = {v: [] for v in self.vertex_list}
        for eid, members in self.edges.items():
            for v in members:
                inc[v].append(eid)
        return {v: tuple(es) for v, es in inc.items()}

    def degree(self, v: str) -> int:
        return len(self.incidence[v])

    @property
    def total_incidence(self) -> int:
        return sum(len(m) for m in self.edges.values())

    def is_cross(self, v: str) -> bool:
        return v in self.cross

    def is_uniform(self, r: int) -> bool:
        return all(len(m) == r for m in self.edges.values())

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        body = ", ".join(f"{k}={{{','.join(sorted(m))}}}" for k, m in self.edges.items())
        return f"{type(self).__name__}(|V|={len(self.vertices)}, {body})"

    # -- derived hypergraphs -----------------------------------------------

    def replace(self, edges: Mapping[str, Iterable[str]] | None = None,
                vertices: Iterable[str] | None = None,
                cross: Iterable[str] | None = None) -> "Hypergraph":
        return Hypergraph(
            frozenset(self.vertices if vertices is None else vertices),
            dict(self.edges if edges is None else {k: frozenset(v) for k, v in edges.items()}),
            frozenset(self.cross if cross is None else cross),
        )

    def subgraph(self, edge_ids: Iterable[str], vertices: Iterable[str] = ()) -> "Hypergraph":
        """Sub-hypergraph on the given edges plus their members and ``vertices``."""
        keep = {e: self.members(e) for e in edge_ids}
        verts = set(vertices)
        for m in keep.values():
            verts |= m
        unknown = verts - self.vertices
        if unknown:
            raise HypergraphError(f"unknown vertices {sorted(unknown)}")
        return Hypergraph(frozenset(verts), keep, self.cross & verts)

    def without_isolated(self, keep: Iterable[str] = ()) -> "Hypergraph":
        used = set(keep)
        for m in self.edges.values():
            used |= m
        return Hypergraph(frozenset(self.vertices & used), dict(self.edges), self.cross & used)

    def relabel(self, mapping: Mapping[str, str]) -> "Hypergraph":
        m = lambda v: mapping.get(v, v)  # noqa: E731
        verts = [m(v) for v in self.vertices]
        if len(set(verts)) != len(verts):
            raise HypergraphError("relabelling is not injective")
        return Hypergraph(
            frozenset(verts),
            {e: frozenset(m(v) for v in mem) for e, mem in self.edges.items()},
            frozenset(m(v) for v in self.cross),
        )


def fresh_edge_id(g: Hypergraph, base: str) -> str:
    if base not in g.edges:
        return base
    for i in itertools.count(1):
        cand = f"{base}'{i}"
        if cand not in g.edges:
            return cand
    raise AssertionError  # unreachable


# -- routing operations ------------------------------------------------------


def coalesce(g: Hypergraph, e1: str, e2: str, new_id: str | None = None) -> Hypergraph:
    """Merge two hyperedges sharing a vertex into one covering both.

    The merged edge keeps the id of ``e1`` unless ``new_id`` is given.
    """
    if e1 == e2:
        raise HypergraphError("cannot coalesce an edge with itself")
    m1, m2 = g.members(e1), g.members(e2)
    if not m1 & m2:
        raise HypergraphError(f"edges {e1!r} and {e2!r} share no vertex")
    edges = dict(g.edges)
    del edges[e1], edges[e2]
    nid = e1 if new_id is None else new_id
    if nid in edges:
        raise HypergraphError(f"edge id {nid!r} already in use")
    edges[nid] = m1 | m2
    return Hypergraph(g.vertices, edges, g.cross)


def dewet(g: Hypergraph, eid: str, v: str) -> Hypergraph:
    """Detach ``eid`` from vertex ``v``; an edge left empty is deleted."""
    members = g.members(eid)
    if v not in members:
        raise HypergraphError(f"vertex {v!r} is not incident on edge {eid!r}")
    edges = dict(g.edges)
    rest = members - {v}
    if rest:
        edges[eid] = rest
    else:
        del edges[eid]
    return Hypergraph(g.vertices, edges, g.cross)


# -- connectivity ---------------------------------------------------------------


class _DisjointSet:
    def __init__(self, items: Iterable):
        self.parent = {x: x for x in items}

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def connected_components(g: Hypergraph) -> list[frozenset[str]]:
    """Partition of the vertices into maximal Berge-connected sets.

    Components are ordered by their smallest vertex id.
    """
    ds = _DisjointSet(g.vertex_list)
    for members in g.edges.values():
        first, *rest = sorted(members)
        for v in rest:
            ds.union(first, v)
    groups: dict[str, set[str]] = {}
    for v in g.vertex_list:
        groups.setdefault(ds.find(v), set()).add(v)
    return sorted((frozenset(s) for s in groups.values()), key=min)


def component_edges(g: Hypergraph, component: Iterable[str]) -> list[str]:
    comp = set(component)
    return [e for e, m in g.edges.items() if m & comp]


@dataclass(frozen=True)
class BergeCycle:
    """Alternating vertex/edge cycle ``v0 e0 v1 e1 ... v_{k-1} e_{k-1} (v0)``."""

    vertices: tuple[str, ...]
    edges: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.edges)

    def is_valid(self, g: Hypergraph) -> bool:
        k = len(self.edges)
        if k < 2 or len(self.vertices) != k:
            return False
        if len(set(self.vertices)) != k or len(set(self.edges)) != k:
            return False
        for i, e in enumerate(self.edges):
            if e not in g.edges:
                return False
            if not {self.vertices[i], self.vertices[(i + 1) % k]} <= g.edges[e]:
                return False
        return True


def iter_berge_cycles(g: Hypergraph, min_len: int = 2, max_len: int | None = None) -> Iterator[BergeCycle]:
    """Yield Berge cycles with at least ``min_len`` edges.

    Each cycle starts at its smallest vertex; both orientations may appear.
    """
    if min_len < 2:
        raise HypergraphError("Berge cycles have length at least 2")
    verts = g.vertex_list
    limit = len(verts) if max_len is None else max_len
    inc = g.incidence

    def extend(start, path_v, path_e, used_v, used_e):
        cur = path_v[-1]
        for e in inc[cur]:
            if e in used_e:
                continue
            members = g.edges[e]
            if len(path_v) >= min_len and start in members and len(path_v) >= 2:
                yield BergeCycle(tuple(path_v), tuple(path_e) + (e,))
            if len(path_v) >= limit:
                continue
            for w in sorted(members):
                if w in used_v or w < start:
                    continue
                used_v.add(w)
                used_e.add(e)
                path_v.append(w)
                path_e.append(e)
                yield from extend(start, path_v, path_e, used_v, used_e)
                path_v.pop()
                path_e.pop()
                used_v.discard(w)
                used_e.discard(e)

    for s in verts:
        yield from extend(s, [s], [], {s}, set())


def find_berge_cycle(g: Hypergraph, min_len: int = 2) -> BergeCycle | None:
    """First Berge cycle of length >= ``min_len`` in deterministic order, or None."""
    for cyc in iter_berge_cycles(g, min_len):
        return cyc
    return None


# -- isomorphism ------------------------------------------------------------------


def _vertex_signature(g: Hypergraph, v: str) -> tuple:
    sizes = sorted(len(g.edges[e]) for e in g.incidence[v])
    return (v in g.cross, tuple(sizes))


def _edge_multiset(g: Hypergraph) -> Counter:
    return Counter(g.edges.values())


def iter_isomorphisms(h1: Hypergraph, h2: Hypergraph) -> Iterator[dict[str, str]]:
    """Yield every vertex bijection mapping the edge multiset of h1 onto h2's.

    Cross labels must be preserved. Intended for small inputs.
    """
    if len(h1.vertices) != len(h2.vertices) or len(h1.edges) != len(h2.edges):
        return
    if sorted(map(len, h1.edges.values())) != sorted(map(len, h2.edges.values())):
        return
    sig1 = {v: _vertex_signature(h1, v) for v in h1.vertex_list}
    sig2 = {v: _vertex_signature(h2, v) for v in h2.vertex_list}
    if Counter(sig1.values()) != Counter(sig2.values()):
        return
    target = _edge_multiset(h2)
    # order h1 vertices so that each one shares edges with earlier ones where possible
    order: list[str] = []
    seen: set[str] = set()
    for start in sorted(h1.vertex_list, key=lambda v: (-h1.degree(v), v)):
        if start in seen:
            continue
        queue = [start]
        seen.add(start)
        while queue:
            v = queue.pop(0)
            order.append(v)
            for e in h1.incidence[v]:
                for w in sorted(h1.edges[e]):
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
    # edges of h1 that become fully mapped once order[i] is placed
    pos = {v: i for i, v in enumerate(order)}
    closing: list[list[frozenset[str]]] = [[] for _ in order]
    for m in h1.edges.values():
        closing[max(pos[v] for v in m)].append(m)
    # adjacency multiplicity checks use a pairwise count table on h2
    mapping: dict[str, str] = {}
    used: set[str] = set()
    partial: Counter = Counter()

    def rec(i):
        if i == len(order):
            yield dict(mapping)
            return
        v = order[i]
        for w in h2.vertex_list:
            if w in used or sig2[w] != sig1[v]:
                continue
            mapping[v] = w
            ok = True
            added = []
            for m in closing[i]:
                img = frozenset(mapping[x] for x in m)
                partial[img] += 1
                added.append(img)
                if partial[img] > target.get(img, 0):
                    ok = False
                    break
            if ok:
                used.add(w)
                yield from rec(i + 1)
                used.discard(w)
            for img in added:
                partial[img] -= 1
            del mapping[v]

    yield from rec(0)


def find_isomorphism(h1: Hypergraph, h2: Hypergraph) -> dict[str, str] | None:
    for iso in iter_isomorphisms(h1, h2):
        return iso
    return None


def is_isomorphic(h1: Hypergraph, h2: Hypergraph) -> bool:
    return find_isomorphism(h1, h2) is not None


def automorphisms(h: Hypergraph, limit: int | None = None) -> list[dict[str, str]]:
    """Automorphisms of ``h`` (identity first), truncated to ``limit`` entries."""
    out = []
    for iso in iter_isomorphisms(h, h):
        out.append(iso)
        if limit is not None and len(out) >= limit:
            break
    return out


def iso_invariant(g: Hypergraph) -> tuple:
    """Cheap isomorphism invariant used for hashing states and variants."""
    return (
        len(g.vertices),
        tuple(sorted(Counter(_vertex_signature(g, v) for v in g.vertex_list).items())),
        tuple(sorted(map(len, g.edges.values()))),
    )


# -- text format ------------------------------------------------------------------


def parse_hypergraph(text: str, source: str = "<text>") -> Hypergraph:
    """Parse the line-oriented ``v``/``e`` format.

    ``v <id> [x]`` declares a vertex (``x`` marks a cross-labelled vertex);
    ``e <edge_id> <v1> <v2> ...`` declares a hyperedge. ``#`` starts a comment.
    """
    vertices: list[str] = []
    cross: set[str] = set()
    edges: dict[str, frozenset[str]] = {}
    declared: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = line.split()
        if not tokens:
            continue
        col = lambda tok: raw.index(tok) + 1  # noqa: E731
        kind = tokens[0]
        if kind == "v":
            if len(tokens) not in (2, 3) or (len(tokens) == 3 and tokens[2] != "x"):
                raise ParseError("expected 'v <id>' or 'v <id> x'", lineno, col(kind), source)
            vid = tokens[1]
            if vid in declared:
                raise ParseError(f"vertex {vid!r} declared twice", lineno, col(vid), source)
            declared.add(vid)
            vertices.append(vid)
            if len(tokens) == 3:
                cross.add(vid)
        elif kind == "e":
            if len(tokens) < 3:
                raise ParseError("expected 'e <edge_id> <v1> ...'", lineno, col(kind), source)
            eid, members = tokens[1], tokens[2:]
            if eid in edges:
                raise ParseError(f"edge id {eid!r} used twice", lineno, col(eid), source)
            for m in members:
                if m not in declared:
                    raise ParseError(f"undeclared vertex {m!r}", lineno, col(m), source)
            if len(set(members)) != len(members):
                dup = next(m for m in members if members.count(m) > 1)
                raise ParseError(f"vertex {dup!r} repeated in edge {eid!r}", lineno, col(dup), source)
            edges[eid] = frozenset(members)
        else:
            raise ParseError(f"unknown directive {kind!r}", lineno, col(kind), source)
    return Hypergraph(frozenset(vertices), edges, frozenset(cross))


def format_hypergraph(g: Hypergraph, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    for v in g.vertex_list:
        lines.append(f"v {v} x" if v in g.cross else f"v {v}")
    for eid, members in g.edges.items():
        lines.append(f"e {eid} " + " ".join(sorted(members)))
    return "\n".join(lines) + "\n"


def load_hypergraph(path) -> Hypergraph:
    with open(path, encoding="utf-8") as fh:
        return parse_hypergraph(fh.read(), source=str(path))


def save_hypergraph(g: Hypergraph, path, comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_hypergraph(g, comment))


def complete_uniform(n: int, r: int, prefix: str = "") -> Hypergraph:
    """K_n^r on vertices A, B, C, ... with one edge per r-subset."""
    if not 1 <= r <= n <= 26:
        raise HypergraphError("need 1 <= r <= n <= 26")
    names = [prefix + chr(ord("A") + i) for i in range(n)]
    edges = {"".join(s): s for s in itertools.combinations(names, r)}
    return Hypergraph.from_edges(edges, vertices=names)
