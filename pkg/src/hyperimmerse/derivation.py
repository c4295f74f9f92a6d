"""Coalescence/dewetting derivations: certificates, replay and search.

A derivation starts from a sub-hypergraph of G, applies a list of steps and
ends in a copy of H. Detached vertices stay behind as isolated vertices,
which the final check ignores unless H names them.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping

from .hypergraph import Hypergraph, HypergraphError, coalesce, dewet, is_isomorphic, iso_invariant
from .immersion import NO, UNKNOWN, YES, ImmersionMap, SearchResult, default_budget, verify_immersion


@dataclass(frozen=True)
class Step:
    """``coalesce`` takes (e1, e2, new_id); ``dewet`` takes (edge, vertex)."""

    op: str
    args: tuple[str, ...]

    def __post_init__(self):
        want = {"coalesce": 3, "dewet": 2}.get(self.op)
        if want is None:
            raise HypergraphError(f"unknown step {self.op!r}")
        if len(self.args) != want:
            raise HypergraphError(f"{self.op} takes {want} arguments, got {len(self.args)}")
        object.__setattr__(self, "args", tuple(map(str, self.args)))

    def apply(self, g: Hypergraph) -> Hypergraph:
        if self.op == "coalesce":
            e1, e2, new_id = self.args
            return coalesce(g, e1, e2, new_id)
        e, v = self.args
        return dewet(g, e, v)

    def touches(self) -> set[str]:
        return set(self.args[:2]) if self.op == "coalesce" else {self.args[0]}

    def to_json(self) -> list[str]:
        return [self.op, *self.args]


@dataclass(frozen=True)
class DerivationSequence:
    initial_edges: tuple[str, ...]
    initial_vertices: tuple[str, ...]
    steps: tuple[Step, ...] = ()
    vertex_map: Mapping[str, str] = field(default_factory=dict)
    edge_map: Mapping[str, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "initial_edges": list(self.initial_edges),
            "initial_vertices": list(self.initial_vertices),
            "steps": [s.to_json() for s in self.steps],
            "final_isomorphism": {
                "vertex_map": dict(sorted(self.vertex_map.items())),
                "edge_map": dict(sorted(self.edge_map.items())),
            },
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "DerivationSequence":
        try:
            iso = doc["final_isomorphism"]
            return cls(
                tuple(map(str, doc["initial_edges"])),
                tuple(map(str, doc["initial_vertices"])),
                tuple(Step(s[0], tuple(s[1:])) for s in doc["steps"]),
                {str(k): str(v) for k, v in iso["vertex_map"].items()},
                {str(k): str(v) for k, v in iso["edge_map"].items()},
            )
        except (KeyError, TypeError, IndexError) as exc:
            raise HypergraphError(f"malformed derivation document: {exc}") from None

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def replay(g: Hypergraph, seq: DerivationSequence) -> list[Hypergraph]:
    """Every intermediate hypergraph, starting with the chosen subgraph.

    Raises ``HypergraphError`` when a step's precondition fails.
    """
    for e in seq.initial_edges:
        if e not in g.edges:
            raise HypergraphError(f"unknown edge {e!r}")
    states = [g.subgraph(seq.initial_edges, seq.initial_vertices)]
    for i, step in enumerate(seq.steps):
        try:
            states.append(step.apply(states[-1]))
        except HypergraphError as exc:
            raise HypergraphError(f"step {i} ({step.op} {' '.join(step.args)}): {exc}") from None
    return states


def matches_target(h: Hypergraph, final: Hypergraph, vertex_map: Mapping[str, str],
                   edge_map: Mapping[str, str]) -> bool:
    """True when the maps are an isomorphism from ``h`` onto ``final`` minus
    isolated vertices that ``h`` does not use."""
    if set(vertex_map) != set(h.vertices) or set(edge_map) != set(h.edges):
        return False
    images = set(vertex_map.values())
    if len(images) != len(vertex_map) or not images <= final.vertices:
        return False
    if sorted(edge_map.values()) != sorted(final.edges) or len(set(edge_map.values())) != len(edge_map):
        return False
    for e, members in h.edges.items():
        if final.edges[edge_map[e]] != frozenset(vertex_map[v] for v in members):
            return False
    covered = set().union(*final.edges.values()) if final.edges else set()
    return covered <= images


def verify_derivation(h: Hypergraph, g: Hypergraph, seq: DerivationSequence) -> bool:
    try:
        final = replay(g, seq)[-1]
    except HypergraphError:
        return False
    return matches_target(h, final, seq.vertex_map, seq.edge_map)


# -- immersion to derivation ---------------------------------------------------------


def immersion_to_derivation(h: Hypergraph, g: Hypergraph, a: ImmersionMap) -> DerivationSequence:
    """Merge each image into one edge, then detach the vertices that are not images."""
    if not verify_immersion(h, g, a, strict_singletons=True):
        raise HypergraphError("not a valid immersion with nonempty images")
    steps: list[Step] = []
    edge_map = {}
    for e in h.edge_ids:
        img = sorted(a.edge_map[e])
        head, rest = img[0], img[1:]
        members = set(g.edges[head])
        while rest:
            nxt = next(f for f in rest if g.edges[f] & members)
            rest.remove(nxt)
            steps.append(Step("coalesce", (head, nxt, head)))
            members |= g.edges[nxt]
        ends = {a.vertex_map[v] for v in h.edges[e]}
        for v in sorted(members - ends):
            steps.append(Step("dewet", (head, v)))
        edge_map[e] = head
    used = sorted({x for img in a.edge_map.values() for x in img})
    verts = set(a.vertex_map.values())
    for x in used:
        verts |= g.edges[x]
    return DerivationSequence(tuple(used), tuple(sorted(verts)), tuple(steps),
                              dict(a.vertex_map), edge_map)


# -- search ---------------------------------------------------------------------------


def find_subhypergraph(h: Hypergraph, g: Hypergraph) -> tuple[dict, dict] | None:
    """Injective maps with every edge of ``h`` landing on an equal-member edge of ``g``."""
    hedges = sorted(h.edge_ids, key=lambda e: -len(h.edges[e]))
    by_size: dict[int, list[str]] = {}
    for e, m in g.edges.items():
        by_size.setdefault(len(m), []).append(e)
    vmap: dict[str, str] = {}
    used_v: set[str] = set()
    emap: dict[str, str] = {}
    used_e: set[str] = set()

    def bind(pairs):
        # pairs: unmapped H vertices and free G vertices of one edge, to be matched
        hs, gs = pairs
        if not hs:
            yield
            return
        v = hs[0]
        for y in gs:
            vmap[v] = y
            used_v.add(y)
            yield from bind((hs[1:], [x for x in gs if x != y]))
            used_v.discard(y)
            del vmap[v]

    def rec(i):
        if i == len(hedges):
            yield
            return
        e = hedges[i]
        members = h.edges[e]
        for f in by_size.get(len(members), ()):
            if f in used_e:
                continue
            target = g.edges[f]
            mapped = {vmap[v] for v in members if v in vmap}
            if not mapped <= target:
                continue
            free = sorted(y for y in target - mapped if y not in used_v)
            fresh = sorted(v for v in members if v not in vmap)
            if len(free) != len(fresh):
                continue
            emap[e] = f
            used_e.add(f)
            for _ in bind((fresh, free)):
                yield from rec(i + 1)
            used_e.discard(f)
            del emap[e]

    for _ in rec(0):
        rest = sorted(v for v in h.vertices if v not in vmap)
        spare = sorted(g.vertices - used_v)
        if len(spare) >= len(rest):
            out = dict(vmap)
            out.update(zip(rest, spare))
            return out, dict(emap)
    return None


def _state_key(g: Hypergraph) -> tuple:
    return (iso_invariant(g), tuple(sorted(len(m) for m in g.edges.values())))


def find_derivation(h: Hypergraph, g: Hypergraph, budget: int | None = None) -> SearchResult:
    """Breadth-first search over coalesce/dewet sequences applied to all of ``g``.

    States are deduplicated up to isomorphism. A state containing ``h`` as an
    exact sub-hypergraph is a goal; the certificate keeps only the edges of
    ``g`` that flow into the matched edges, and only the steps touching them.
    """
    budget = default_budget() if budget is None else budget
    if len(h.vertices) > len(g.vertices) or len(h.edges) > len(g.edges):
        return SearchResult(NO)
    start = g
    parents: list[tuple[int, Step | None]] = [(-1, None)]
    states = [start]
    buckets: dict[tuple, list[int]] = {_state_key(start): [0]}
    queue = deque([0])
    nodes = 0
    need = len(h.edges)
    while queue:
        idx = queue.popleft()
        state = states[idx]
        nodes += 1
        if nodes > budget:
            return SearchResult(UNKNOWN, None, nodes)
        hit = find_subhypergraph(h, state)
        if hit is not None:
            seq = _certificate(h, g, states, parents, idx, *hit)
            return SearchResult(YES, seq, nodes, {"states": len(states)})
        for step in _moves(state, need):
            nxt = step.apply(state)
            key = _state_key(nxt)
            bucket = buckets.setdefault(key, [])
            if any(is_isomorphic(nxt, states[j]) for j in bucket):
                continue
            bucket.append(len(states))
            states.append(nxt)
            parents.append((idx, step))
            queue.append(len(states) - 1)
    return SearchResult(NO, None, nodes, {"states": len(states)})


def _moves(state: Hypergraph, need: int):
    eids = state.edge_ids
    if len(eids) > need:
        for i, e1 in enumerate(eids):
            for e2 in eids[i + 1:]:
                if state.edges[e1] & state.edges[e2]:
                    yield Step("coalesce", (e1, e2, e1))
    for e in eids:
        members = state.edges[e]
        if len(members) == 1 and len(eids) <= need:
            continue
        for v in sorted(members):
            yield Step("dewet", (e, v))


def _certificate(h, g, states, parents, idx, vmap, emap) -> DerivationSequence:
    chain: list[Step] = []
    while parents[idx][1] is not None:
        p, step = parents[idx]
        chain.append(step)
        idx = p
    chain.reverse()
    relevant = set(emap.values())
    kept: list[Step] = []
    for step in reversed(chain):
        if step.op == "coalesce":
            e1, e2, new_id = step.args
            if new_id in relevant:
                relevant.discard(new_id)
                relevant |= {e1, e2}
                kept.append(step)
        elif step.args[0] in relevant:
            kept.append(step)
    kept.reverse()
    verts = set(vmap.values())
    for e in relevant:
        verts |= g.edges[e]
    return DerivationSequence(tuple(sorted(relevant)), tuple(sorted(verts)), tuple(kept), vmap, emap)
