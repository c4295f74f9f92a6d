"""Hypergraph immersion: witness type, verifier and exhaustive decider."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .hypergraph import Hypergraph, HypergraphError, automorphisms, connected_components

DEFAULT_BUDGET = 10_000_000
BUDGET_ENV = "HYPERIMMERSE_BUDGET"

YES, NO, UNKNOWN = "yes", "no", "unknown"


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw:
        try:
            return int(float(raw))
        except ValueError:
            raise ValueError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None
    return DEFAULT_BUDGET


@dataclass(frozen=True)
class ImmersionMap:
    """Injective vertex map plus one G-edge set per H-edge."""

    vertex_map: Mapping[str, str]
    edge_map: Mapping[str, tuple[str, ...]]

    def to_json(self) -> dict:
        return {
            "vertex_map": dict(sorted(self.vertex_map.items())),
            "edge_map": {k: list(v) for k, v in sorted(self.edge_map.items())},
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "ImmersionMap":
        return cls(
            {str(k): str(v) for k, v in doc["vertex_map"].items()},
            {str(k): tuple(sorted(map(str, v))) for k, v in doc["edge_map"].items()},
        )


@dataclass
class SearchResult:
    """Three-valued search outcome; ``unknown`` means the node budget ran out."""

    status: str
    witness: object | None = None
    nodes: int = 0
    stats: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.status == YES

    @property
    def proven(self) -> bool:
        return self.status != UNKNOWN


class BudgetExceeded(Exception):
    pass


def _berge_connected(g: Hypergraph, edge_ids: Iterable[str], required: set[str]) -> bool:
    edge_ids = list(edge_ids)
    if not edge_ids:
        return len(required) <= 1
    verts: set[str] = set()
    for e in edge_ids:
        verts |= g.edges[e]
    if not required <= verts:
        return False
    sub = Hypergraph(frozenset(verts), {e: g.edges[e] for e in edge_ids})
    return len(connected_components(sub)) == 1


def verify_immersion(h: Hypergraph, g: Hypergraph, a: ImmersionMap, restricted: bool = False,
                     strict_singletons: bool = False) -> bool:
    """Check injectivity, connectivity of each image and edge-disjointness.

    With ``restricted``, no non-cross vertex of ``h`` may land on a cross vertex
    of ``g``. With ``strict_singletons``, every image must contain at least one
    edge (by default a size-1 edge of ``h`` may map to a bare vertex).
    Unknown ids raise ``HypergraphError``.
    """
    vm, em = a.vertex_map, a.edge_map
    for v, w in vm.items():
        if v not in h.vertices:
            raise HypergraphError(f"unknown H vertex {v!r}")
        if w not in g.vertices:
            raise HypergraphError(f"unknown G vertex {w!r}")
    for e, img in em.items():
        if e not in h.edges:
            raise HypergraphError(f"unknown H edge {e!r}")
        for x in img:
            if x not in g.edges:
                raise HypergraphError(f"unknown G edge {x!r}")
    if set(vm) != set(h.vertices) or set(em) != set(h.edges):
        return False
    if len(set(vm.values())) != len(vm):
        return False
    if restricted and any(vm[v] in g.cross for v in h.vertices if v not in h.cross):
        return False
    seen: set[str] = set()
    for e, members in h.edges.items():
        img = em[e]
        if len(set(img)) != len(img) or seen & set(img):
            return False
        seen |= set(img)
        if strict_singletons and not img:
            return False
        if not _berge_connected(g, img, {vm[v] for v in members}):
            return False
    return True


# -- exhaustive search ------------------------------------------------------------------


class _Search:
    """Backtracking over H-edges; images are minimal connected G-edge sets.

    Vertex images are chosen lazily when an H-edge first touches them.
    Pruning: injectivity, restriction labels, free-degree bounds, connectivity
    of remaining terminals, interchangeable parallel G-edges (always take the
    lowest unused copy) and a lex-leader rule over automorphisms of H.
    """

    def __init__(self, h: Hypergraph, g: Hypergraph, restricted: bool, strict_singletons: bool,
                 budget: int, symmetry: bool = True):
        self.h, self.g = h, g
        self.budget = budget
        self.nodes = 0
        self.strict = strict_singletons

        self.gv = g.vertex_list
        gidx = {v: i for i, v in enumerate(self.gv)}
        self.ge = g.edge_ids
        self.gmem = [tuple(sorted(gidx[v] for v in g.edges[e])) for e in self.ge]
        self.gmask = [sum(1 << v for v in mem) for mem in self.gmem]
        self.big = [len(mem) >= 2 for mem in self.gmem]
        nv = len(self.gv)
        self.inc = [[] for _ in range(nv)]
        for ei, mem in enumerate(self.gmem):
            for v in mem:
                self.inc[v].append(ei)
        self.inc2mask = [sum(1 << e for e in es if self.big[e]) for es in self.inc]
        self.incmask = [sum(1 << e for e in es) for es in self.inc]
        prev: dict[tuple, int] = {}
        self.pprev = []
        for ei, mem in enumerate(self.gmem):
            self.pprev.append(prev.get(mem, -1))
            prev[mem] = ei
        gcross = [v in g.cross for v in self.gv]

        self.hv = h.vertex_list
        hidx = {v: i for i, v in enumerate(self.hv)}
        self.he = h.edge_ids
        hmem = [tuple(sorted(hidx[v] for v in h.edges[e])) for e in self.he]
        self.hmem = hmem
        nh = len(self.hv)
        self.need2 = [0] * nh
        self.need_all = [0] * nh
        for mem in hmem:
            for v in mem:
                self.need_all[v] += 1
                if len(mem) >= 2:
                    self.need2[v] += 1
        self.allowed = []
        for hv in range(nh):
            normal = self.hv[hv] not in h.cross
            cand = 0
            for y in range(nv):
                if restricted and normal and gcross[y]:
                    continue
                if self.inc2mask[y].bit_count() < self.need2[hv]:
                    continue
                if self.strict and self.incmask[y].bit_count() < self.need_all[hv]:
                    continue
                cand |= 1 << y
            self.allowed.append(cand)

        self._plan()
        self.group = []
        if symmetry and nh > 1:
            autos = automorphisms(h, limit=2000)
            for iso in autos[1:]:
                self.group.append([hidx[iso[v]] for v in self.hv])

        self.maxlen = len(self.ge)
        self.capped = False
        self.vmap = [-1] * nh
        self.gused = 0
        self.used = 0
        self.images: list[int] = [0] * len(self.he)

    # ordering ---------------------------------------------------------------

    def _plan(self):
        nh = len(self.hv)
        remaining = set(range(len(self.he)))
        mapped: set[int] = set()
        order: list[int] = []
        while remaining:
            def key(ei):
                mem = self.hmem[ei]
                size = len(mem)
                return (size >= 2, sum(v in mapped for v in mem), size, -ei)
            best = max(remaining, key=key)
            remaining.discard(best)
            order.append(best)
            mapped.update(self.hmem[best])
        self.order = order
        self.pi: list[int] = []
        self.terms: list[tuple[int, ...]] = []
        seen: set[int] = set()
        for ei in order:
            mem = self.hmem[ei]
            old = [v for v in mem if v in seen]
            new = [v for v in mem if v not in seen]
            self.terms.append(tuple(sorted(old, key=lambda v: self.pi.index(v)) + new))
            for v in new:
                seen.add(v)
                self.pi.append(v)
        self.isolated = [v for v in range(nh) if v not in seen]
        self.pi.extend(self.isolated)
        self.pos = {v: i for i, v in enumerate(self.pi)}
        # remaining need per H-vertex once the k-th edge of ``order`` is placed
        self.rem2_after = []
        self.remall_after = []
        rem2 = list(self.need2)
        remall = list(self.need_all)
        for ei in order:
            for v in self.hmem[ei]:
                remall[v] -= 1
                if len(self.hmem[ei]) >= 2:
                    rem2[v] -= 1
            self.rem2_after.append(list(rem2))
            self.remall_after.append(list(remall))

    # helpers ----------------------------------------------------------------

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded

    def _usable(self, e: int, taken: int) -> bool:
        if (taken >> e) & 1:
            return False
        p = self.pprev[e]
        return p < 0 or bool((taken >> p) & 1)

    def _lex_ok(self, t: int) -> bool:
        vmap = self.vmap
        k = self.pos[t]
        pi = self.pi
        for sigma in self.group:
            for i in range(k + 1):
                a = vmap[pi[i]]
                b = vmap[sigma[pi[i]]]
                if b < 0:
                    break
                if b < a:
                    return False
                if b > a:
                    break
        return True

    def _eligible(self, t: int, y: int, taken: int, step: int, extra: int = 0) -> bool:
        if not (self.allowed[t] >> y) & 1 or (self.gused >> y) & 1:
            return False
        # ``taken`` already holds an edge at y serving the current H-edge unless extra=1
        if (self.inc2mask[y] & ~taken).bit_count() < self.rem2_after[step][t] + extra:
            return False
        if self.strict and (self.incmask[y] & ~taken).bit_count() < self.remall_after[step][t] + extra:
            return False
        return True

    def _assign(self, t: int, y: int) -> bool:
        self.vmap[t] = y
        self.gused |= 1 << y
        if self.group and not self._lex_ok(t):
            self._unassign(t, y)
            return False
        return True

    def _unassign(self, t: int, y: int):
        self.vmap[t] = -1
        self.gused &= ~(1 << y)

    # minimal connecting edge sets ----------------------------------------------------

    def _paths(self, vs: int, taken: int, target: int, endpoint_for: int, step: int):
        """Berge paths leaving vertex set ``vs`` through unused edges.

        With ``target >= 0`` yield (edge mask, vertex mask) for paths ending at
        ``target``; otherwise yield (edge mask, vertex mask, endpoint) for every
        eligible endpoint for H-vertex ``endpoint_for``.
        """
        gmask, big = self.gmask, self.big
        tbit = 1 << target if target >= 0 else 0

        def extend(emask, vmask, last, before, depth):
            # last: vertices of the newest path edge; before: vertices of earlier path edges
            if depth >= self.maxlen:
                self.capped = True
                return
            cand = 0
            x = last
            while x:
                low = x & -x
                cand |= self.inc2mask[low.bit_length() - 1]
                x ^= low
            cand &= ~emask
            while cand:
                low = cand & -cand
                f = low.bit_length() - 1
                cand ^= low
                if not big[f] or not self._usable(f, taken | emask):
                    continue
                fm = gmask[f]
                if fm & vs or fm & before:
                    continue
                self._tick()
                if target >= 0:
                    if fm & tbit:
                        yield (emask | low, vmask | fm)
                        continue
                else:
                    yb = fm & ~last
                    while yb:
                        lb = yb & -yb
                        y = lb.bit_length() - 1
                        yb ^= lb
                        if self._eligible(endpoint_for, y, taken | emask | low, step):
                            yield (emask | low, vmask | fm, y)
                yield from extend(emask | low, vmask | fm, fm, before | last, depth + 1)

        # first edge: any usable edge touching vs
        cand = 0
        x = vs
        while x:
            low = x & -x
            cand |= self.inc2mask[low.bit_length() - 1]
            x ^= low
        while cand:
            low = cand & -cand
            e = low.bit_length() - 1
            cand ^= low
            if not self._usable(e, taken):
                continue
            self._tick()
            em = gmask[e]
            new_v = em & ~vs
            if not new_v:
                continue
            if target >= 0:
                if em & tbit:
                    yield (1 << e, em)
                    continue
            else:
                yb = new_v
                while yb:
                    lb = yb & -yb
                    y = lb.bit_length() - 1
                    yb ^= lb
                    if self._eligible(endpoint_for, y, taken | (1 << e), step):
                        yield (1 << e, em, y)
            yield from extend(1 << e, em, new_v, 0, 1)

    def _trees(self, step: int):
        """Yield edge masks of minimal connected sets for the step-th H-edge.

        Newly met terminals are assigned into ``self.vmap`` while a mask is
        being yielded and released afterwards.
        """
        terms = self.terms[step]
        used = self.used
        strict = self.strict

        if len(terms) == 1:
            t = terms[0]
            if self.vmap[t] >= 0:
                ys = [self.vmap[t]]
                fresh = False
            else:
                ys = [y for y in range(len(self.gv)) if self._eligible_single(t, y, step)]
                fresh = True
            for y in ys:
                if fresh:
                    self._tick()
                    if not self._assign(t, y):
                        continue
                if strict:
                    for e in self.inc[y]:
                        if self._usable(e, used):
                            self._tick()
                            yield 1 << e
                else:
                    yield 0
                if fresh:
                    self._unassign(t, y)
            return

        def rec(i, emask, vs):
            if i == len(terms):
                yield emask
                return
            t = terms[i]
            taken = used | emask
            x = self.vmap[t]
            if x >= 0:
                if i == 0:
                    yield from rec(1, 0, 1 << x)
                    return
                if (vs >> x) & 1:
                    yield from rec(i + 1, emask, vs)
                    return
                for pm, pv in self._paths(vs, taken, x, -1, step):
                    yield from rec(i + 1, emask | pm, vs | pv)
                return
            if i == 0:
                for y in range(len(self.gv)):
                    if not self._eligible(t, y, used, step, extra=1):
                        continue
                    self._tick()
                    if self._assign(t, y):
                        yield from rec(1, 0, 1 << y)
                        self._unassign(t, y)
                return
            # image already inside the tree
            yb = vs
            while yb:
                lb = yb & -yb
                y = lb.bit_length() - 1
                yb ^= lb
                if self._eligible(t, y, taken, step):
                    self._tick()
                    if self._assign(t, y):
                        yield from rec(i + 1, emask, vs)
                        self._unassign(t, y)
            # or reached by a new path
            for pm, pv, y in self._paths(vs, taken, -1, t, step):
                if (self.gused >> y) & 1:
                    continue
                if self._assign(t, y):
                    yield from rec(i + 1, emask | pm, vs | pv)
                    self._unassign(t, y)

        yield from rec(0, 0, 0)

    def _eligible_single(self, t, y, step) -> bool:
        if not (self.allowed[t] >> y) & 1 or (self.gused >> y) & 1:
            return False
        if self.strict:
            return (self.incmask[y] & ~self.used).bit_count() >= self.remall_after[step][t] + 1
        return True

    # feasibility of the rest ------------------------------------------------------------

    def _feasible(self, step: int) -> bool:
        used = self.used
        rem2 = self.rem2_after[step]
        remall = self.remall_after[step]
        for t in range(len(self.hv)):
            y = self.vmap[t]
            if y < 0:
                continue
            if (self.inc2mask[y] & ~used).bit_count() < rem2[t]:
                return False
            if self.strict and (self.incmask[y] & ~used).bit_count() < remall[t]:
                return False
        pending = []
        for ei in self.order[step + 1:]:
            imgs = [self.vmap[v] for v in self.hmem[ei] if self.vmap[v] >= 0]
            if len(imgs) >= 2:
                pending.append(imgs)
        if not pending:
            return True
        # union-find over unused edges of size >= 2
        parent = list(range(len(self.gv)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e, mem in enumerate(self.gmem):
            if not self.big[e] or (used >> e) & 1:
                continue
            r0 = find(mem[0])
            for v in mem[1:]:
                rv = find(v)
                if rv != r0:
                    parent[rv] = r0
        for imgs in pending:
            r = find(imgs[0])
            if any(find(y) != r for y in imgs[1:]):
                return False
        return True

    # driver ---------------------------------------------------------------------------

    def run(self) -> ImmersionMap | None:
        h, g = self.h, self.g
        if len(h.vertices) > len(g.vertices):
            return None
        big_h = sum(len(m) >= 2 for m in self.hmem)
        big_g = sum(self.big)
        if big_h > big_g or (self.strict and len(self.he) > len(self.ge)):
            return None
        if any(a == 0 for a in self.allowed):
            return None
        # iterative deepening on path length; an uncapped pass is exhaustive
        cap = 2
        while True:
            self.maxlen = cap
            self.capped = False
            found = self._step(0)
            if found is not None or not self.capped:
                return found
            if cap >= len(self.ge):
                return None
            cap *= 2

    def _step(self, step: int) -> ImmersionMap | None:
        if step == len(self.order):
            return self._finish()
        ei = self.order[step]
        for emask in self._trees(step):
            self._tick()
            self.images[ei] = emask
            self.used |= emask
            if self._feasible(step):
                found = self._step(step + 1)
                if found is not None:
                    return found
            self.used &= ~emask
        self.images[ei] = 0
        return None

    def _finish(self) -> ImmersionMap | None:
        placed = []
        ok = True
        # isolated H-vertices: normal ones first since they have fewer options
        for t in sorted(self.isolated, key=lambda v: (self.hv[v] in self.h.cross, v)):
            free = self.allowed[t] & ~self.gused
            if not free:
                ok = False
                break
            y = (free & -free).bit_length() - 1
            self.vmap[t] = y
            self.gused |= 1 << y
            placed.append((t, y))
        result = None
        if ok:
            vertex_map = {self.hv[t]: self.gv[y] for t, y in enumerate(self.vmap)}
            edge_map = {}
            for ei, eid in enumerate(self.he):
                mask = self.images[ei]
                edge_map[eid] = tuple(self.ge[e] for e in range(len(self.ge)) if (mask >> e) & 1)
            result = ImmersionMap(vertex_map, edge_map)
        for t, y in placed:
            self._unassign(t, y)
        return result


def find_immersion_bruteforce(h: Hypergraph, g: Hypergraph, budget: int | None = None,
                              restricted: bool = False, strict_singletons: bool = False,
                              symmetry: bool = True) -> SearchResult:
    """Exhaustively decide whether ``h`` immerses in ``g``.

    Returns status ``yes`` with a witness, ``no`` when the search space is
    exhausted, or ``unknown`` when more than ``budget`` nodes were expanded.
    """
    budget = default_budget() if budget is None else budget
    search = _Search(h, g, restricted, strict_singletons, budget, symmetry)
    try:
        witness = search.run()
    except BudgetExceeded:
        return SearchResult(UNKNOWN, None, search.nodes)
    if witness is None:
        return SearchResult(NO, None, search.nodes)
    return SearchResult(YES, witness, search.nodes)


def immerses(h: Hypergraph, g: Hypergraph, **kwargs) -> bool:
    res = find_immersion_bruteforce(h, g, **kwargs)
    if res.status == UNKNOWN:
        raise BudgetExceeded(f"search budget exhausted after {res.nodes} nodes")
    return res.status == YES
