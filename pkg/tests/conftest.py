import random
import sys
from pathlib import Path

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from hyperimmerse.hypergraph import Hypergraph
from hyperimmerse.ordinary import MultiGraph

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


def random_hypergraph(rng: random.Random, max_v: int, max_e: int, max_size: int, min_size: int = 1) -> Hypergraph:
    nv = rng.randint(1, max_v)
    names = [chr(ord("a") + i) for i in range(nv)]
    edges = []
    for _ in range(rng.randint(0, max_e)):
        k = rng.randint(min(min_size, nv), min(max_size, nv))
        edges.append(rng.sample(names, k))
    return Hypergraph.from_edges(edges, vertices=names)


def random_multigraph(rng: random.Random, max_v: int, max_e: int) -> MultiGraph:
    nv = rng.randint(2, max_v)
    pairs = [tuple(rng.sample(range(nv), 2)) for _ in range(rng.randint(1, max_e))]
    return MultiGraph.from_pairs([(f"v{a}", f"v{b}") for a, b in pairs], vertices=[f"v{i}" for i in range(nv)])


@st.composite
def hypergraphs(draw, max_v=5, max_e=5, max_size=3, min_size=1):
    nv = draw(st.integers(max(1, min_size), max_v))
    names = [chr(ord("a") + i) for i in range(nv)]
    lo = min(min_size, nv)
    sizes = st.integers(lo, min(max_size, nv))
    edges = draw(st.lists(sizes.flatmap(lambda k: st.permutations(names).map(lambda p: p[:k])), max_size=max_e))
    return Hypergraph.from_edges(edges, vertices=names)


@st.composite
def multigraphs(draw, max_v=5, max_e=7):
    nv = draw(st.integers(2, max_v))
    pair = st.tuples(st.integers(0, nv - 1), st.integers(0, nv - 1)).filter(lambda p: p[0] != p[1])
    pairs = draw(st.lists(pair, min_size=1, max_size=max_e))
    return MultiGraph.from_pairs([(f"v{a}", f"v{b}") for a, b in pairs], vertices=[f"v{i}" for i in range(nv)])


def random_3ec_series_parallel(rng: random.Random):
    """Grow an SP graph by subdivision and parallel additions, give every
    pair a multiplicity in 1..4 and keep it if it is 3-edge-connected."""
    from hyperimmerse.ordinary import is_series_parallel, is_three_edge_connected

    while True:
        target = rng.randint(2, 6)
        edges = [(0, 1)]
        n = 2
        while n < target:
            i = rng.randrange(len(edges))
            u, v = edges[i]
            if rng.random() < 0.6:
                edges[i] = (u, n)
                edges.append((n, v))
                n += 1
            else:
                edges.append((u, v))
        pairs = []
        for p in sorted({tuple(sorted(e)) for e in edges}):
            pairs += [p] * rng.randint(1, 4)
        g = MultiGraph.from_pairs([(f"v{a}", f"v{b}") for a, b in pairs])
        if is_series_parallel(g) and is_three_edge_connected(g):
            return g


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
