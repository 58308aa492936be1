import functools
from pathlib import Path

import networkx as nx
import numpy as np
import pytest

from densest.fixtures import FIXTURES, make_fixture
from densest.graph import Graph

DATA = Path(__file__).parent / "data"


def to_graph(g: nx.Graph) -> Graph:
    g = nx.convert_node_labels_to_integers(g)
    return Graph.from_edges(g.number_of_nodes(), list(g.edges()))


@functools.lru_cache(maxsize=None)
def atlas_connected(max_n=7):
    """All connected graphs with 2 <= n <= max_n (max_n <= 7) up to isomorphism."""
    out = []
    for g in nx.graph_atlas_g():
        if 2 <= g.number_of_nodes() <= max_n and g.number_of_edges() and nx.is_connected(g):
            out.append(to_graph(g))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def random_graphs(count=100, seed=2024, max_n=10):
    """Random G(n, p) graphs with n <= max_n and at least one edge."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(2, max_n + 1))
        p = float(rng.uniform(0.15, 0.9))
        g = nx.gnp_random_graph(n, p, seed=int(rng.integers(1 << 31)))
        if g.number_of_edges():
            out.append(to_graph(g))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def graphs8():
    """Every graph on 8 vertices with at least one edge (isolated vertices kept)."""
    pairs = [(u, v) for u in range(8) for v in range(u + 1, 8)]
    out = []
    for line in (DATA / "graphs8.txt").read_text().split():
        mask = int(line)
        if mask:
            out.append(Graph.from_edges(8, [pairs[i] for i in range(len(pairs)) if mask >> i & 1]))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def all_small_graphs(max_n=8):
    """Every graph (connected or not, at least one edge) with n <= max_n."""
    out = [to_graph(g) for g in nx.graph_atlas_g() if 2 <= g.number_of_nodes() <= min(max_n, 7)
           and g.number_of_edges()]
    if max_n >= 8:
        out.extend(graphs8())
    return tuple(out)


@pytest.fixture(params=sorted(FIXTURES))
def named_fixture(request):
    return request.param, make_fixture(request.param)


@pytest.fixture
def fx():
    return make_fixture
