"""Greedy peeling and Greedy++ (load-carrying repeated peeling)."""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .graph import DensityValue, Graph
from .rounding import _best_ratio_index

__all__ = ["PeelTrace", "greedy_peel", "greedy_pp", "GreedyPPResult"]


@numba.njit(cache=True)
def _sift_down(keys, ids, size, pos):
    while True:
        left = 2 * pos + 1
        if left >= size:
            return
        child = left
        right = left + 1
        if right < size and (keys[right] < keys[left] or (keys[right] == keys[left] and ids[right] < ids[left])):
            child = right
        if keys[child] < keys[pos] or (keys[child] == keys[pos] and ids[child] < ids[pos]):
            keys[child], keys[pos] = keys[pos], keys[child]
            ids[child], ids[pos] = ids[pos], ids[child]
            pos = child
        else:
            return


@numba.njit(cache=True)
def _sift_up(keys, ids, pos):
    while pos > 0:
        parent = (pos - 1) // 2
        if keys[pos] < keys[parent] or (keys[pos] == keys[parent] and ids[pos] < ids[parent]):
            keys[pos], keys[parent] = keys[parent], keys[pos]
            ids[pos], ids[parent] = ids[parent], ids[pos]
            pos = parent
        else:
            return


@numba.njit(cache=True)
def _peel(n, endpoints, indptr, inc_flat, load):
    """Min-key peeling with key = load + current degree; lazy-deletion binary heap.

    Returns removal order, degree at removal and the edge count of every suffix.
    """
    deg = np.empty(n, dtype=np.int64)
    for u in range(n):
        deg[u] = indptr[u + 1] - indptr[u]
    cap = n + inc_flat.shape[0] + 1
    keys = np.empty(cap)
    ids = np.empty(cap, dtype=np.int64)
    size = 0
    for u in range(n):
        keys[size] = load[u] + deg[u]
        ids[size] = u
        _sift_up(keys, ids, size)
        size += 1
    removed = np.zeros(n, dtype=np.bool_)
    order = np.empty(n, dtype=np.int64)
    deg_at_removal = np.empty(n, dtype=np.int64)
    suffix_edges = np.empty(n, dtype=np.int64)
    edges_left = inc_flat.shape[0] // 2
    k = 0
    while k < n:
        key = keys[0]
        u = ids[0]
        size -= 1
        keys[0] = keys[size]
        ids[0] = ids[size]
        _sift_down(keys, ids, size, 0)
        if removed[u] or key != load[u] + deg[u]:
            continue
        suffix_edges[k] = edges_left
        order[k] = u
        deg_at_removal[k] = deg[u]
        removed[u] = True
        edges_left -= deg[u]
        for j in range(indptr[u], indptr[u + 1]):
            v = endpoints[inc_flat[j] ^ 1]
            if not removed[v]:
                deg[v] -= 1
                keys[size] = load[v] + deg[v]
                ids[size] = v
                _sift_up(keys, ids, size)
                size += 1
        k += 1
    return order, deg_at_removal, suffix_edges


@dataclass
class PeelTrace:
    """Removal order, per-suffix edge counts and the best suffix found.

    Suffix ``i`` is the vertex set remaining before the ``i``-th removal, of
    size ``n - i`` with ``suffix_edges[i]`` edges.
    """

    order: np.ndarray
    degree_at_removal: np.ndarray
    suffix_edges: np.ndarray
    best_index: int

    @property
    def suffix_sizes(self) -> np.ndarray:
        return np.arange(len(self.order), 0, -1)

    @property
    def suffix_densities(self) -> np.ndarray:
        return self.suffix_edges / self.suffix_sizes

    @property
    def best_set(self) -> np.ndarray:
        return np.sort(self.order[self.best_index:])

    @property
    def best_density(self) -> DensityValue:
        i = self.best_index
        return DensityValue(int(self.suffix_edges[i]), len(self.order) - i)


def greedy_peel(graph: Graph, loads=None) -> PeelTrace:
    """Repeatedly remove the vertex minimising ``load + current degree`` (ties by id).

    Without ``loads`` this is the classical 1/2-approximate peel.  The best
    suffix is chosen by exact density, ties toward the larger suffix.
    """
    if graph.n == 0:
        raise ValueError("graph has no vertices")
    load = np.zeros(graph.n) if loads is None else np.ascontiguousarray(loads, dtype=float)
    if load.shape != (graph.n,):
        raise ValueError("loads must have one entry per vertex")
    order, deg_rm, suffix_edges = _peel(graph.n, graph.edges.ravel(), graph.indptr, graph.inc_flat, load)
    sizes = np.arange(graph.n, 0, -1)
    best = _best_ratio_index(suffix_edges, sizes, prefer_last=False)
    return PeelTrace(order, deg_rm, suffix_edges, best)


@dataclass
class GreedyPPResult:
    vertices: np.ndarray
    density: DensityValue
    history: list  # best DensityValue after each pass
    loads: np.ndarray


def greedy_pp(graph: Graph, iterations: int, callback=None) -> GreedyPPResult:
    """Greedy++: peel ``iterations`` times, adding each vertex's degree at removal to its load.

    ``callback(t, trace, best)`` runs after every pass.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    load = np.zeros(graph.n)
    best_set, best = None, None
    history = []
    for t in range(iterations):
        trace = greedy_peel(graph, load)
        load[trace.order] += trace.degree_at_removal
        cand = trace.best_density
        if best is None or cand > best:
            best, best_set = cand, trace.best_set
        history.append(best)
        if callback is not None:
            callback(t, trace, best)
    return GreedyPPResult(best_set, best, history, load)
