"""Undirected simple graphs, edge-list I/O, exact densities and brute-force oracles."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

__all__ = [
    "Graph",
    "DensityValue",
    "Decomposition",
    "EdgeListError",
    "parse_edge_list",
    "read_edge_list",
    "write_edge_list",
    "density",
    "vertex_loads",
    "brute_force_densest",
    "brute_force_decomposition",
]

MAX_BRUTE_FORCE_DENSEST = 24
MAX_BRUTE_FORCE_DECOMPOSITION = 20


class EdgeListError(ValueError):
    """Raised for malformed or empty edge-list input."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph stored as a sorted edge array plus CSR incidence.

    ``edges[e] = (u, v)`` with ``u < v``.  A per-incidence quantity such as a
    fractional orientation ``z`` is a flat array of length ``2m`` where index
    ``2*e + slot`` refers to endpoint ``edges[e, slot]``.  The incidence list of
    vertex ``u`` is ``inc_flat[indptr[u]:indptr[u+1]]``, in increasing edge id.
    """

    n: int
    edges: np.ndarray
    indptr: np.ndarray
    inc_flat: np.ndarray
    labels: np.ndarray | None = None

    @classmethod
    def from_edges(cls, n: int, edges, labels=None) -> "Graph":
        """Build a graph on ``n`` vertices; self-loops and duplicates are dropped."""
        arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError("edge endpoint out of range [0, n)")
        arr = arr[arr[:, 0] != arr[:, 1]]
        arr = np.sort(arr, axis=1)
        if len(arr):
            arr = np.unique(arr, axis=0)
        arr = np.ascontiguousarray(arr, dtype=np.int64)
        flat_endpoints = arr.ravel()
        inc_flat = np.argsort(flat_endpoints, kind="stable").astype(np.int64)
        counts = np.bincount(flat_endpoints, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        if labels is not None:
            labels = np.asarray(labels, dtype=np.int64)
        for a in (arr, indptr, inc_flat):
            a.setflags(write=False)
        return cls(int(n), arr, indptr, inc_flat, labels)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def max_degree(self) -> int:
        return int(self.degree.max()) if self.n else 0

    @property
    def endpoints(self) -> np.ndarray:
        """Vertex of each incidence, i.e. ``edges.ravel()``."""
        return self.edges.ravel()

    def incidences(self, u: int) -> np.ndarray:
        return self.inc_flat[self.indptr[u]:self.indptr[u + 1]]

    def neighbors(self, u: int) -> np.ndarray:
        inc = self.incidences(u)
        return self.edges.ravel()[inc ^ 1]

    def adjacency_masks(self) -> list[int]:
        """Bitmask of neighbours for every vertex (small graphs only)."""
        masks = [0] * self.n
        for u, v in self.edges.tolist():
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return masks

    def original_ids(self, vertices) -> list[int]:
        vertices = np.asarray(vertices, dtype=np.int64)
        if self.labels is None:
            return vertices.tolist()
        return self.labels[vertices].tolist()

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class DensityValue:
    """Exact density ``edges / size`` of a vertex set."""

    edges: int
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("density is undefined for an empty set")

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.edges, self.size)

    @property
    def value(self) -> float:
        return self.edges / self.size

    def __float__(self) -> float:
        return self.value

    def _cmp(self, other) -> Fraction:
        if isinstance(other, DensityValue):
            other = other.fraction
        return self.fraction - Fraction(other)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __str__(self) -> str:
        return f"{self.edges}/{self.size}"


@dataclass
class Decomposition:
    """Ordered partition of the vertex set into blocks with their block values.

    The value of block ``T_j`` is ``(|E(T_j)| + |E(T_j, T_1 u ... u T_{j-1})|) / |T_j|``,
    stored exactly as a :class:`DensityValue`.
    """

    blocks: list[np.ndarray]
    densities: list[DensityValue]
    loads: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.blocks)

    def block_sets(self) -> list[frozenset]:
        return [frozenset(b.tolist()) for b in self.blocks]

    def to_dict(self, graph: Graph | None = None) -> dict:
        blocks = []
        for verts, dens in zip(self.blocks, self.densities):
            ids = graph.original_ids(verts) if graph is not None else verts.tolist()
            blocks.append({
                "vertices": ids,
                "size": dens.size,
                "edges": dens.edges,
                "density": dens.value,
            })
        return {"blocks": blocks, **self.meta}


def _to_text(source) -> Iterable[str]:
    if isinstance(source, bytes):
        return io.StringIO(source.decode())
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def parse_edge_list(source) -> Graph:
    """Parse a SNAP-style edge list.

    Lines starting with ``#`` or ``%`` are comments; every other non-blank line
    must start with two nonnegative integer tokens (extra columns are ignored).
    Vertex ids are relabelled to ``0..n-1`` in increasing original id; the
    original ids are kept in ``Graph.labels``.
    """
    pairs: list[tuple[int, int]] = []
    for lineno, raw in enumerate(_to_text(source), start=1):
        if isinstance(raw, bytes):
            raw = raw.decode()
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        tokens = line.split()
        if len(tokens) < 2:
            raise EdgeListError(f"line {lineno}: expected two vertex ids, got {line!r}")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise EdgeListError(f"line {lineno}: malformed vertex id in {line!r}") from None
        if u < 0 or v < 0:
            raise EdgeListError(f"line {lineno}: negative vertex id in {line!r}")
        if u != v:
            pairs.append((u, v))
    if not pairs:
        raise EdgeListError("edge list contains no edges")
    raw_edges = np.array(pairs, dtype=np.int64)
    labels, relabelled = np.unique(raw_edges, return_inverse=True)
    return Graph.from_edges(len(labels), relabelled.reshape(-1, 2), labels=labels)


def read_edge_list(path) -> Graph:
    with open(path, "r") as fh:
        return parse_edge_list(fh)


def write_edge_list(graph: Graph, fh) -> None:
    ids = graph.labels if graph.labels is not None else np.arange(graph.n)
    for u, v in graph.edges:
        fh.write(f"{ids[u]} {ids[v]}\n")


def _as_mask(graph: Graph, s) -> np.ndarray:
    s = np.asarray(s)
    if s.dtype == bool:
        if s.shape != (graph.n,):
            raise ValueError("boolean vertex mask has the wrong length")
        return s
    mask = np.zeros(graph.n, dtype=bool)
    mask[s.astype(np.int64)] = True
    return mask


def density(graph: Graph, s) -> DensityValue:
    """Exact density ``|E(S)|/|S|`` of ``S`` (vertex ids or a boolean mask)."""
    mask = _as_mask(graph, s)
    size = int(mask.sum())
    if size == 0:
        raise ValueError("density of the empty set is undefined")
    inside = mask[graph.edges[:, 0]] & mask[graph.edges[:, 1]]
    return DensityValue(int(inside.sum()), size)


def vertex_loads(graph: Graph, z) -> np.ndarray:
    """Per-vertex load ``b_u = sum_{e ni u} z_eu`` of a per-incidence vector."""
    return np.bincount(graph.edges.ravel(), weights=np.asarray(z, dtype=float), minlength=graph.n)


def _subset_edge_counts(graph: Graph) -> np.ndarray:
    """|E(S)| for every subset S encoded as a bitmask over vertices."""
    adj = graph.adjacency_masks()
    counts = np.zeros(1, dtype=np.int32)
    for k in range(graph.n):
        lower = np.arange(1 << k, dtype=np.int64)
        gained = np.bitwise_count(lower & (adj[k] & ((1 << k) - 1))).astype(np.int32)
        counts = np.concatenate([counts, counts + gained])
    return counts


def _mask_to_vertices(mask: int) -> np.ndarray:
    return np.array([i for i in range(mask.bit_length()) if mask >> i & 1], dtype=np.int64)


def brute_force_densest(graph: Graph) -> tuple[np.ndarray, DensityValue]:
    """Exact densest subgraph by enumerating all ``2^n - 1`` nonempty subsets.

    Ties prefer the larger set, then the lexicographically smallest vertex list.
    """
    if graph.n > MAX_BRUTE_FORCE_DENSEST:
        raise ValueError(f"brute force refused for n={graph.n} > {MAX_BRUTE_FORCE_DENSEST}")
    if graph.n == 0:
        raise ValueError("graph has no vertices")
    counts = _subset_edge_counts(graph)
    masks = np.arange(1, 1 << graph.n, dtype=np.int64)
    sizes = np.bitwise_count(masks)
    edge_counts = counts[1:]
    dens = edge_counts / sizes
    # distinct densities with denominators <= 24 differ by > 1e-3
    best = dens.max()
    cand = np.flatnonzero(dens >= best - 1e-9)
    top = sizes[cand].max()
    cand = cand[sizes[cand] == top]
    chosen = min((_mask_to_vertices(int(masks[i])).tolist() for i in cand))
    chosen = np.array(chosen, dtype=np.int64)
    return chosen, density(graph, chosen)


def brute_force_decomposition(graph: Graph) -> Decomposition:
    """Exact dense decomposition by recursive enumeration of maximal densest extensions.

    Block ``S_i`` is the maximal set maximising
    ``(|E(U u S)| - |E(U)|) / |S|`` with ``U = S_1 u ... u S_{i-1}``; every
    vertex of ``S_i`` receives that value as its optimal load ``b*``.
    """
    n = graph.n
    if n > MAX_BRUTE_FORCE_DECOMPOSITION:
        raise ValueError(f"brute force refused for n={n} > {MAX_BRUTE_FORCE_DECOMPOSITION}")
    counts = _subset_edge_counts(graph).astype(np.int64)
    masks = np.arange(1 << n, dtype=np.int64)
    sizes = np.bitwise_count(masks).astype(np.int64)
    full = (1 << n) - 1
    used = 0
    blocks, dens, loads = [], [], np.zeros(n)
    while used != full:
        free = masks[((masks & used) == 0) & (masks != 0)]
        gain = counts[free | used] - counts[used]
        vals = gain / sizes[free]
        best = vals.max()
        maximizers = free[vals >= best - 1e-9]
        block = int(np.bitwise_or.reduce(maximizers))
        block_gain = int(counts[block | used] - counts[used])
        block_size = int(sizes[block])
        first = int(maximizers[0])
        # the union of maximisers is itself a maximiser (supermodularity)
        assert Fraction(block_gain, block_size) == Fraction(
            int(counts[first | used] - counts[used]), int(sizes[first]))
        verts = _mask_to_vertices(block)
        blocks.append(verts)
        dens.append(DensityValue(block_gain, block_size))
        loads[verts] = block_gain / block_size
        used |= block
    return Decomposition(blocks, dens, loads=loads, meta={"algorithm": "brute_force"})

