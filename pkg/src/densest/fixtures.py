"""Named test graphs and seeded synthetic generators."""

from __future__ import annotations

import re

import numpy as np

from .graph import Graph

__all__ = ["FIXTURES", "make_fixture", "planted_clique", "rmat", "fixture_names"]


def _complete(k: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(k) for b in range(a + 1, k)]


FIXTURES = {
    "edge": (2, [(0, 1)]),
    "triangle": (3, _complete(3)),
    "path3": (3, [(0, 1), (1, 2)]),
    "star3": (4, [(0, 1), (0, 2), (0, 3)]),
    "k4": (4, _complete(4)),
    "tri_plus_edge": (5, _complete(3) + [(3, 4)]),
    "tri_plus_pendant": (4, _complete(3) + [(2, 3)]),
    "k4_plus_pendant": (5, _complete(4) + [(3, 4)]),
}


def planted_clique(n: int, k: int, p: float, seed: int = 0) -> Graph:
    """G(n, p) with a clique planted on ``k`` vertices chosen uniformly at random."""
    if not 0 < k <= n:
        raise ValueError("need 0 < k <= n")
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    iu, iv = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    members = np.sort(rng.choice(n, size=k, replace=False))
    ca, cb = np.triu_indices(k, 1)
    edges = np.concatenate([np.stack([iu[keep], iv[keep]], axis=1),
                            np.stack([members[ca], members[cb]], axis=1)])
    return Graph.from_edges(n, edges)


def rmat(scale: int, m: int | None = None, seed: int = 0, probs=(0.57, 0.19, 0.19, 0.05)) -> Graph:
    """R-MAT graph on ``2**scale`` vertices with exactly ``m`` distinct edges.

    Edges are drawn in batches (self-loops and repeats discarded) until ``m``
    distinct ones have been seen; the first ``m`` in draw order are kept.
    Defaults to ``m = 8 * 2**scale``.
    """
    n = 1 << scale
    if m is None:
        m = 8 * n
    if m > n * (n - 1) // 2:
        raise ValueError("more edges requested than the vertex count allows")
    rng = np.random.default_rng(seed)
    cum = np.cumsum(probs) / np.sum(probs)
    keys = np.empty(0, dtype=np.int64)
    while True:
        batch = max(1024, int(1.2 * (m - len(keys))) + 1024)
        q = np.searchsorted(cum, rng.random((batch, scale)), side="right")
        bits = 1 << np.arange(scale - 1, -1, -1, dtype=np.int64)
        u = ((q >> 1) & 1) @ bits
        v = (q & 1) @ bits
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        ok = lo != hi
        keys = np.concatenate([keys, lo[ok] * n + hi[ok]])
        uniq, first = np.unique(keys, return_index=True)
        if len(uniq) >= m:
            keys = keys[np.sort(first)[:m]]
            break
        keys = keys[np.sort(first)]
    return Graph.from_edges(n, np.stack([keys // n, keys % n], axis=1))


_CALL = re.compile(r"^\s*([a-z_0-9]+)\s*(?:\((.*)\))?\s*$")


def _number(tok: str):
    tok = tok.strip()
    try:
        return int(tok)
    except ValueError:
        return float(tok)


def fixture_names() -> list[str]:
    return sorted(FIXTURES) + ["planted_clique(n,k,p,seed)", "rmat(scale,seed)", "rmat(scale,m,seed)"]


def make_fixture(name: str) -> Graph:
    """Build a catalogue graph, e.g. ``"k4"``, ``"planted_clique(100,20,0.05,7)"`` or ``"rmat(17,1000000,1)"``."""
    match = _CALL.match(name)
    if not match:
        raise ValueError(f"unknown fixture {name!r}")
    key, args = match.group(1), match.group(2)
    params = [_number(a) for a in args.split(",")] if args else []
    if key in FIXTURES and not params:
        n, edges = FIXTURES[key]
        return Graph.from_edges(n, edges)
    if key == "planted_clique" and len(params) in (3, 4):
        return planted_clique(*params)
    if key == "rmat" and len(params) == 2:
        return rmat(params[0], seed=params[1])
    if key == "rmat" and len(params) == 3:
        return rmat(params[0], m=params[1], seed=params[2])
    raise ValueError(f"unknown fixture {name!r}; known: {', '.join(fixture_names())}")
