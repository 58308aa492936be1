"""Multiplicative weights over the width-reduced dual LP (box ``0 <= z <= 1``).

Each round solves, for the current edge distribution ``p``,

    min_{z in [0,1]^{2m}} max_u sum_{e ni u} z_eu   s.t.  sum_e p_e (z_eu + z_ev) = 1

exactly with a per-vertex greedy packing, then reweights edges by the softmax
of their cumulative constraint slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .graph import Graph

__all__ = ["smax", "smax_gradient", "solve_weighted_lp", "mwu_iterations", "mwu_solve", "MwuRun"]

R_TOL = 1e-12


def smax(eta: float, x) -> float:
    """Log-sum-exp soft maximum ``(1/eta) ln sum_i exp(eta x_i)``."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("smax of an empty vector")
    top = x.max()
    return float(top + np.log(np.exp(eta * (x - top)).sum()) / eta)


def smax_gradient(eta: float, x) -> np.ndarray:
    """Gradient of :func:`smax`, the softmax distribution of ``eta * x``."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("smax of an empty vector")
    w = np.exp(eta * (x - x.max()))
    return w / w.sum()


@numba.njit(cache=True)
def _incidence_ranks(indptr, inc_flat, p):
    # rank of each incidence in its vertex's order by (-p_e, edge id)
    rank = np.empty(inc_flat.shape[0], dtype=np.int64)
    for u in range(indptr.shape[0] - 1):
        lo = indptr[u]
        d = indptr[u + 1] - lo
        if d == 0:
            continue
        keys = np.empty(d)
        for i in range(d):
            keys[i] = -p[inc_flat[lo + i] >> 1]
        order = np.argsort(keys, kind="mergesort")
        for j in range(d):
            rank[inc_flat[lo + order[j]]] = j
    return rank


@numba.njit(cache=True)
def _weighted_lp(indptr, inc_flat, p, z):
    n2 = inc_flat.shape[0]
    maxdeg = 0
    for u in range(indptr.shape[0] - 1):
        maxdeg = max(maxdeg, indptr[u + 1] - indptr[u])
    rank = _incidence_ranks(indptr, inc_flat, p)
    # layer[j]: total weight of incidences sitting at position j of their vertex order
    layer = np.zeros(maxdeg + 1)
    for i in range(n2):
        layer[rank[i]] += p[i >> 1]
    full = 0.0
    k = -1
    r = 0.0
    for j in range(maxdeg):
        if layer[j] > 0.0 and full <= 1.0 + R_TOL and full + layer[j] > 1.0:
            k = j
            r = (1.0 - full) / layer[j]
            break
        full += layer[j]
    if k < 0:
        # floating-point exhaustion: every incidence is full
        k = maxdeg
        r = 0.0
    r = min(max(r, 0.0), 1.0)
    for i in range(n2):
        if rank[i] < k:
            z[i] = 1.0
        elif rank[i] == k:
            z[i] = r
        else:
            z[i] = 0.0
    return k + r


def solve_weighted_lp(graph: Graph, p) -> tuple[float, np.ndarray]:
    """Exact solution ``(D, z)`` of the per-round LP for edge distribution ``p``.

    For every vertex the incident edges are ordered by decreasing ``p_e`` (ties
    by edge id); the first ``floor(D)`` get ``z = 1``, the next gets the
    fractional remainder ``R`` and the rest 0.  ``floor(D)`` is the smallest
    integer for which the equality ``sum p_e (z_eu + z_ev) = 1`` admits
    ``0 <= R < 1``.
    """
    p = np.ascontiguousarray(p, dtype=float)
    if p.shape != (graph.m,):
        raise ValueError("p must have one weight per edge")
    z = np.empty(2 * graph.m)
    D = _weighted_lp(graph.indptr, graph.inc_flat, p, z)
    return float(D), z


@dataclass
class MwuRun:
    """Result of :func:`mwu_solve`.

    ``zbar`` is the average of the per-round orientations; ``tau`` indexes the
    round (0-based) with the largest oracle value ``D_tau`` and ``p_tau``,
    ``z_tau`` are that round's distribution and orientation.
    """

    zbar: np.ndarray
    D_history: np.ndarray
    tau: int
    D_tau: float
    p_tau: np.ndarray
    z_tau: np.ndarray
    eps: float
    T: int
    iterates: list = field(default_factory=list)


def mwu_iterations(m: int, eps: float) -> int:
    """Round count ``ceil(2 ln m / eps^2)``, at least 1."""
    return max(1, math.ceil(2.0 * math.log(m) / eps**2)) if m > 1 else 1


def mwu_solve(graph: Graph, eps: float, T: int | None = None, keep_iterates: bool = False,
              callback=None) -> MwuRun:
    """Run multiplicative weights with ``eta = eps`` for ``ceil(2 ln m / eps^2)`` rounds.

    ``callback(t, D_t, p_t, z_t)`` is invoked after every round if given.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    m = graph.m
    if m == 0:
        raise ValueError("graph has no edges")
    if T is None:
        T = mwu_iterations(m, eps)
    eta = eps
    indptr, inc_flat = graph.indptr, graph.inc_flat
    p = np.full(m, 1.0 / m)
    G = np.zeros(m)
    z = np.empty(2 * m)
    zsum = np.zeros(2 * m)
    D_hist = np.empty(T)
    best = (-1.0, -1, None, None)
    iterates = []
    for t in range(T):
        D = _weighted_lp(indptr, inc_flat, p, z)
        D_hist[t] = D
        if D > best[0]:
            best = (D, t, p.copy(), z.copy())
        if keep_iterates:
            iterates.append((p.copy(), z.copy(), D))
        if callback is not None:
            callback(t, D, p, z)
        zsum += z
        G += 1.0 - (z[0::2] + z[1::2])
        p = smax_gradient(eta, G)
    return MwuRun(
        zbar=zsum / T,
        D_history=D_hist,
        tau=best[1],
        D_tau=best[0],
        p_tau=best[2],
        z_tau=best[3],
        eps=eps,
        T=T,
        iterates=iterates,
    )
