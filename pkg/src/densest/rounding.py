"""Primal recovery from an oracle solution and Charikar's prefix sweep."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import DensityValue, Graph, vertex_loads

__all__ = [
    "PrimalSolution",
    "SlacknessReport",
    "construct_primal",
    "charikar_sweep",
    "primal_objective",
    "verify_complementary_slackness",
]

TIGHT_TOL = 1e-9


@dataclass
class PrimalSolution:
    """Optimal solution ``(x, alpha, W)`` of the LP dual to the per-round oracle LP.

    ``x`` is per vertex, ``alpha`` per incidence (flat ``2*e + slot``), ``tight``
    the vertices whose load equals ``D``.
    """

    x: np.ndarray
    alpha: np.ndarray
    W: float
    tight: np.ndarray

    def objective(self) -> float:
        return float(self.W - self.alpha.sum())


@dataclass
class SlacknessReport:
    ok: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def construct_primal(graph: Graph, p, z, D: float) -> PrimalSolution:
    """Build ``(x, alpha, W)`` from an oracle output ``(D, z)`` on distribution ``p``.

    ``X`` is the set of vertices with load ``D``; ``e(u)`` is the edge of least
    ``p`` among the positive incidences of ``u``, ties resolved to the one last
    in the ``(-p_e, edge id)`` order.  ``W = 1 / sum_{u in X} p_{e(u)}``,
    ``x_u = p_{e(u)} W`` on ``X`` and ``alpha`` takes up the remaining slack of
    each edge constraint.
    """
    p = np.asarray(p, dtype=float)
    z = np.asarray(z, dtype=float)
    load = vertex_loads(graph, z)
    tight = np.abs(load - D) <= TIGHT_TOL * max(1.0, abs(D))
    if not tight.any():
        raise ValueError("no vertex attains the oracle value D")
    p_eu = np.zeros(graph.n)
    for u in np.flatnonzero(tight):
        inc = graph.incidences(u)
        pos = inc[z[inc] > 0]
        if len(pos) == 0:
            raise ValueError(f"tight vertex {u} has no positive incidence")
        edge_ids = pos >> 1
        pe = p[edge_ids]
        least = pe.min()
        # last in (-p, id) order among the minimisers = largest edge id
        p_eu[u] = p[edge_ids[pe == least].max()]
    total = p_eu[tight].sum()
    if total <= 0:
        raise ValueError("tight vertices carry zero weight; W is undefined")
    W = 1.0 / total
    x = np.where(tight, p_eu * W, 0.0)
    endpoint = graph.edges.ravel()
    pw = np.repeat(p, 2) * W
    u_tight = tight[endpoint]
    alpha = np.where(u_tight, np.where(pw >= x[endpoint], pw - x[endpoint], 0.0), pw)
    np.maximum(alpha, 0.0, out=alpha)
    return PrimalSolution(x=x, alpha=alpha, W=W, tight=np.flatnonzero(tight))


def primal_objective(graph: Graph, x) -> float:
    """Charikar LP objective ``sum_e min(x_u, x_v)``."""
    x = np.asarray(x, dtype=float)
    return float(np.minimum(x[graph.edges[:, 0]], x[graph.edges[:, 1]]).sum())


def verify_complementary_slackness(graph: Graph, p, z, D: float, primal: PrimalSolution,
                                   tol: float = 1e-8) -> SlacknessReport:
    """Check primal feasibility and the complementary-slackness conditions of ``(z, D)`` vs ``primal``.

    Conditions: (1) ``sum x = 1``; (2) ``x_u = 0`` wherever the load is slack;
    (3) ``alpha_eu > 0`` only where ``z_eu = 1`` and the edge constraint
    ``p_e W <= x_u + alpha_eu`` is tight wherever ``z_eu > 0``.
    """
    p = np.asarray(p, dtype=float)
    z = np.asarray(z, dtype=float)
    x, alpha, W = primal.x, primal.alpha, primal.W
    out = []
    total = x.sum()
    if abs(total - 1.0) > tol:
        out.append(f"condition 1: sum x = {total!r} != 1")
    if (x < -tol).any() or (alpha < -tol).any():
        out.append("nonnegativity: x or alpha negative")
    load = vertex_loads(graph, z)
    slack = load < D - TIGHT_TOL * max(1.0, abs(D))
    bad = np.flatnonzero(slack & (np.abs(x) > tol))
    if len(bad):
        out.append(f"condition 2: x positive on slack vertices {bad.tolist()}")
    endpoint = graph.edges.ravel()
    pw = np.repeat(p, 2) * W
    cover = x[endpoint] + alpha
    infeasible = np.flatnonzero(pw > cover + tol)
    if len(infeasible):
        out.append(f"feasibility: p_e W exceeds x_u + alpha_eu at incidences {infeasible.tolist()}")
    loose = np.flatnonzero((z > tol) & (np.abs(pw - cover) > tol))
    if len(loose):
        out.append(f"condition 3: edge constraint not tight at positive incidences {loose.tolist()}")
    alpha_bad = np.flatnonzero((alpha > tol) & (z < 1 - tol))
    if len(alpha_bad):
        out.append(f"condition 3: alpha positive below the box bound at incidences {alpha_bad.tolist()}")
    return SlacknessReport(ok=not out, violations=out)


def charikar_sweep(graph: Graph, x) -> tuple[np.ndarray, DensityValue]:
    """Best-density prefix of the vertices sorted by decreasing ``x`` (ties by id).

    Ties between prefixes of equal density go to the longer prefix.  Runs in
    ``O(n log n + m)``.
    """
    x = np.asarray(x, dtype=float)
    n = graph.n
    if n == 0:
        raise ValueError("graph has no vertices")
    order = np.lexsort((np.arange(n), -x))
    position = np.empty(n, dtype=np.int64)
    position[order] = np.arange(n)
    # an edge enters the prefix when its later endpoint does
    entry = np.maximum(position[graph.edges[:, 0]], position[graph.edges[:, 1]])
    edges_in = np.cumsum(np.bincount(entry, minlength=n))
    sizes = np.arange(1, n + 1)
    best = _best_ratio_index(edges_in, sizes, prefer_last=True)
    return np.sort(order[: best + 1]), DensityValue(int(edges_in[best]), int(sizes[best]))


def _best_ratio_index(num: np.ndarray, den: np.ndarray, prefer_last: bool) -> int:
    """Index maximising ``num/den`` exactly (integer cross-multiplication)."""
    vals = num / den
    top = vals.max()
    cand = np.flatnonzero(vals >= top - 1e-9 * max(1.0, top))
    best = int(cand[0])
    for i in cand[1:].tolist():
        lhs = int(num[i]) * int(den[best])
        rhs = int(num[best]) * int(den[i])
        if lhs > rhs or (lhs == rhs and prefer_last):
            best = i
    return best
