"""Coordinate descent on the load quadratic and fractional peeling.

The decomposition QP is ``min sum_u b_u^2`` over orientations whose every edge
pair ``(z_eu, z_ev)`` lies on the segment ``z_eu + z_ev = 1, z in [0,1]^2``;
``b_u = sum_{e ni u} z_eu``.  Its unique optimal load vector ``b*`` determines
the dense decomposition.  Orientations are flat length-``2m`` arrays as in
:mod:`densest.graph`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .baselines import _sift_down, _sift_up
from .graph import Decomposition, DensityValue, Graph, vertex_loads

__all__ = [
    "project_block",
    "coordinate_update",
    "loads",
    "objective",
    "block_gradient",
    "initial_orientation",
    "CoordinateResult",
    "rcdm",
    "acdm",
    "acdm_practical",
    "default_inner_steps",
    "fractional_peel",
]


@numba.njit(cache=True, inline="always")
def _proj(a, c):
    d = a - c
    if d > 1.0:
        return 1.0, 0.0
    if d < -1.0:
        return 0.0, 1.0
    return (d + 1.0) / 2.0, (1.0 - d) / 2.0


@numba.njit(cache=True, inline="always")
def _next_theta(t):
    t2 = t * t
    return (math.sqrt(t2 * t2 + 4.0 * t2) - t2) / 2.0


def project_block(pair) -> tuple[float, float]:
    """Euclidean projection of ``(s_u, s_v)`` onto ``{s_u + s_v = 1, s in [0,1]^2}``."""
    a, c = float(pair[0]), float(pair[1])
    return _proj(a, c)


def coordinate_update(anchor, step_weight: float, grad) -> tuple[float, float]:
    """Minimise ``<grad, s> + step_weight ||s - anchor||^2`` over the edge segment."""
    if step_weight <= 0:
        raise ValueError("step_weight must be positive")
    return project_block((anchor[0] - grad[0] / (2.0 * step_weight),
                          anchor[1] - grad[1] / (2.0 * step_weight)))


def loads(graph: Graph, z) -> np.ndarray:
    return vertex_loads(graph, z)


def objective(graph: Graph, z) -> float:
    b = vertex_loads(graph, z)
    return float(b @ b)


def block_gradient(graph: Graph, z, e: int) -> np.ndarray:
    """Partial gradient ``(2 b_u, 2 b_v)`` of the objective with respect to edge ``e``'s pair."""
    b = vertex_loads(graph, z)
    u, v = graph.edges[e]
    return np.array([2.0 * b[u], 2.0 * b[v]])


def initial_orientation(graph: Graph, init: str = "uniform") -> np.ndarray:
    """Starting point: ``uniform`` halves every edge; ``greedy`` gives each edge
    wholly to whichever endpoint the greedy peel removes first."""
    if init == "uniform":
        return np.full(2 * graph.m, 0.5)
    if init == "greedy":
        from .baselines import greedy_peel

        pos = np.empty(graph.n, dtype=np.int64)
        pos[greedy_peel(graph).order] = np.arange(graph.n)
        first = pos[graph.edges[:, 0]] < pos[graph.edges[:, 1]]
        z = np.empty(2 * graph.m)
        z[0::2] = first
        z[1::2] = ~first
        return z
    raise ValueError(f"unknown init {init!r}")


def _check_point(graph: Graph, z) -> np.ndarray:
    z = np.array(z, dtype=float)
    if z.shape != (2 * graph.m,):
        raise ValueError("orientation must have length 2m")
    if np.abs(z[0::2] + z[1::2] - 1.0).max(initial=0.0) > 1e-9 or z.min(initial=0.0) < -1e-12 or z.max(initial=0.0) > 1 + 1e-12:
        raise ValueError("orientation is not a point of the edge segments")
    return z


def _pass_seeds(seed: int, count: int) -> np.ndarray:
    return np.random.SeedSequence(seed).generate_state(count).astype(np.int64)


@dataclass
class CoordinateResult:
    """Final orientation ``z`` with its loads, the objective after every pass
    (or epoch) and the total number of single-edge updates."""

    z: np.ndarray
    b: np.ndarray
    f_history: np.ndarray
    updates: int
    meta: dict = field(default_factory=dict)

    @property
    def f(self) -> float:
        return float(self.b @ self.b)


# --------------------------------------------------------------------------- RCDM

@numba.njit(cache=True)
def _rcdm_passes(endpoints, z, b, seeds, permutation, f_hist, deltas):
    m = z.shape[0] // 2
    k = 0
    for p in range(seeds.shape[0]):
        np.random.seed(seeds[p])
        if permutation:
            order = np.random.permutation(m)
        else:
            order = np.random.randint(0, m, m)
        for j in range(m):
            e = order[j]
            u = endpoints[2 * e]
            v = endpoints[2 * e + 1]
            bu = b[u]
            bv = b[v]
            nu, nv = _proj(z[2 * e] - bu, z[2 * e + 1] - bv)
            du = nu - z[2 * e]
            dv = nv - z[2 * e + 1]
            z[2 * e] = nu
            z[2 * e + 1] = nv
            b[u] = bu + du
            b[v] = bv + dv
            if deltas.shape[0] > 0:
                deltas[k] = (b[u] * b[u] + b[v] * b[v]) - (bu * bu + bv * bv)
            k += 1
        f = 0.0
        for i in range(b.shape[0]):
            f += b[i] * b[i]
        f_hist[p] = f


def rcdm(graph: Graph, passes: int, mode: str = "permutation", seed: int = 0, z0=None,
         init: str = "uniform", callback=None, record_deltas: bool = False) -> CoordinateResult:
    """Random coordinate descent with exact block minimisation.

    Each pass performs ``m`` updates ``z_e <- proj(z_e - (b_u, b_v))`` over a
    random permutation (``mode="permutation"``) or ``m`` edges drawn with
    replacement (``mode="sampled"``).  Loads are maintained incrementally.
    ``callback(pass_index, z, b, f)`` runs after every pass; a true return
    value stops the run.  With
    ``record_deltas`` the change of ``f`` caused by every single update is kept
    in ``meta["deltas"]``.
    """
    if passes < 1:
        raise ValueError("passes must be at least 1")
    if mode not in ("permutation", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    z = initial_orientation(graph, init) if z0 is None else _check_point(graph, z0)
    b = vertex_loads(graph, z)
    endpoints = graph.edges.ravel()
    seeds = _pass_seeds(seed, passes)
    f_hist = np.empty(passes)
    deltas = np.empty(passes * graph.m if record_deltas else 0)
    perm = mode == "permutation"
    if callback is None:
        _rcdm_passes(endpoints, z, b, seeds, perm, f_hist, deltas)
    else:
        for p in range(passes):
            d = deltas[p * graph.m:(p + 1) * graph.m] if record_deltas else deltas
            _rcdm_passes(endpoints, z, b, seeds[p:p + 1], perm, f_hist[p:p + 1], d)
            if callback(p, z, b, f_hist[p]):
                f_hist = f_hist[:p + 1]
                break
    meta = {"algorithm": "rcdm", "mode": mode, "seed": seed, "passes": passes, "init": init}
    if record_deltas:
        meta["deltas"] = deltas
    return CoordinateResult(z, b, f_hist, len(f_hist) * graph.m, meta)


# --------------------------------------------------------------------------- ACDM (sampled reference)

@numba.njit(cache=True)
def _acdm_epoch(endpoints, n, z, T, seed):
    """One epoch of the sampled accelerated method; overwrites ``z``; returns the update count."""
    m = z.shape[0] // 2
    np.random.seed(seed)
    y = z.copy()
    w = np.zeros(2 * m)
    By = np.zeros(n)
    Bw = np.zeros(n)
    for i in range(2 * m):
        By[endpoints[i]] += y[i]
    theta = 1.0 / m
    theta_last = theta
    picked = np.empty(m, dtype=np.int64)
    gu = np.empty(m)
    gv = np.empty(m)
    updates = 0
    for t in range(T):
        cnt = np.random.binomial(m, 1.0 / m)
        # a uniformly random subset of that size: equivalent to independent inclusion
        k = 0
        while k < cnt:
            e = np.random.randint(0, m)
            dup = False
            for j in range(k):
                if picked[j] == e:
                    dup = True
                    break
            if not dup:
                picked[k] = e
                k += 1
        t2 = theta * theta
        for j in range(cnt):
            e = picked[j]
            gu[j] = 2.0 * (t2 * Bw[endpoints[2 * e]] + By[endpoints[2 * e]])
            gv[j] = 2.0 * (t2 * Bw[endpoints[2 * e + 1]] + By[endpoints[2 * e + 1]])
        step = 4.0 * m * theta
        coef = (1.0 - m * theta) / t2
        for j in range(cnt):
            e = picked[j]
            u = endpoints[2 * e]
            v = endpoints[2 * e + 1]
            nu, nv = _proj(y[2 * e] - gu[j] / step, y[2 * e + 1] - gv[j] / step)
            du = nu - y[2 * e]
            dv = nv - y[2 * e + 1]
            y[2 * e] = nu
            y[2 * e + 1] = nv
            By[u] += du
            By[v] += dv
            w[2 * e] -= coef * du
            w[2 * e + 1] -= coef * dv
            Bw[u] -= coef * du
            Bw[v] -= coef * dv
        updates += cnt
        theta_last = theta
        theta = _next_theta(theta)
    t2 = theta_last * theta_last
    for i in range(2 * m):
        z[i] = t2 * w[i] + y[i]
    return updates


def default_inner_steps(graph: Graph, factor: float = 12.0) -> int:
    """Inner step count ``factor * m * n`` of an epoch of :func:`acdm`."""
    return max(1, int(math.ceil(factor * graph.m * graph.n)))


def acdm(graph: Graph, K: int, T: int | None = None, seed: int = 0, z0=None, init: str = "uniform",
         callback=None) -> CoordinateResult:
    """Accelerated random coordinate descent with epoch restarts.

    Every epoch restarts from the previous output with ``theta = 1/m`` and
    ``w = 0`` and runs ``T`` steps; a step updates each edge independently with
    probability ``1/m``, all gradients taken at the pre-step point.  The epoch
    output is ``theta_{T-1}^2 w + y``.  ``callback(epoch, z, b, f)`` runs after
    every epoch and stops the run by returning true; ``f_history`` holds ``f``
    per epoch.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    if T is None:
        T = default_inner_steps(graph)
    if T < 1:
        raise ValueError("T must be at least 1")
    z = initial_orientation(graph, init) if z0 is None else _check_point(graph, z0)
    endpoints = graph.edges.ravel()
    seeds = _pass_seeds(seed, K)
    f_hist = np.empty(K)
    updates = 0
    for k in range(K):
        updates += _acdm_epoch(endpoints, graph.n, z, int(T), seeds[k])
        b = vertex_loads(graph, z)
        f_hist[k] = b @ b
        if callback is not None and callback(k, z, b, f_hist[k]):
            f_hist = f_hist[:k + 1]
            break
    b = vertex_loads(graph, z)
    meta = {"algorithm": "acdm-ref", "seed": seed, "K": K, "T": int(T), "init": init}
    return CoordinateResult(z, b, f_hist, int(updates), meta)


# --------------------------------------------------------------------------- ACDM (practical, restarted)

@numba.njit(cache=True)
def _acdm_practical_passes(endpoints, n, y, w, st, seeds, per_update, current_theta, f_hist):
    """Passes of the restarted permutation variant.

    ``st`` holds ``[theta, theta_prev, f, f_last]`` and is updated in place.
    """
    m = y.shape[0] // 2
    theta, theta_prev, f, f_last = st[0], st[1], st[2], st[3]
    By = np.zeros(n)
    Bw = np.zeros(n)
    for p in range(seeds.shape[0]):
        np.random.seed(seeds[p])
        if f > f_last:
            # restart from the current point
            t2 = theta * theta
            for i in range(2 * m):
                y[i] = t2 * w[i] + y[i]
                w[i] = 0.0
            theta = 1.0 / m
            theta_prev = theta
        else:
            theta_prev = theta
            theta = _next_theta(theta)
        By[:] = 0.0
        Bw[:] = 0.0
        for i in range(2 * m):
            By[endpoints[i]] += y[i]
            Bw[endpoints[i]] += w[i]
        order = np.random.permutation(m)
        for j in range(m):
            e = order[j]
            u = endpoints[2 * e]
            v = endpoints[2 * e + 1]
            t2 = theta * theta
            bu = t2 * Bw[u] + By[u]
            bv = t2 * Bw[v] + By[v]
            step = 4.0 * m * theta
            nu, nv = _proj(y[2 * e] - 2.0 * bu / step, y[2 * e + 1] - 2.0 * bv / step)
            du = nu - y[2 * e]
            dv = nv - y[2 * e + 1]
            y[2 * e] = nu
            y[2 * e + 1] = nv
            By[u] += du
            By[v] += dv
            tw = theta if current_theta else theta_prev
            coef = (1.0 - m * tw) / (tw * tw)
            w[2 * e] -= coef * du
            w[2 * e + 1] -= coef * dv
            Bw[u] -= coef * du
            Bw[v] -= coef * dv
            if per_update:
                theta_prev = theta
                theta = _next_theta(theta)
        f_last = f
        # recompute loads from scratch at the end of the pass
        By[:] = 0.0
        Bw[:] = 0.0
        for i in range(2 * m):
            By[endpoints[i]] += y[i]
            Bw[endpoints[i]] += w[i]
        t2 = theta * theta
        f = 0.0
        for u in range(n):
            bu = t2 * Bw[u] + By[u]
            f += bu * bu
        f_hist[p] = f
    st[0], st[1], st[2], st[3] = theta, theta_prev, f, f_last


def acdm_practical(graph: Graph, passes: int, seed: int = 0, z0=None, init: str = "uniform",
                   theta_schedule: str = "pass", w_theta: str = "previous", callback=None) -> CoordinateResult:
    """Accelerated coordinate descent over random edge permutations, restarted on increase.

    One pass sweeps all edges in a fresh random order.  Before a pass the
    momentum state is reset (``y`` = current point, ``w = 0``, ``theta = 1/m``)
    if the objective rose during the previous pass, otherwise ``theta`` advances
    once.  ``theta_schedule="update"`` advances ``theta`` after every edge
    instead.  ``w_theta`` selects whether the momentum coefficient uses the
    previous (``"previous"``) or current (``"current"``) ``theta``.
    ``callback(pass_index, z, b, f)`` runs after every pass; a true return
    value stops the run.
    """
    if passes < 1:
        raise ValueError("passes must be at least 1")
    if theta_schedule not in ("pass", "update"):
        raise ValueError(f"unknown theta_schedule {theta_schedule!r}")
    if w_theta not in ("previous", "current"):
        raise ValueError(f"unknown w_theta {w_theta!r}")
    y = initial_orientation(graph, init) if z0 is None else _check_point(graph, z0)
    w = np.zeros_like(y)
    b0 = vertex_loads(graph, y)
    theta = 1.0 / graph.m
    st = np.array([theta, theta, float(b0 @ b0), 0.0])
    endpoints = graph.edges.ravel()
    seeds = _pass_seeds(seed, passes)
    f_hist = np.empty(passes)
    per_update = theta_schedule == "update"
    current = w_theta == "current"

    def point():
        return st[0] ** 2 * w + y

    if callback is None:
        _acdm_practical_passes(endpoints, graph.n, y, w, st, seeds, per_update, current, f_hist)
    else:
        for p in range(passes):
            _acdm_practical_passes(endpoints, graph.n, y, w, st, seeds[p:p + 1], per_update, current,
                                   f_hist[p:p + 1])
            z = point()
            if callback(p, z, vertex_loads(graph, z), f_hist[p]):
                f_hist = f_hist[:p + 1]
                break
    z = point()
    meta = {"algorithm": "acdm", "seed": seed, "passes": passes, "init": init,
            "theta_schedule": theta_schedule, "w_theta": w_theta}
    return CoordinateResult(z, vertex_loads(graph, z), f_hist, len(f_hist) * graph.m, meta)


# --------------------------------------------------------------------------- fractional peeling

@numba.njit(cache=True)
def _peel_block(endpoints, indptr, inc_flat, z, alive, bprime, fixed_edges):
    """Peel the alive vertices by smallest ``b'`` and return the best suffix as a mask.

    ``fixed_edges[u]`` counts edges from alive ``u`` to already-assigned blocks.
    Suffix value = (internal edges + boundary edges) / size, compared exactly.
    """
    n = alive.shape[0]
    cap = n + inc_flat.shape[0] + 1
    keys = np.empty(cap)
    ids = np.empty(cap, dtype=np.int64)
    size = 0
    count = 0
    num = 0
    for u in range(n):
        if alive[u]:
            count += 1
            num += fixed_edges[u]
            keys[size] = bprime[u]
            ids[size] = u
            size += 1
    for i in range(endpoints.shape[0] // 2):
        if alive[endpoints[2 * i]] and alive[endpoints[2 * i + 1]]:
            num += 1
    # heapify
    for i in range(size // 2 - 1, -1, -1):
        _sift_down(keys, ids, size, i)
    gone = np.zeros(n, dtype=np.bool_)
    order = np.empty(count, dtype=np.int64)
    best_num, best_den, best_k = num, count, 0
    k = 0
    while k < count:
        key = keys[0]
        u = ids[0]
        size -= 1
        keys[0] = keys[size]
        ids[0] = ids[size]
        _sift_down(keys, ids, size, 0)
        if gone[u] or key != bprime[u]:
            continue
        # current suffix (before removing u) has value num / (count - k)
        den = count - k
        if num * best_den > best_num * den:
            best_num, best_den, best_k = num, den, k
        order[k] = u
        gone[u] = True
        num -= fixed_edges[u]
        for j in range(indptr[u], indptr[u + 1]):
            i = inc_flat[j]
            v = endpoints[i ^ 1]
            if alive[v] and not gone[v]:
                num -= 1
                bprime[v] -= z[i ^ 1]
                keys[size] = bprime[v]
                ids[size] = v
                _sift_up(keys, ids, size)
                size += 1
        k += 1
    block = np.zeros(n, dtype=np.bool_)
    for j in range(best_k, count):
        block[order[j]] = True
    return block, best_num, best_den


def fractional_peel(graph: Graph, z, b=None) -> Decomposition:
    """Round a near-optimal orientation to an ordered partition.

    Repeatedly peels the remaining vertices in order of smallest ``b'``
    (starting from ``b`` and subtracting ``z_ev`` from a neighbour's ``b'``
    whenever ``u`` leaves), takes the best suffix as the next block and then
    hands every edge between the block and the rest wholly to the remaining
    endpoint.  Block values count edges inside the block plus edges to earlier
    blocks; ties go to the larger suffix.
    """
    z = np.array(z, dtype=float)
    if z.shape != (2 * graph.m,):
        raise ValueError("orientation must have length 2m")
    b = vertex_loads(graph, z) if b is None else np.array(b, dtype=float)
    endpoints = graph.edges.ravel()
    alive = np.ones(graph.n, dtype=bool)
    fixed = np.zeros(graph.n, dtype=np.int64)
    bprime = b.copy()
    blocks, dens = [], []
    while alive.any():
        block, num, den = _peel_block(endpoints, graph.indptr, graph.inc_flat, z, alive, bprime.copy(),
                                      fixed)
        verts = np.flatnonzero(block)
        blocks.append(verts)
        dens.append(DensityValue(int(num), int(den)))
        alive &= ~block
        # rewire boundary edges toward the residual side and recompute residual loads
        eu, ev = graph.edges[:, 0], graph.edges[:, 1]
        cross_u = block[eu] & alive[ev]
        cross_v = block[ev] & alive[eu]
        z[0::2][cross_u], z[1::2][cross_u] = 0.0, 1.0
        z[0::2][cross_v], z[1::2][cross_v] = 1.0, 0.0
        np.add.at(fixed, ev[cross_u], 1)
        np.add.at(fixed, eu[cross_v], 1)
        bprime = vertex_loads(graph, z)
    return Decomposition(blocks, dens, loads=b, meta={"algorithm": "fractional_peel"})
