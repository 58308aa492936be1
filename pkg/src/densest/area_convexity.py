"""Area-convex saddle-point solver for the capped feasibility problem.

For a density cap ``D`` let ``C(D) = {z in [0,1]^{2m} : sum_{e ni u} z_eu <= D}``.
The bilinear game

    min_{z in C, y in simplex} max_{zb in C, yb in simplex}  sum_e y_e (zb_eu + zb_ev) - yb_e (z_eu + z_ev)

is solved with Sherman's area-convex scheme using the regulariser

    phi(z, y) = 6 sqrt(3) (sum_e y_e (z_eu^2 + z_ev^2) + 6 sum_e y_e log y_e - 2)

whose prox step is computed by alternating exact minimisation over ``y``
(a softmax) and over ``z`` (independent capped box quadratics per vertex).
Points are stored flat: ``z`` has length ``2m`` (index ``2e + slot``), ``y``
length ``m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .graph import DensityValue, Graph
from .mwu import _incidence_ranks, solve_weighted_lp
from .rounding import charikar_sweep, construct_primal

__all__ = [
    "SaddlePoint",
    "OracleResult",
    "ShermanResult",
    "BinarySearchResult",
    "phi",
    "phi_bounds",
    "apply_A",
    "oracle_objective",
    "oracle_y_step",
    "oracle_z_step",
    "approx_oracle",
    "sherman_iterations",
    "sherman_solve",
    "saddle_gap",
    "certifies_infeasible",
    "solve_with_binary_search",
    "recover_primal_ac",
    "ac_densest",
]

SQRT3_6 = 6.0 * math.sqrt(3.0)
Y_FLOOR = 1e-300
DEFAULT_C = 50.0
DEFAULT_MAX_ROUNDS = 500


@dataclass
class SaddlePoint:
    z: np.ndarray
    y: np.ndarray


@dataclass
class OracleResult:
    point: SaddlePoint
    rounds: int
    low_precision: bool
    H_trace: np.ndarray


@dataclass
class ShermanResult:
    point: SaddlePoint
    D: float
    eps: float
    T: int
    oracle_rounds: int
    low_precision_calls: int


# --------------------------------------------------------------------------- kernels

@numba.njit(cache=True)
def _apply_A(z, y, s, r):
    m = y.shape[0]
    for e in range(m):
        s[2 * e] = y[e]
        s[2 * e + 1] = y[e]
        r[e] = -(z[2 * e] + z[2 * e + 1])


@numba.njit(cache=True)
def _phi(z, y):
    acc = 0.0
    for e in range(y.shape[0]):
        ye = y[e]
        acc += ye * (z[2 * e] ** 2 + z[2 * e + 1] ** 2)
        if ye > 0.0:
            acc += 6.0 * ye * math.log(ye)
    return SQRT3_6 * (acc - 2.0)


@numba.njit(cache=True)
def _objective(z, y, s, r):
    val = _phi(z, y)
    for i in range(z.shape[0]):
        val -= z[i] * s[i]
    for e in range(y.shape[0]):
        val -= y[e] * r[e]
    return val


@numba.njit(cache=True)
def _y_step(z, r, y):
    m = y.shape[0]
    top = -np.inf
    for e in range(m):
        L = -((z[2 * e] ** 2 + z[2 * e + 1] ** 2) - r[e] / SQRT3_6) / 6.0
        y[e] = L
        if L > top:
            top = L
    total = 0.0
    for e in range(m):
        y[e] = math.exp(y[e] - top)
        total += y[e]
    for e in range(m):
        y[e] /= total


@numba.njit(cache=True)
def _clip_sum(st, yy, lam):
    acc = 0.0
    for i in range(st.shape[0]):
        v = (st[i] - lam) / (2.0 * yy[i])
        if v > 1.0:
            v = 1.0
        elif v < 0.0:
            v = 0.0
        acc += v
    return acc


@numba.njit(cache=True)
def _vertex_multiplier(st, yy, D):
    """Smallest lam >= 0 with sum clip((st - lam) / (2 yy), 0, 1) <= D."""
    if _clip_sum(st, yy, 0.0) <= D:
        return 0.0
    d = st.shape[0]
    bp = np.empty(2 * d + 1)
    k = 0
    bp[k] = 0.0
    k += 1
    for i in range(d):
        a = st[i] - 2.0 * yy[i]
        if a > 0.0:
            bp[k] = a
            k += 1
        if st[i] > 0.0:
            bp[k] = st[i]
            k += 1
    bp = np.sort(bp[:k])
    # largest index whose value still exceeds the cap; h is non-increasing in lam
    lo, hi = 0, k - 1
    if _clip_sum(st, yy, bp[hi]) >= D:
        return bp[hi]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _clip_sum(st, yy, bp[mid]) >= D:
            lo = mid
        else:
            hi = mid
    left, right = bp[lo], bp[hi]
    probe = 0.5 * (left + right)
    # on (left, right) every clamp is in a fixed regime; solve the linear piece
    wmax = 0.0
    for i in range(d):
        if 0.0 < st[i] - probe < 2.0 * yy[i]:
            w = 1.0 / (2.0 * yy[i])
            if w > wmax:
                wmax = w
    if wmax == 0.0:
        return left
    num = 0.0
    den = 0.0
    ones = 0.0
    for i in range(d):
        gap = st[i] - probe
        if gap >= 2.0 * yy[i]:
            ones += 1.0
        elif gap > 0.0:
            w = (1.0 / (2.0 * yy[i])) / wmax
            num += st[i] * w
            den += w
    lam = (num + (ones - D) / wmax) / den
    return min(max(lam, left), right)


@numba.njit(cache=True)
def _z_step(indptr, inc_flat, y, s, D, z):
    n = indptr.shape[0] - 1
    for u in range(n):
        lo = indptr[u]
        d = indptr[u + 1] - lo
        if d == 0:
            continue
        st = np.empty(d)
        yy = np.empty(d)
        for j in range(d):
            i = inc_flat[lo + j]
            st[j] = s[i] / SQRT3_6
            yy[j] = max(y[i >> 1], Y_FLOOR)
        if D <= 0.0:
            for j in range(d):
                z[inc_flat[lo + j]] = 0.0
            continue
        lam = _vertex_multiplier(st, yy, D)
        for j in range(d):
            v = (st[j] - lam) / (2.0 * yy[j])
            if v > 1.0:
                v = 1.0
            elif v < 0.0:
                v = 0.0
            z[inc_flat[lo + j]] = v


@numba.njit(cache=True)
def _oracle(indptr, inc_flat, s, r, D, delta, max_rounds, z, y, trace):
    """Alternating minimisation from z = 0; returns (rounds, converged).

    trace[2t], trace[2t+1] receive H after the y- and z-half-steps of round t.
    """
    for i in range(z.shape[0]):
        z[i] = 0.0
    prev = np.inf
    rounds = 0
    converged = False
    for t in range(max_rounds):
        _y_step(z, r, y)
        if t < trace.shape[0] // 2:
            trace[2 * t] = _objective(z, y, s, r)
        _z_step(indptr, inc_flat, y, s, D, z)
        cur = _objective(z, y, s, r)
        if t < trace.shape[0] // 2:
            trace[2 * t + 1] = cur
        rounds = t + 1
        if prev - cur <= delta / 12.0:
            converged = True
            break
        prev = cur
    return rounds, converged


@numba.njit(cache=True)
def _sherman(indptr, inc_flat, m, D, T, delta, max_rounds):
    n2 = 2 * m
    wz = np.zeros(n2)
    wy = np.full(m, 1.0 / m)
    s = np.empty(n2)
    r = np.empty(m)
    s2 = np.empty(n2)
    r2 = np.empty(m)
    z1 = np.empty(n2)
    y1 = np.empty(m)
    z2 = np.empty(n2)
    y2 = np.empty(m)
    sz = np.zeros(n2)
    sy = np.zeros(m)
    trace = np.empty(0)
    total_rounds = 0
    low = 0
    for t in range(T):
        _apply_A(wz, wy, s, r)
        k, ok = _oracle(indptr, inc_flat, s, r, D, delta, max_rounds, z1, y1, trace)
        total_rounds += k
        low += 0 if ok else 1
        _apply_A(z1, y1, s2, r2)
        for i in range(n2):
            s2[i] = s[i] + 2.0 * s2[i]
        for e in range(m):
            r2[e] = r[e] + 2.0 * r2[e]
        k, ok = _oracle(indptr, inc_flat, s2, r2, D, delta, max_rounds, z2, y2, trace)
        total_rounds += k
        low += 0 if ok else 1
        for i in range(n2):
            wz[i] += z2[i]
            sz[i] += z2[i]
        for e in range(m):
            wy[e] += y2[e]
            sy[e] += y2[e]
    return sz / T, sy / T, total_rounds, low


@numba.njit(cache=True)
def _knapsack_value(indptr, inc_flat, y, D):
    # sup over C(D) of sum_e y_e (z_eu + z_ev): per vertex fill the largest y first
    rank = _incidence_ranks(indptr, inc_flat, y)
    k = math.floor(D)
    frac = D - k
    total = 0.0
    for i in range(inc_flat.shape[0]):
        if rank[i] < k:
            total += y[i >> 1]
        elif rank[i] == k:
            total += frac * y[i >> 1]
    return total


# --------------------------------------------------------------------------- public API

def phi(point: SaddlePoint) -> float:
    """Regulariser value, taking ``y log y = 0`` at ``y = 0``."""
    return float(_phi(np.ascontiguousarray(point.z, dtype=float), np.ascontiguousarray(point.y, dtype=float)))


def phi_bounds(m: int) -> tuple[float, float]:
    """Range ``[-6 sqrt3 (6 ln m + 2), 0]`` of the regulariser over ``C x simplex``."""
    return -SQRT3_6 * (6.0 * math.log(m) + 2.0), 0.0


def apply_A(point: SaddlePoint) -> tuple[np.ndarray, np.ndarray]:
    """Matrix-free ``A w``: ``s_eu = y_e`` per incidence and ``r_e = -(z_eu + z_ev)``."""
    z = np.ascontiguousarray(point.z, dtype=float)
    y = np.ascontiguousarray(point.y, dtype=float)
    s = np.empty_like(z)
    r = np.empty_like(y)
    _apply_A(z, y, s, r)
    return s, r


def oracle_objective(point: SaddlePoint, s, r) -> float:
    """``H(z, y) = phi(z, y) - <z, s> - <y, r>``."""
    return float(_objective(np.asarray(point.z, float), np.asarray(point.y, float),
                            np.asarray(s, float), np.asarray(r, float)))


def oracle_y_step(z, r) -> np.ndarray:
    """Exact minimiser of ``H(z, .)`` over the simplex (a softmax)."""
    z = np.ascontiguousarray(z, dtype=float)
    r = np.ascontiguousarray(r, dtype=float)
    y = np.empty_like(r)
    _y_step(z, r, y)
    return y


def oracle_z_step(graph: Graph, y, s, D: float) -> np.ndarray:
    """Exact minimiser of ``H(., y)`` over ``C(D)``; solved independently per vertex.

    Each vertex minimises ``sum_e y_e z_e^2 - s~_e z_e`` over ``[0,1]^deg`` with
    ``sum z_e <= D`` (``s~ = s / 6sqrt3``): ``z_e = clip((s~_e - lam) / 2y_e, 0, 1)``
    with the multiplier ``lam`` found on the sorted breakpoints.
    """
    y = np.ascontiguousarray(y, dtype=float)
    s = np.ascontiguousarray(s, dtype=float)
    z = np.empty(2 * graph.m)
    _z_step(graph.indptr, graph.inc_flat, y, s, float(D), z)
    return z


def approx_oracle(graph: Graph, s, r, D: float, delta: float,
                  max_rounds: int = DEFAULT_MAX_ROUNDS) -> OracleResult:
    """Approximately minimise ``H`` over ``C(D) x simplex`` by alternating exact block steps.

    Stops once a full round decreases ``H`` by at most ``delta / 12``, which by
    the 11/12 contraction of the scheme bounds the remaining suboptimality by
    ``delta``.  ``H_trace`` holds ``H`` after every half-step.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    s = np.ascontiguousarray(s, dtype=float)
    r = np.ascontiguousarray(r, dtype=float)
    z = np.empty(2 * graph.m)
    y = np.empty(graph.m)
    trace = np.full(2 * max_rounds, np.nan)
    rounds, ok = _oracle(graph.indptr, graph.inc_flat, s, r, float(D), float(delta), int(max_rounds), z, y, trace)
    return OracleResult(SaddlePoint(z, y), rounds, not ok, trace[: 2 * rounds])


def sherman_iterations(m: int, eps: float, c: float = DEFAULT_C) -> int:
    """Outer step count ``ceil(c max(ln m, 1) / eps)``.

    The log factor is floored at 1 so a single edge still gets ``O(1/eps)`` steps.
    """
    return max(1, math.ceil(c * max(math.log(m), 1.0) / eps))


def sherman_solve(graph: Graph, D: float, eps: float, c: float = DEFAULT_C, T: int | None = None,
                  max_rounds: int = DEFAULT_MAX_ROUNDS) -> ShermanResult:
    """Run ``w <- w + Phi(Aw + 2 A Phi(Aw))`` from ``w0 = (0, uniform)`` with a ``eps/2`` oracle.

    Returns the average of the ``T`` oracle outputs, a point of ``C(D) x simplex``.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if D < 0:
        raise ValueError("D must be nonnegative")
    if T is None:
        T = sherman_iterations(graph.m, eps, c)
    z, y, rounds, low = _sherman(graph.indptr, graph.inc_flat, graph.m, float(D), int(T),
                                 eps / 2.0, int(max_rounds))
    return ShermanResult(SaddlePoint(z, y), float(D), eps, int(T), int(rounds), int(low))


def saddle_gap(graph: Graph, point: SaddlePoint, D: float) -> float:
    """Exact duality gap ``sup_{zb in C(D)} sum_e y_e (zb_eu+zb_ev) - min_e (z_eu + z_ev)``."""
    y = np.ascontiguousarray(point.y, dtype=float)
    z = np.asarray(point.z, dtype=float)
    sup = _knapsack_value(graph.indptr, graph.inc_flat, y, float(D))
    inf = float((z[0::2] + z[1::2]).min())
    return float(sup - inf)


def certifies_infeasible(graph: Graph, y, D: float) -> bool:
    """True iff ``max_{z in C(D)} sum_e y_e (z_eu + z_ev) < 1``: no ``z in C(D)`` covers every edge."""
    y = np.ascontiguousarray(y, dtype=float)
    return bool(_knapsack_value(graph.indptr, graph.inc_flat, y, float(D)) < 1.0)


@dataclass
class Probe:
    D: float
    feasible: bool
    certified: bool
    gap: float
    min_cover: float
    result: ShermanResult


@dataclass
class BinarySearchResult:
    z: np.ndarray
    D_tilde: float
    probes: list[Probe] = field(default_factory=list)

    @property
    def outer_steps(self) -> int:
        return sum(p.result.T for p in self.probes)


def _normalise_pairs(z: np.ndarray) -> np.ndarray:
    pair = z[0::2] + z[1::2]
    pair = np.where(pair > 0, pair, 1.0)
    out = z.copy()
    out[0::2] = np.where(z[0::2] + z[1::2] > 0, z[0::2] / pair, 0.5)
    out[1::2] = np.where(z[0::2] + z[1::2] > 0, z[1::2] / pair, 0.5)
    return out


def solve_with_binary_search(graph: Graph, eps: float, c: float = DEFAULT_C,
                             max_rounds: int = DEFAULT_MAX_ROUNDS, on_probe=None) -> BinarySearchResult:
    """Binary search the cap ``D`` over the greedy bracket ``[g0, 2 g0]``.

    A probe is feasible when the averaged ``z`` covers every edge to within
    ``1 - eps``.  The returned ``z`` is the feasible probe's orientation with each
    edge pair divided by its sum, so every edge is covered exactly once, and
    ``D_tilde`` is its maximum load.
    """
    from .baselines import greedy_peel

    if not 0 < eps < 1 / 6:
        raise ValueError("eps must lie in (0, 1/6) for the binary search")
    if graph.m == 0:
        raise ValueError("graph has no edges")
    g0 = float(greedy_peel(graph).best_density)
    if g0 <= 0:
        raise ValueError("empty greedy bracket")
    probes: list[Probe] = []

    def probe(D):
        res = sherman_solve(graph, D, eps, c=c, max_rounds=max_rounds)
        cover = res.point.z[0::2] + res.point.z[1::2]
        pr = Probe(D, bool(cover.min() >= 1.0 - eps), certifies_infeasible(graph, res.point.y, D),
                   saddle_gap(graph, res.point, D), float(cover.min()), res)
        probes.append(pr)
        if on_probe is not None:
            on_probe(pr)
        return pr

    lo, hi = g0, 2.0 * g0
    best_z, best_D = None, math.inf

    def accept(pr):
        nonlocal best_z, best_D
        zt = _normalise_pairs(pr.result.point.z)
        load = np.bincount(graph.edges.ravel(), weights=zt, minlength=graph.n).max()
        if load < best_D:
            best_z, best_D = zt, float(load)

    first = probe(lo)
    if first.feasible:
        accept(first)
        hi = lo
    else:
        top = probe(hi)
        if top.feasible:
            accept(top)
        while hi - lo > 0.5 * eps * lo:
            mid = 0.5 * (lo + hi)
            pr = probe(mid)
            if pr.feasible:
                hi = mid
                accept(pr)
            else:
                lo = mid
    if best_z is None:
        # 2 g0 >= OPT is always feasible for an exact saddle point; fall back to balanced pairs
        best_z = np.full(2 * graph.m, 0.5)
        best_D = float(np.bincount(graph.edges.ravel(), weights=best_z, minlength=graph.n).max())
    return BinarySearchResult(best_z, best_D, probes)


def recover_primal_ac(graph: Graph, ybar, Dbar: float | None = None) -> tuple[np.ndarray, DensityValue]:
    """Round an edge distribution ``ybar`` to a vertex set.

    Solves the per-round LP on ``ybar``, builds the primal point from it and
    sweeps.  The density is at least the LP value, which exceeds ``Dbar``
    whenever ``ybar`` certifies infeasibility of ``C(Dbar)``.
    """
    D_y, z_y = solve_weighted_lp(graph, ybar)
    primal = construct_primal(graph, ybar, z_y, D_y)
    return charikar_sweep(graph, primal.x)


@dataclass
class AcResult:
    vertices: np.ndarray
    density: DensityValue
    D_tilde: float
    D_bar: float
    search: BinarySearchResult
    final: ShermanResult


def ac_densest(graph: Graph, eps: float, c: float = DEFAULT_C, max_rounds: int = DEFAULT_MAX_ROUNDS,
               on_probe=None) -> AcResult:
    """Full pipeline: binary search, a final solve on ``C(D_tilde (1 - 2 eps))`` and rounding of its ``y``."""
    search = solve_with_binary_search(graph, eps, c=c, max_rounds=max_rounds, on_probe=on_probe)
    D_bar = search.D_tilde * (1.0 - 2.0 * eps)
    final = sherman_solve(graph, D_bar, eps, c=c, max_rounds=max_rounds)
    verts, dens = recover_primal_ac(graph, final.point.y, D_bar)
    return AcResult(verts, dens, search.D_tilde, D_bar, search, final)
