"""Independent reference solvers used only by the tests.

Each one solves the same mathematical problem as a library routine through a
different method (generic LP/QP solvers, projected gradient, grid search), so
agreement is evidence rather than tautology.
"""

import cvxpy as cp
import numpy as np
from scipy.optimize import linprog

SQRT3_6 = 6.0 * np.sqrt(3.0)


def weighted_lp_reference(graph, p):
    """min D  s.t.  load_u(z) <= D,  sum_e p_e (z_eu + z_ev) = 1,  0 <= z <= 1  (HiGHS)."""
    m, n = graph.m, graph.n
    nv = 2 * m + 1
    c = np.zeros(nv)
    c[-1] = 1.0
    A_ub = np.zeros((n, nv))
    for i, u in enumerate(graph.edges.ravel()):
        A_ub[u, i] = 1.0
    A_ub[:, -1] = -1.0
    A_eq = np.zeros((1, nv))
    A_eq[0, :-1] = np.repeat(p, 2)
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(n), A_eq=A_eq, b_eq=[1.0],
                  bounds=[(0, 1)] * (2 * m) + [(0, None)], method="highs")
    assert res.status == 0, res.message
    return res.fun


def charikar_lp_reference(graph):
    """max sum_e x_e  s.t.  x_e <= y_u, x_e <= y_v, sum y = 1, x, y >= 0  (equals OPT)."""
    m, n = graph.m, graph.n
    c = np.concatenate([-np.ones(m), np.zeros(n)])
    rows = []
    for e, (u, v) in enumerate(graph.edges):
        for w in (u, v):
            r = np.zeros(m + n)
            r[e] = 1.0
            r[m + w] = -1.0
            rows.append(r)
    A_eq = np.concatenate([np.zeros(m), np.ones(n)])[None, :]
    res = linprog(c, A_ub=np.array(rows), b_ub=np.zeros(2 * m), A_eq=A_eq, b_eq=[1.0],
                  bounds=[(0, None)] * (m + n), method="highs")
    assert res.status == 0, res.message
    return -res.fun


def project_capped_box(v, D, iters=200):
    """Euclidean projection onto {z in [0,1]^d : sum z <= D} by bisection on the shift."""
    z = np.clip(v, 0.0, 1.0)
    if z.sum() <= D:
        return z
    lo, hi = 0.0, float(np.max(v))
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if np.clip(v - mid, 0.0, 1.0).sum() > D:
            lo = mid
        else:
            hi = mid
    return np.clip(v - hi, 0.0, 1.0)


def capped_quadratic_reference(y, st, D, iters=20000):
    """min sum y_i z_i^2 - st_i z_i over the capped box, by accelerated projected gradient."""
    L = 2.0 * y.max()
    z = np.zeros_like(y)
    prev = z.copy()
    for k in range(1, iters + 1):
        mom = z + (k - 1) / (k + 2) * (z - prev)
        grad = 2.0 * y * mom - st
        prev = z
        z = project_capped_box(mom - grad / L, D)
        if k > 50 and np.abs(z - prev).max() < 1e-14:
            break
    return z


def block_min_grid(c_u, c_v, points=200001):
    """Minimise (c_u + s)^2 + (c_v + 1 - s)^2 over a grid of s in [0, 1]."""
    s = np.linspace(0.0, 1.0, points)
    vals = (c_u + s) ** 2 + (c_v + 1.0 - s) ** 2
    i = int(np.argmin(vals))
    return s[i], vals[i]


def nearest_optimal_orientation(graph, z, b_star):
    """Closest point to z among orientations with loads exactly b_star (cvxpy QP)."""
    m = graph.m
    zt = cp.Variable(2 * m)
    B = np.zeros((graph.n, 2 * m))
    B[graph.edges.ravel(), np.arange(2 * m)] = 1.0
    pair = np.zeros((m, 2 * m))
    pair[np.arange(m), 2 * np.arange(m)] = 1.0
    pair[np.arange(m), 2 * np.arange(m) + 1] = 1.0
    cons = [B @ zt == b_star, pair @ zt == 1.0, zt >= 0, zt <= 1]
    prob = cp.Problem(cp.Minimize(cp.sum_squares(zt - z)), cons)
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
    assert prob.status in ("optimal", "optimal_inaccurate"), prob.status
    return np.asarray(zt.value)


def random_domain_point(graph, D, rng):
    """A random point of C(D) x simplex."""
    z = rng.random(2 * graph.m)
    load = np.bincount(graph.edges.ravel(), weights=z, minlength=graph.n)
    scale = np.where(load > D, D / np.maximum(load, 1e-300), 1.0)
    z = z * scale[graph.edges.ravel()]
    y = rng.dirichlet(np.full(graph.m, 0.5))
    return z, y


def random_orientation(graph, rng):
    t = rng.random(graph.m)
    z = np.empty(2 * graph.m)
    z[0::2] = t
    z[1::2] = 1.0 - t
    return z
