from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_graphs
from densest.graph import Graph, brute_force_densest, density
from densest.mwu import mwu_solve, solve_weighted_lp
from densest.rounding import (
    charikar_sweep,
    construct_primal,
    primal_objective,
    verify_complementary_slackness,
)

PATH3 = Graph.from_edges(3, [(0, 1), (1, 2)])
TRI = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
K4 = Graph.from_edges(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
EDGE = Graph.from_edges(2, [(0, 1)])


def test_primal_single_edge():
    pr = construct_primal(EDGE, [1.0], [0.5, 0.5], 0.5)
    assert pr.tight.tolist() == [0, 1]
    assert pr.W == pytest.approx(0.5)
    assert np.allclose(pr.x, 0.5) and np.allclose(pr.alpha, 0.0)
    assert primal_objective(EDGE, pr.x) == pytest.approx(0.5)
    assert verify_complementary_slackness(EDGE, [1.0], [0.5, 0.5], 0.5, pr)


def test_primal_triangle_and_perturbation():
    p = np.full(3, 1 / 3)
    D, z = solve_weighted_lp(TRI, p)
    pr = construct_primal(TRI, p, z, D)
    assert pr.tight.tolist() == [0, 1, 2]
    assert pr.W == pytest.approx(1.0)
    assert np.allclose(pr.x, 1 / 3)
    assert primal_objective(TRI, pr.x) == pytest.approx(1.0)
    assert verify_complementary_slackness(TRI, p, z, D, pr)
    pr.x[0] += 0.01
    report = verify_complementary_slackness(TRI, p, z, D, pr)
    assert not report
    assert any("condition 1" in v for v in report.violations)


def test_primal_triangle_half_orientation():
    # an optimal (non-oracle) orientation of the same LP also yields the uniform primal point
    p = np.full(3, 1 / 3)
    pr = construct_primal(TRI, p, np.full(6, 0.5), 1.0)
    assert np.allclose(pr.x, 1 / 3) and pr.W == pytest.approx(1.0)


def test_primal_path3_objective_bound():
    D, z = solve_weighted_lp(PATH3, [0.5, 0.5])
    pr = construct_primal(PATH3, [0.5, 0.5], z, D)
    assert primal_objective(PATH3, pr.x) >= 2 / 3 - 1e-9
    assert verify_complementary_slackness(PATH3, [0.5, 0.5], z, D, pr)


def test_primal_errors():
    with pytest.raises(ValueError):
        construct_primal(EDGE, [1.0], [0.5, 0.5], 0.9)


def test_primal_invariants_on_random_distributions():
    rng = np.random.default_rng(3)
    for g in random_graphs(60, seed=11):
        for p in (rng.dirichlet(np.ones(g.m)), rng.dirichlet(np.full(g.m, 0.3)), np.full(g.m, 1 / g.m)):
            D, z = solve_weighted_lp(g, p)
            pr = construct_primal(g, p, z, D)
            rep = verify_complementary_slackness(g, p, z, D, pr)
            assert rep, rep.violations
            assert pr.x.sum() == pytest.approx(1.0, abs=1e-9)
            a = pr.alpha.reshape(-1, 2)
            cover = np.minimum(pr.x[g.edges[:, 0]] + a[:, 0], pr.x[g.edges[:, 1]] + a[:, 1])
            assert (p * pr.W <= cover + 1e-8).all()
            assert pr.objective() == pytest.approx(D, abs=1e-6)
            _, dens = charikar_sweep(g, pr.x)
            assert dens.value >= primal_objective(g, pr.x) - 1e-9
            assert dens.value >= D - 1e-9


@pytest.mark.parametrize("g, x, verts, value", [
    (TRI, [1 / 3] * 3, [0, 1, 2], Fraction(1)),
    (PATH3, [0.5, 0.5, 0.0], [0, 1, 2], Fraction(2, 3)),
    (K4, [0.25] * 4, [0, 1, 2, 3], Fraction(3, 2)),
])
def test_sweep_examples(g, x, verts, value):
    s, d = charikar_sweep(g, x)
    assert s.tolist() == verts and d.fraction == value


def test_sweep_zero_vector_uses_id_order():
    s, d = charikar_sweep(PATH3, np.zeros(3))
    assert s.tolist() == [0, 1, 2] and d.fraction == Fraction(2, 3)


def _naive_sweep(g, x):
    order = sorted(range(g.n), key=lambda u: (-x[u], u))
    best, best_set = None, None
    for k in range(1, g.n + 1):
        d = density(g, order[:k])
        if best is None or d >= best:
            best, best_set = d, sorted(order[:k])
    return best_set, best


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 99), st.lists(st.floats(0, 1), min_size=10, max_size=10))
def test_sweep_matches_naive_and_charikar_bound(idx, raw):
    g = random_graphs()[idx]
    x = np.array(raw[: g.n])
    if x.sum() > 0:
        x = x / x.sum()
    s, d = charikar_sweep(g, x)
    ns, nd = _naive_sweep(g, x)
    assert d == nd and s.tolist() == ns
    assert d.value >= primal_objective(g, x) - 1e-9


def test_mwu_pipeline_small():
    for g in random_graphs(30, seed=4):
        run = mwu_solve(g, 0.1)
        pr = construct_primal(g, run.p_tau, run.z_tau, run.D_tau)
        _, d = charikar_sweep(g, pr.x)
        _, opt = brute_force_densest(g)
        assert d.value >= 0.9 * opt.value
