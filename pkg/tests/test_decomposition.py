from fractions import Fraction

import numpy as np
import pytest

from conftest import atlas_connected, random_graphs
from densest.baselines import greedy_peel
from densest.decomposition import (
    acdm,
    acdm_practical,
    block_gradient,
    coordinate_update,
    default_inner_steps,
    fractional_peel,
    initial_orientation,
    loads,
    objective,
    project_block,
    rcdm,
)
from densest.fixtures import make_fixture
from densest.graph import brute_force_decomposition
from oracles import block_min_grid, random_orientation

PATH3 = make_fixture("path3")
STAR3 = make_fixture("star3")
TPE = make_fixture("tri_plus_edge")
EDGE = make_fixture("edge")
K4P = make_fixture("k4_plus_pendant")


def _bstar(g):
    return brute_force_decomposition(g).loads


def _on_segments(z):
    return np.abs(z[0::2] + z[1::2] - 1).max() <= 1e-12 and z.min() >= 0 and z.max() <= 1


@pytest.mark.parametrize("pair, expected", [
    ((0.3, 0.9), (0.2, 0.8)),
    ((2, 0), (1, 0)),
    ((0, 2), (0, 1)),
    ((0.5, 0.5), (0.5, 0.5)),
])
def test_project_block_examples(pair, expected):
    assert np.allclose(project_block(pair), expected)


def test_project_block_is_nearest_point():
    rng = np.random.default_rng(0)
    t = np.linspace(0, 1, 100001)
    for _ in range(200):
        a, c = rng.normal(size=2) * 2
        pu, pv = project_block((a, c))
        assert pu + pv == pytest.approx(1.0, abs=1e-15) and 0 <= pu <= 1
        i = np.argmin((t - a) ** 2 + (1 - t - c) ** 2)
        assert abs(pu - t[i]) <= 1e-5


def test_loads_and_objective_examples():
    z = np.array([2 / 3, 1 / 3, 1 / 3, 2 / 3])
    assert np.allclose(loads(PATH3, z), 2 / 3)
    assert objective(PATH3, z) == pytest.approx(4 / 3)
    g = make_fixture("k4")
    z = np.tile([1.0, 0.0], g.m)
    b = loads(g, z)
    assert b.tolist() == [3, 2, 1, 0] and b.sum() == g.m
    b = _bstar(TPE)
    assert float(b @ b) == pytest.approx(3.5)


def test_coordinate_update_examples():
    assert coordinate_update((0.3, 0.9), 2.0, (0, 0)) == pytest.approx(project_block((0.3, 0.9)))
    assert coordinate_update((1.0, 0.0), 1.0, (2.0, 0.0)) == pytest.approx((0.5, 0.5))
    with pytest.raises(ValueError):
        coordinate_update((1.0, 0.0), 0.0, (0.0, 0.0))


def test_coordinate_update_is_exact_block_minimizer():
    # with step weight 1 and anchor z_e, the update minimises f over the block
    rng = np.random.default_rng(1)
    for g in random_graphs(40, seed=3):
        z = random_orientation(g, rng)
        e = int(rng.integers(g.m))
        u, v = g.edges[e]
        b = loads(g, z)
        cu, cv = b[u] - z[2 * e], b[v] - z[2 * e + 1]
        s_grid, _ = block_min_grid(cu, cv)
        su, sv = coordinate_update(z[2 * e:2 * e + 2], 1.0, block_gradient(g, z, e))
        assert abs(su - s_grid) <= 1e-5
        assert su + sv == pytest.approx(1.0)


def test_block_gradient_finite_difference():
    rng = np.random.default_rng(2)
    h = 1e-6
    for g in random_graphs(30, seed=4):
        z = random_orientation(g, rng)
        e = int(rng.integers(g.m))
        grad = block_gradient(g, z, e)
        for j in range(2):
            d = np.zeros(2 * g.m)
            d[2 * e + j] = h
            fd = (objective(g, z + d) - objective(g, z - d)) / (2 * h)
            assert fd == pytest.approx(grad[j], abs=1e-6)


def test_initial_orientations():
    assert np.allclose(initial_orientation(PATH3), 0.5)
    g = make_fixture("tri_plus_pendant")
    z = initial_orientation(g, "greedy")
    order = greedy_peel(g).order
    pos = np.argsort(order)
    for e, (u, v) in enumerate(g.edges):
        first = u if pos[u] < pos[v] else v
        assert z[2 * e + (first == v)] == 1.0
    assert _on_segments(z)
    with pytest.raises(ValueError):
        initial_orientation(g, "nope")


def test_rcdm_examples():
    res = rcdm(PATH3, 200)
    assert abs(res.f - 4 / 3) <= 1e-9
    res = rcdm(EDGE, 1, z0=[1.0, 0.0])
    assert np.allclose(res.z, 0.5) and res.f == pytest.approx(0.5)
    res = rcdm(STAR3, 500)
    assert np.linalg.norm(res.b - 0.75) <= 1e-4


def test_rcdm_monotone_and_conserving():
    rng = np.random.default_rng(5)
    for g in random_graphs(20, seed=6):
        for mode in ("permutation", "sampled"):
            sums = []
            res = rcdm(g, 30, mode=mode, seed=int(rng.integers(100)), z0=random_orientation(g, rng),
                       record_deltas=True, callback=lambda p, z, b, f: sums.append(b.sum()))
            assert res.meta["deltas"].max() <= 1e-12
            assert np.allclose(sums, g.m, atol=1e-9)
            assert (np.diff(res.f_history) <= 1e-12).all()
            assert _on_segments(res.z)
            assert np.allclose(res.b, loads(g, res.z))


def test_rcdm_rejects_bad_arguments():
    with pytest.raises(ValueError):
        rcdm(PATH3, 0)
    with pytest.raises(ValueError):
        rcdm(PATH3, 1, mode="cyclic")
    with pytest.raises(ValueError):
        rcdm(PATH3, 1, z0=[1.0, 1.0, 0.0, 1.0])


def test_acdm_path3_expected_gap():
    T = default_inner_steps(PATH3)
    assert T == 12 * PATH3.m * PATH3.n
    fs = [acdm(PATH3, 5, T, seed=s).f for s in range(20)]
    assert np.mean(fs) - 4 / 3 <= 1e-6


def test_acdm_single_edge_one_epoch():
    # the momentum method does not land exactly on the optimum inside one epoch;
    # the residual after 12mn steps is tiny and the restart finishes the job
    res = acdm(EDGE, 1, z0=[1.0, 0.0])
    assert abs(res.f - 0.5) <= 1e-12
    res = acdm(EDGE, 2, z0=[1.0, 0.0])
    assert abs(res.f - 0.5) <= 1e-15


def test_acdm_tri_plus_edge():
    res = acdm(TPE, 8)
    assert np.linalg.norm(res.b - [1, 1, 1, 0.5, 0.5]) <= 1e-4
    assert _on_segments(res.z)


def test_acdm_practical_examples():
    res = acdm_practical(PATH3, 50)
    assert abs(res.f - 4 / 3) <= 1e-8
    assert _on_segments(res.z)


@pytest.mark.parametrize("schedule", ["pass", "update"])
@pytest.mark.parametrize("w_theta", ["previous", "current"])
def test_acdm_practical_variants_converge(schedule, w_theta):
    for g in (PATH3, STAR3, TPE, K4P):
        res = acdm_practical(g, 400, seed=3, theta_schedule=schedule, w_theta=w_theta)
        assert np.linalg.norm(res.b - _bstar(g)) <= 1e-4
        assert res.b.sum() == pytest.approx(g.m, abs=1e-9)


def test_acdm_practical_rejects_bad_switches():
    with pytest.raises(ValueError):
        acdm_practical(PATH3, 1, theta_schedule="epoch")
    with pytest.raises(ValueError):
        acdm_practical(PATH3, 1, w_theta="next")
    with pytest.raises(ValueError):
        acdm(PATH3, 0)


def test_determinism_and_chunking():
    g = make_fixture("planted_clique(30,8,0.2,1)")
    for fn, kw in ((acdm_practical, {"passes": 20}), (rcdm, {"passes": 20}), (acdm, {"K": 3, "T": 500})):
        a = fn(g, seed=9, **kw)
        b = fn(g, seed=9, **kw)
        c = fn(g, seed=9, callback=lambda *args: False, **kw)
        assert np.array_equal(a.f_history, b.f_history) and np.array_equal(a.z, b.z)
        assert np.array_equal(a.f_history, c.f_history) and np.array_equal(a.z, c.z)
        d = fn(g, seed=10, **kw)
        assert not np.array_equal(a.f_history, d.f_history)


def test_callback_stops_early():
    res = acdm_practical(PATH3, 100, callback=lambda p, z, b, f: p == 4)
    assert len(res.f_history) == 5 and res.updates == 5 * PATH3.m


def test_coordinate_methods_reach_optimum_on_small_graphs():
    for g in atlas_connected(6)[::5]:
        bstar = _bstar(g)
        for res in (acdm_practical(g, 600, seed=1, init="greedy"), rcdm(g, 3000, seed=1)):
            assert np.linalg.norm(res.b - bstar) <= 1e-4, (g.edges.tolist(), res.meta)


@pytest.mark.parametrize("g, blocks, dens", [
    (TPE, [[0, 1, 2], [3, 4]], [Fraction(1), Fraction(1, 2)]),
    (PATH3, [[0, 1, 2]], [Fraction(2, 3)]),
    (EDGE, [[0, 1]], [Fraction(1, 2)]),
])
def test_fractional_peel_examples(g, blocks, dens):
    z = acdm_practical(g, 200).z
    d = fractional_peel(g, z)
    assert [b.tolist() for b in d.blocks] == blocks
    assert [x.fraction for x in d.densities] == dens


def test_fractional_peel_matches_brute_force():
    for g in atlas_connected(6)[::3] + random_graphs(30, seed=8):
        ref = brute_force_decomposition(g)
        z = acdm_practical(g, 2000, seed=0, callback=lambda p, z, b, f: np.linalg.norm(b - ref.loads) <= 1e-7).z
        d = fractional_peel(g, z)
        assert [b.tolist() for b in d.blocks] == [b.tolist() for b in ref.blocks]
        assert d.densities == ref.densities
        vals = [x.fraction for x in d.densities]
        assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_fractional_peel_partitions_for_any_point():
    rng = np.random.default_rng(9)
    for g in random_graphs(30, seed=10):
        d = fractional_peel(g, random_orientation(g, rng))
        assert sorted(np.concatenate(d.blocks).tolist()) == list(range(g.n))
        assert sum(x.edges for x in d.densities) == g.m
