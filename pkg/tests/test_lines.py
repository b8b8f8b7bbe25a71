import itertools

import numpy as np
import pytest

from faircoreset import Line, approx_cluster, build_lines, fit_principal_line, project
from faircoreset.lines import projection_budget, sphere_net, sphere_net_size


def line_cost(P, line, w=None):
    r = line.residual(P)
    return float(np.sum((np.ones(len(P)) if w is None else w) * r ** 2))


def brute_cost(X, k, z):
    """Best cost with centers restricted to data points."""
    best = np.inf
    for idx in itertools.combinations(range(len(X)), k):
        d = np.linalg.norm(X[:, None] - X[list(idx)][None], axis=2).min(axis=1)
        best = min(best, float(np.sum(d ** z)))
    return best


class TestApproxCluster:
    def test_k_equals_n(self, rng):
        X = rng.normal(size=(5, 2))
        for z in (1, 2):
            assert approx_cluster(X, 5, z)[1] == pytest.approx(0.0, abs=1e-12)

    def test_k1_means_centroid(self, rng):
        X = rng.normal(size=(30, 3))
        c, cost = approx_cluster(X, 1, 2)
        np.testing.assert_allclose(c[0], X.mean(axis=0), atol=1e-12)
        assert cost == pytest.approx(np.sum((X - X.mean(axis=0)) ** 2))

    def test_separated_clusters(self, rng):
        for _ in range(10):
            n1 = int(rng.integers(2, 5))
            a = rng.uniform(size=(n1, 2))
            b = rng.uniform(size=(8 - n1, 2)) + [50, 0]
            X = np.vstack((a, b))
            within = float(np.sum((a - a.mean(0)) ** 2) + np.sum((b - b.mean(0)) ** 2))
            assert approx_cluster(X, 2, 2, seed=3)[1] == pytest.approx(within, rel=1e-9)
            assert approx_cluster(X, 2, 2, seed=3)[1] <= brute_cost(X, 2, 2)
            assert approx_cluster(X, 2, 1, seed=3)[1] <= brute_cost(X, 2, 1) * 1.5

    def test_deterministic(self, rng):
        X = rng.normal(size=(100, 2))
        a, b = approx_cluster(X, 3, 1, seed=9), approx_cluster(X, 3, 1, seed=9)
        np.testing.assert_array_equal(a[0], b[0])

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            approx_cluster(np.zeros((2, 2)), 3, 1)


class TestPrincipalLine:
    def test_collinear(self):
        P = np.outer(np.arange(5.0), [3.0, 4.0]) + [1, 1]
        ln = fit_principal_line(P)
        assert line_cost(P, ln) == pytest.approx(0.0, abs=1e-20)
        assert abs(ln.direction @ [0.6, 0.8]) == pytest.approx(1.0)

    def test_rectangle(self):
        P = np.array([[0, 0], [2, 0], [0, 1], [2, 1]], dtype=float)
        ln = fit_principal_line(P)
        np.testing.assert_allclose(ln.origin, [1.0, 0.5])
        np.testing.assert_allclose(np.abs(ln.direction), [1.0, 0.0], atol=1e-12)
        # the short-axis candidate costs 4 * 1^2
        assert line_cost(P, ln) == pytest.approx(1.0)
        assert line_cost(P, Line(np.array([1.0, 0.5]), np.array([0.0, 1.0]))) == pytest.approx(4.0)

    def test_single_point(self):
        ln = fit_principal_line([[2.0, 3.0]])
        np.testing.assert_array_equal(ln.origin, [2.0, 3.0])
        assert line_cost(np.array([[2.0, 3.0]]), ln) == 0.0

    def test_monte_carlo_optimality(self, rng):
        for _ in range(30):
            d = int(rng.integers(2, 5))
            P = rng.normal(size=(40, d)) * rng.uniform(0.2, 3, size=d)
            w = rng.uniform(0.1, 2, size=40)
            ln = fit_principal_line(P, w)
            best = line_cost(P, ln, w)
            for u in rng.normal(size=(100, d)):
                assert best <= line_cost(P, Line(ln.origin, u), w) + 1e-9


class TestProject:
    def test_on_line(self):
        ln = Line(np.array([1.0, 0.0]), np.array([0.0, 2.0]))
        data, pm = project(np.array([[1.0, -3.0]]), [ln])
        assert pm.residual[0] == 0.0 and pm.position[0] == -3.0
        assert data[0].positions.tolist() == [-3.0]

    def test_tie_to_lower_index(self):
        lines = [Line(np.array([0.0, 1.0]), np.array([1.0, 0.0])),
                 Line(np.array([0.0, -1.0]), np.array([1.0, 0.0]))]
        data, pm = project(np.array([[5.0, 0.0]]), lines)
        assert pm.line_index.tolist() == [0]
        assert len(data[1]) == 0

    def test_reconstruction(self, rng):
        X = rng.normal(size=(200, 2)) * 4
        lines = [Line(rng.normal(size=2), rng.normal(size=2)) for _ in range(5)]
        data, pm = project(X, lines)
        for j, ln in enumerate(lines):
            idx = np.flatnonzero(pm.line_index == j)
            u = ln.direction
            direct = ln.origin + np.outer((X[idx] - ln.origin) @ u, u)
            np.testing.assert_allclose(ln.point_at(pm.position[idx]), direct, atol=1e-9)
            lifted = data[j].lift(data[j].positions)
            np.testing.assert_allclose(lifted, direct[np.argsort(pm.position[idx], kind="stable")],
                                       atol=1e-9)
        all_resid = np.stack([ln.residual(X) for ln in lines], axis=1)
        assert np.all(pm.residual <= all_resid.min(axis=1) + 1e-12)
        assert sorted(np.concatenate([d.source_indices for d in data]).tolist()) == list(range(200))


class TestBuildLines:
    @pytest.mark.parametrize("z", [1, 2])
    def test_collinear(self, z):
        X = np.outer(np.linspace(0, 1, 30), [1.0, 2.0])
        cover = build_lines(X, 2, z, 1e-6, 0.2)
        assert cover.cost == pytest.approx(0.0, abs=1e-12)

    def test_parallel_segments(self):
        t = np.linspace(0, 10, 20)
        h = 1.0
        X = np.vstack((np.column_stack((t, np.zeros(20))), np.column_stack((t, np.full(20, h)))))
        one = line_cost(X, fit_principal_line(X))
        cover = build_lines(X, 1, 2, one / 2, 0.2, centers=X.mean(axis=0, keepdims=True))
        assert len(cover.lines) == 2 and cover.cost == pytest.approx(0.0, abs=1e-12)
        assert cover.history[0][1] > one / 2

    def test_generous_budget(self, rng):
        X = rng.normal(size=(50, 3))
        cover = build_lines(X, 1, 2, 1e9, 0.2)
        assert len(cover.lines) == 1

    @pytest.mark.parametrize("z", [1, 2])
    def test_certificate(self, rng, z):
        for seed in range(5):
            X = rng.normal(size=(300, 2)) * [3, 1] + rng.integers(0, 3, size=(300, 1)) * 10
            _, opt = approx_cluster(X, 3, z, seed)
            budget = projection_budget(z, 0.2, opt)
            cover = build_lines(X, 3, z, budget, 0.2, seed=seed)
            resid = np.stack([ln.residual(X) for ln in cover.lines], axis=1).min(axis=1)
            assert float(np.sum(resid ** z)) == pytest.approx(cover.cost, rel=1e-9, abs=1e-12)
            assert cover.cost <= budget
            if len(cover.history) > 1:
                assert cover.history[-2][1] > budget

    def test_bad_budget(self):
        with pytest.raises(ValueError):
            build_lines(np.zeros((3, 2)), 1, 1, 0.0, 0.2)


def test_sphere_net_covers(rng):
    for d, eps in [(2, 0.3), (3, 0.5), (3, 0.25)]:
        net = sphere_net(d, eps)
        assert len(net) <= sphere_net_size(d, eps)
        np.testing.assert_allclose(np.linalg.norm(net, axis=1), 1.0)
        u = rng.normal(size=(2000, d))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        gap = np.minimum(np.linalg.norm(u[:, None] - net[None], axis=2),
                         np.linalg.norm(u[:, None] + net[None], axis=2)).min(axis=1)
        assert gap.max() <= eps


def test_projection_budget():
    assert projection_budget(1, 0.3, 9.0) == pytest.approx(0.9)
    assert projection_budget(2, 0.1, 100.0, 2.0) == pytest.approx(0.02)
