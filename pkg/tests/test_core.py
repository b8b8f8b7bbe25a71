import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from faircoreset import (CoresetParams, Dataset, WeightedPointSet, make_profile, moment_error,
                         validate_dataset, weighted_mean)


def wps(points, weights):
    pts = np.asarray(points, dtype=float)
    return WeightedPointSet(pts, weights, np.zeros(len(pts), dtype=int))


class TestWeightedMean:
    def test_symmetric_pair(self):
        assert weighted_mean(wps([[0.0], [2.0]], [1, 1])) == pytest.approx([1.0])

    def test_weighted(self):
        # (0*3 + 4*1) / 4
        assert weighted_mean(wps([[0.0], [4.0]], [3, 1])) == pytest.approx([1.0])

    def test_single_point(self):
        assert weighted_mean(wps([[5.0, 5.0]], [2])) == pytest.approx([5.0, 5.0])

    def test_empty(self):
        with pytest.raises(ValueError, match="empty set"):
            weighted_mean(np.zeros((0, 2)))

    def test_nonpositive_weight_rejected(self):
        with pytest.raises(ValueError):
            wps([[0.0]], [0.0])


class TestMomentError:
    @pytest.mark.parametrize("z", [1, 2])
    def test_unit_pair(self, z):
        assert moment_error(wps([[0.0], [2.0]], [1, 1]), z) == pytest.approx(2.0)

    def test_weighted_z2(self):
        # mean 4/3: 2*(4/3)^2 + 1*(8/3)^2
        assert moment_error(wps([[0.0], [4.0]], [2, 1]), 2) == pytest.approx(32 / 3, rel=1e-12)

    def test_bad_z(self):
        with pytest.raises(ValueError):
            moment_error(wps([[0.0]], [1]), 3)


points_strategy = hnp.arrays(np.float64, st.tuples(st.integers(2, 12), st.integers(1, 3)),
                             elements=st.floats(-100, 100))
weights_for = st.lists(st.floats(0.1, 10), min_size=12, max_size=12)


@settings(max_examples=60, deadline=None)
@given(points_strategy, weights_for, hnp.arrays(np.float64, 3, elements=st.floats(-50, 50)))
def test_translation(points, weights, shift):
    S = wps(points, weights[:len(points)])
    t = shift[:points.shape[1]]
    moved = wps(points + t, weights[:len(points)])
    np.testing.assert_allclose(weighted_mean(moved), weighted_mean(S) + t, atol=1e-9)
    for z in (1, 2):
        assert moment_error(moved, z) == pytest.approx(moment_error(S, z), rel=1e-8, abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(points_strategy, weights_for, st.floats(0.1, 10))
def test_scaling(points, weights, s):
    S = wps(points, weights[:len(points)])
    scaled = wps(points * s, weights[:len(points)])
    assert moment_error(scaled, 1) == pytest.approx(s * moment_error(S, 1), rel=1e-9, abs=1e-9)
    assert moment_error(scaled, 2) == pytest.approx(s * s * moment_error(S, 2), rel=1e-9, abs=1e-9)


def test_parallel_axis_identity(rng):
    for _ in range(200):
        n = int(rng.integers(2, 20))
        pts = rng.normal(size=(n, 3)) * 5
        w = rng.uniform(0.1, 3, size=n)
        cut = int(rng.integers(1, n))
        whole, a, b = wps(pts, w), wps(pts[:cut], w[:cut]), wps(pts[cut:], w[cut:])
        mu = weighted_mean(whole)
        rhs = (moment_error(a, 2) + moment_error(b, 2)
               + w[:cut].sum() * np.sum((weighted_mean(a) - mu) ** 2)
               + w[cut:].sum() * np.sum((weighted_mean(b) - mu) ** 2))
        assert moment_error(whole, 2) == pytest.approx(rhs, rel=1e-9)


class TestValidate:
    def test_valid(self):
        D = Dataset.from_groups(np.eye(3), [[0], [1], [0, 1]])
        assert validate_dataset(D) == []

    def test_nan_names_point(self):
        pts = np.eye(3)
        pts[1, 2] = np.nan
        problems = validate_dataset(Dataset.from_groups(pts, [[0], [0], [0]]))
        assert len(problems) == 1 and "point 1" in problems[0]

    def test_dangling_profile(self):
        D = Dataset(np.eye(3), [0, 0, 5], ((0,),), 1)
        problems = validate_dataset(D)
        assert len(problems) == 1 and "dangling" in problems[0]


def test_profiles_are_canonical():
    D = Dataset.from_groups(np.zeros((4, 1)), [[1, 0], [0], [0, 1], [1]])
    assert D.profiles == ((0,), (0, 1), (1,))
    assert D.profile_of.tolist() == [1, 0, 1, 2]
    assert make_profile([3, 1, 3]) == (1, 3)
    with pytest.raises(ValueError):
        make_profile([])


def test_subset_drops_empty_profiles():
    D = Dataset.from_groups(np.arange(4.0), [[0], [1], [1], [0]])
    sub = D.subset(D.profile_of == 1)
    assert sub.profiles == ((1,),) and sub.n == 2 and sub.profile_of.tolist() == [0, 0]


@pytest.mark.parametrize("kwargs", [dict(epsilon=0.0, k=2), dict(epsilon=1.0, k=2),
                                    dict(epsilon=0.5, k=0), dict(epsilon=0.5, k=2, z=3),
                                    dict(epsilon=0.5, k=2, projection_budget_scale=0)])
def test_params_validation(kwargs):
    with pytest.raises(ValueError):
        CoresetParams(**kwargs)
