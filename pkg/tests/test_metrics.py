"""Unit tests for distances and collisions."""

import numpy as np
import pytest

from app.errors import DistanceOverflowError, InvalidDimensionError
from app.metrics import (
    EnsembleSnapshot,
    collision_indicators,
    comb_bfs_distances,
    comb_distance_array,
    comb_graph_distance,
    comb_graph_distance_bfs,
    count_by_checkpoint,
    detect_collisions,
    euclidean_distance,
    expected_pairwise_collisions,
    max_pairwise_distance,
    max_pairwise_distance_paths,
)
from app.walks import CombVertex, ZdPoint


class TestCombDistance:
    """Tests for the comb graph distance."""

    def test_same_tooth(self):
        assert comb_graph_distance((0, 3), (0, -2)) == 5
        assert comb_graph_distance((4, 1), (4, 1)) == 0

    def test_different_teeth(self):
        assert comb_graph_distance((1, 2), (4, -1)) == 6
        assert comb_graph_distance((-2, 0), (3, 0)) == 5

    def test_symmetric(self):
        assert comb_graph_distance((1, 5), (-3, 2)) == comb_graph_distance((-3, 2), (1, 5))

    def test_matches_bfs_on_a_box(self):
        box = [CombVertex(x, y) for x in range(-3, 4) for y in range(-3, 4)]
        for u in box:
            bfs = comb_bfs_distances(u, 12)
            for v in box:
                assert bfs[v] == comb_graph_distance(u, v)

    def test_bfs_pair(self):
        assert comb_graph_distance_bfs(CombVertex(0, 2), CombVertex(2, 1), 10) == 5

    def test_bfs_overflow(self):
        with pytest.raises(DistanceOverflowError):
            comb_graph_distance_bfs(CombVertex(0, 0), CombVertex(0, 9), 4)

    def test_vectorized(self):
        x1, y1 = np.array([0, 1, -2]), np.array([3, 2, 0])
        x2, y2 = np.array([0, 4, 3]), np.array([-2, -1, 0])
        assert comb_distance_array(x1, y1, x2, y2).tolist() == [5, 6, 5]


class TestEuclidean:
    """Tests for euclidean_distance."""

    def test_value(self):
        assert euclidean_distance((0, 0), (3, 4)) == pytest.approx(5.0)
        assert euclidean_distance(ZdPoint((1,)), ZdPoint((-2,))) == pytest.approx(3.0)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidDimensionError):
            euclidean_distance((0, 0), (1, 2, 3))


class TestMaxPairwise:
    """Tests for D_K."""

    def test_snapshot_euclidean(self):
        snap = EnsembleSnapshot(5, ((0, 0), (3, 4), (1, 0)))
        assert max_pairwise_distance(snap) == pytest.approx(5.0)

    def test_snapshot_comb(self):
        snap = EnsembleSnapshot(5, ((0, 3), (0, -2), (2, 0)))
        assert max_pairwise_distance(snap, "comb") == 5

    def test_needs_two_walkers(self):
        with pytest.raises(ValueError):
            max_pairwise_distance(EnsembleSnapshot(0, ((0,),)))
        with pytest.raises(ValueError):
            max_pairwise_distance_paths([np.zeros((3, 1))], "euclidean")

    def test_unknown_metric(self):
        with pytest.raises(ValueError):
            max_pairwise_distance(EnsembleSnapshot(0, ((0,), (1,))), "manhattan")

    def test_paths_on_z_use_range(self):
        paths = [np.array([[0], [1], [2]]), np.array([[0], [-1], [0]]), np.array([[0], [1], [-2]])]
        assert max_pairwise_distance_paths(paths, "euclidean").tolist() == [0.0, 2.0, 4.0]

    def test_paths_agree_with_snapshots(self):
        rng = np.random.default_rng(0)
        paths = [np.cumsum(rng.integers(-1, 2, size=(20, 2)), axis=0) for _ in range(3)]
        series = max_pairwise_distance_paths(paths, "comb")
        for t in range(20):
            snap = EnsembleSnapshot(t, tuple(tuple(int(c) for c in p[t]) for p in paths))
            assert series[t] == max_pairwise_distance(snap, "comb")

    def test_triangle_inequality(self):
        rng = np.random.default_rng(7)
        x = rng.integers(-6, 7, size=(3, 10_000))
        y = rng.integers(-6, 7, size=(3, 10_000))
        ab = comb_distance_array(x[0], y[0], x[1], y[1])
        bc = comb_distance_array(x[1], y[1], x[2], y[2])
        ac = comb_distance_array(x[0], y[0], x[2], y[2])
        assert np.all(ac <= ab + bc)
        assert np.array_equal(ab, comb_distance_array(x[1], y[1], x[0], y[0]))

        points = rng.integers(-6, 7, size=(10_000, 3, 3))
        for a, b, c in points:
            assert euclidean_distance(a, c) <= euclidean_distance(a, b) + euclidean_distance(b, c) + 1e-9

    def test_permutation_invariance(self):
        rng = np.random.default_rng(3)
        for metric in ("comb", "euclidean"):
            paths = [np.cumsum(rng.integers(-1, 2, size=(30, 2)), axis=0) for _ in range(4)]
            expected = max_pairwise_distance_paths(paths, metric)
            for order in ([3, 2, 1, 0], [1, 3, 0, 2], [2, 0, 3, 1]):
                permuted = [paths[i] for i in order]
                assert np.array_equal(max_pairwise_distance_paths(permuted, metric), expected)
            states = tuple(tuple(int(c) for c in p[-1]) for p in paths)
            assert max_pairwise_distance(EnsembleSnapshot(29, states), metric) == max_pairwise_distance(
                EnsembleSnapshot(29, states[::-1]), metric
            )


class TestCollisions:
    """Tests for collision detection."""

    def _snapshots(self):
        return [
            EnsembleSnapshot(1, ((0,), (0,), (1,))),
            EnsembleSnapshot(2, ((1,), (1,), (1,))),
            EnsembleSnapshot(3, ((2,), (0,), (1,))),
        ]

    def test_pairwise_events(self):
        events = list(detect_collisions(self._snapshots(), "pairwise"))
        assert [(e.time, e.walkers) for e in events] == [(1, (0, 1)), (2, (0, 1)), (2, (0, 2)), (2, (1, 2))]

    def test_full_events(self):
        events = list(detect_collisions(self._snapshots(), "full"))
        assert [(e.time, e.location) for e in events] == [(2, (1,))]

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            list(detect_collisions(self._snapshots(), "triple"))

    def test_count_by_checkpoint(self):
        events = detect_collisions(self._snapshots(), "pairwise")
        assert count_by_checkpoint(events, [1, 2, 3]) == [1, 4, 4]

    def test_indicators(self):
        paths = [np.array([[0], [0], [1], [2]]), np.array([[0], [0], [1], [0]]), np.array([[0], [1], [1], [1]])]
        pairwise, full = collision_indicators(paths)
        assert pairwise.tolist() == [3, 1, 3, 0]
        assert full.tolist() == [True, False, True, False]


class TestExpectedCollisions:
    """Tests for the exact pairwise collision expectation."""

    def test_one_dimension(self):
        assert expected_pairwise_collisions(1, 1) == pytest.approx(0.5)
        assert expected_pairwise_collisions(1, 2) == pytest.approx(0.875)

    def test_two_dimensions(self):
        assert expected_pairwise_collisions(2, 2) == pytest.approx(0.25 + 0.140625)

    def test_zero_steps(self):
        assert expected_pairwise_collisions(1, 0) == 0.0

    def test_one_dimension_grows_like_sqrt(self):
        n = 10_000
        assert expected_pairwise_collisions(1, n) == pytest.approx(2 * np.sqrt(n / np.pi) - 1, rel=1e-3)

    def test_higher_dimension_rejected(self):
        with pytest.raises(InvalidDimensionError):
            expected_pairwise_collisions(3, 10)
