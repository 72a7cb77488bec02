import numpy as np
import pytest

from opspace.cluster import (
    PatternInertia,
    _repair_empty,
    kmeans,
    pattern_inertia,
    remove_noisy_patterns,
    select_k,
)
from opspace.corpus import Label
from opspace.embeddings import synthesize_planted
from opspace.ops import OperationKind, OperationPoint, build_operation_space
from opspace.patterns import VAR_X, Pattern, PatternGroup
from oracles import kmeans_bruteforce


class TestKmeans:
    def test_coincident_point_blobs(self):
        x = np.array([[0.0, 0.0]] * 10 + [[10.0, 10.0]] * 10)
        result = kmeans(x, 2, restarts=3, seed=0)
        assert result.total_inertia == 0.0
        assert len(set(result.assignment[:10])) == 1
        assert len(set(result.assignment[10:])) == 1
        assert result.assignment[0] != result.assignment[10]

    def test_one_dimensional_hand_instance(self):
        x = np.array([[0.0], [1.0], [9.0], [10.0]])
        result = kmeans(x, 2, restarts=10, seed=0)
        assert np.isclose(result.total_inertia, 1.0)
        assert sorted(result.centroids.ravel()) == [0.5, 9.5]

    def test_k_equals_one_is_the_mean(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((20, 3))
        result = kmeans(x, 1, restarts=2, seed=0)
        assert np.allclose(result.centroids[0], x.mean(axis=0))
        expected = ((x - x.mean(axis=0)) ** 2).sum()
        assert np.isclose(result.total_inertia, expected)

    def test_k_above_distinct_points_fatal(self):
        x = np.zeros((5, 2))
        with pytest.raises(ValueError, match="distinct"):
            kmeans(x, 2, restarts=1, seed=0)

    def test_nonpositive_k_fatal(self):
        with pytest.raises(ValueError):
            kmeans(np.zeros((3, 1)), 0, restarts=1, seed=0)

    def test_inertia_history_monotone(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((60, 4))
        result = kmeans(x, 5, restarts=5, seed=3)
        for prev, cur in zip(result.inertia_history, result.inertia_history[1:]):
            assert cur <= prev * (1 + 1e-9) + 1e-12

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((40, 3))
        a = kmeans(x, 4, restarts=5, seed=11)
        b = kmeans(x, 4, restarts=5, seed=11)
        assert np.array_equal(a.assignment, b.assignment)
        assert np.array_equal(a.centroids, b.centroids)
        assert a.total_inertia == b.total_inertia

    def test_permutation_invariant(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((30, 2))
        perm = rng.permutation(30)
        a = kmeans(x, 3, restarts=4, seed=7)
        b = kmeans(x[perm], 3, restarts=4, seed=7)
        assert np.array_equal(b.assignment, a.assignment[perm])
        assert np.array_equal(a.centroids, b.centroids)
        assert a.total_inertia == b.total_inertia

    def test_nested_restarts_never_worse(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal((50, 2))
        best_10 = kmeans(x, 6, restarts=10, seed=5).total_inertia
        best_100 = kmeans(x, 6, restarts=100, seed=5).total_inertia
        assert best_100 <= best_10 + 1e-12

    def test_recomputed_inertia_matches(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal((45, 3)) * 4
        result = kmeans(x, 4, restarts=3, seed=1)
        recomputed = result.recomputed_inertia(x)
        assert abs(recomputed - result.total_inertia) <= 1e-9 * max(1.0, recomputed)

    def test_matches_bruteforce_on_small_1d(self):
        rng = np.random.default_rng(6)
        for _ in range(25):
            n = int(rng.integers(2, 9))
            values = np.round(rng.uniform(-5, 5, size=n), 2)
            k = int(rng.integers(1, min(3, len(np.unique(values))) + 1))
            result = kmeans(values.reshape(-1, 1), k, restarts=30, seed=9)
            expected = kmeans_bruteforce(values.tolist(), k)
            assert result.total_inertia <= expected + 1e-9
            assert result.total_inertia >= expected - 1e-9


class TestRepairEmpty:
    def test_farthest_point_becomes_singleton(self):
        x = np.array([[0.0], [0.1], [5.0]])
        labels = np.array([0, 0, 0], dtype=np.int64)
        sqd = np.array([0.0, 0.01, 25.0])
        centroids = np.zeros((2, 1))
        _repair_empty(labels, sqd, 2, centroids, x)
        assert labels.tolist() == [0, 0, 1]
        assert centroids[1, 0] == 5.0
        assert sqd[2] == 0.0

    def test_never_steals_a_singleton(self):
        # the globally farthest point is its cluster's only member
        x = np.array([[9.0], [0.0], [0.5]])
        labels = np.array([0, 1, 1], dtype=np.int64)
        sqd = np.array([9.0, 1.0, 2.0])
        _repair_empty(labels, sqd, 3, None, x)
        assert labels.tolist() == [0, 1, 2]


def _planted_points(sizes, dim=8, noise=0.01, seed=0, kind=OperationKind.SUBTRACT,
                    offset=1.0, start_pair_id=0, start_token=0):
    groups = []
    next_id = start_pair_id
    for g, size in enumerate(sizes):
        pattern = Pattern((f"t{start_token + g}", VAR_X), ("u", VAR_X), 1)
        groups.append(PatternGroup(pattern, Label.ENTAILMENT, list(range(next_id, next_id + size))))
        next_id += size
    matrix = synthesize_planted(groups, dim, offset, noise, seed)
    return groups, build_operation_space(groups, matrix, kind)


class TestPatternInertia:
    def test_coincident_points_score_zero(self):
        groups, points = _planted_points([4], noise=0.0)
        x = np.stack([pt.vector for pt in points])
        clustering = kmeans(x, 1, restarts=2, seed=0)
        ranking = pattern_inertia(points, clustering)
        assert ranking[0].value == 0.0
        assert ranking[0].size == 4

    def test_mean_of_squared_distances(self):
        points = [
            OperationPoint(0, 0, np.array([1.0, 0.0])),
            OperationPoint(1, 0, np.array([np.sqrt(3.0), 0.0])),
        ]
        from opspace.cluster import Clustering

        clustering = Clustering(
            1, np.array([0, 0]), np.zeros((1, 2)), 4.0, [], 1
        )
        ranking = pattern_inertia(points, clustering)
        assert np.isclose(ranking[0].value, 2.0)  # (1 + 3) / 2

    def test_high_noise_pattern_ranks_first(self):
        quiet, quiet_points = _planted_points([10, 10], noise=0.01, seed=1)
        noisy, noisy_points = _planted_points(
            [10], noise=3.0, seed=2, start_pair_id=100, start_token=10
        )
        # re-enumerate pattern ids over the union
        points = []
        for pt in quiet_points:
            points.append(OperationPoint(pt.pair_id, pt.pattern_id, pt.vector))
        for pt in noisy_points:
            points.append(OperationPoint(pt.pair_id, 2, pt.vector))
        x = np.stack([pt.vector for pt in points])
        clustering = kmeans(x, 3, restarts=10, seed=0)
        ranking = pattern_inertia(points, clustering)
        assert ranking[0].pattern_id == 2

    def test_coverage_mismatch_fatal(self):
        groups, points = _planted_points([3])
        x = np.stack([pt.vector for pt in points])
        clustering = kmeans(x, 1, restarts=1, seed=0)
        with pytest.raises(ValueError):
            pattern_inertia(points[:2], clustering)


class TestRemoveNoisyPatterns:
    def _groups(self, n):
        return [
            PatternGroup(Pattern((f"g{i}", VAR_X), ("u", VAR_X), 1), Label.ENTAILMENT, [i])
            for i in range(n)
        ]

    def test_top_zero_is_identity(self):
        groups = self._groups(4)
        inertias = [PatternInertia(i, float(i), 1) for i in range(4)]
        assert remove_noisy_patterns(groups, inertias, 0) == sorted(
            groups, key=lambda g: g.pattern.premise_template
        )

    def test_removes_highest_inertia(self):
        groups = self._groups(4)
        inertias = [PatternInertia(i, float(i), 1) for i in range(4)]
        kept = remove_noisy_patterns(groups, inertias, 2)
        kept_ids = {g.members[0] for g in kept}
        assert kept_ids == {0, 1}  # patterns 3 and 2 had the highest inertia

    def test_all_but_one(self):
        groups = self._groups(3)
        inertias = [PatternInertia(i, float(i), 1) for i in range(3)]
        assert len(remove_noisy_patterns(groups, inertias, 2)) == 1

    def test_top_n_must_leave_at_least_one(self):
        groups = self._groups(3)
        inertias = [PatternInertia(i, float(i), 1) for i in range(3)]
        with pytest.raises(ValueError):
            remove_noisy_patterns(groups, inertias, 3)


class TestSelectK:
    def test_two_planted_clusters(self):
        _, points = _planted_points([15, 15], dim=6, noise=0.02)
        x = np.stack([pt.vector for pt in points])
        report = select_k(x, 2, 6, restarts=10, seed=0)
        assert report.best_davies_bouldin_k == 2
        assert report.best_silhouette_k == 2
        assert report.agree

    def test_three_planted_clusters(self):
        _, points = _planted_points([12, 12, 12], dim=6, noise=0.02, seed=4)
        x = np.stack([pt.vector for pt in points])
        report = select_k(x, 2, 8, restarts=10, seed=0)
        assert report.best_davies_bouldin_k == 3
        assert report.best_silhouette_k == 3

    def test_k_max_exceeding_distinct_points_fatal(self):
        x = np.array([[0.0], [1.0], [0.0], [1.0]])
        with pytest.raises(ValueError, match="distinct"):
            select_k(x, 2, 3, restarts=1, seed=0)

    def test_entries_cover_the_range(self):
        _, points = _planted_points([10, 10], dim=4, noise=0.05)
        x = np.stack([pt.vector for pt in points])
        report = select_k(x, 2, 5, restarts=5, seed=1)
        assert [e.k for e in report.entries] == [2, 3, 4, 5]
