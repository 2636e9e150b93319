"""
Unit tests for AUC, benefit R^2, spectral clustering and summary statistics.
"""
import itertools

import numpy as np
import pytest

from src.baselines import ScoreMatrix
from src.errors import ContractViolation, ParameterError, UndefinedMetricError
from src.evaluation import (
    auc_edges,
    box_stats,
    evaluate,
    normalized_laplacian,
    r2_benefits,
    rank_auc,
    spectral_cluster,
)
from src.graphs import Graph
from tests.conftest import random_weighted_graph, two_cliques


def pair_counting_auc(scores: np.ndarray, labels: np.ndarray) -> float:
    pos = scores[labels]
    neg = scores[~labels]
    wins = 0.0
    for p, q in itertools.product(pos, neg):
        wins += 1.0 if p > q else 0.5 if p == q else 0.0
    return wins / (len(pos) * len(neg))


class TestRankAuc:

    def test_perfect_ranking(self, rng):
        g = random_weighted_graph(rng, 6)
        assert auc_edges(g.weights, g) == 1.0

    def test_all_ties(self, path3):
        assert auc_edges(np.ones((3, 3)), path3) == 0.5

    def test_small_examples(self):
        scores = np.array([0.9, 0.1, 0.5])
        assert rank_auc(scores, np.array([1, 0, 1])) == 1.0
        assert rank_auc(scores, np.array([0, 1, 1])) == pair_counting_auc(scores, np.array([False, True, True]))
        assert rank_auc(scores, np.array([0, 1, 1])) == 0.0

    def test_matches_pair_counting(self, rng):
        for _ in range(100):
            n = int(rng.integers(3, 11))
            m = n * (n - 1) // 2
            labels = rng.random(m) < 0.4
            labels[0], labels[-1] = True, False
            # coarse scores so ties occur
            scores = rng.integers(0, 4, m).astype(float)
            assert rank_auc(scores, labels) == pair_counting_auc(scores, labels)

    def test_invariant_to_increasing_transform(self, rng):
        g = random_weighted_graph(rng, 8)
        s = rng.standard_normal((8, 8))
        s = s + s.T
        assert auc_edges(s**3 + 2 * s, g) == auc_edges(s, g)

    def test_accepts_score_matrix_and_graph(self, rng):
        g = random_weighted_graph(rng, 5)
        s = rng.random((5, 5))
        s = s + s.T
        assert auc_edges(ScoreMatrix(scores=s), g) == auc_edges(s, g)
        assert auc_edges(g, g) == 1.0

    def test_undefined_without_edges(self):
        with pytest.raises(UndefinedMetricError):
            auc_edges(np.ones((4, 4)), Graph.empty(4))

    def test_shape_mismatch(self, path3):
        with pytest.raises(ContractViolation):
            auc_edges(np.ones((4, 4)), path3)


class TestR2:

    def test_identity(self, rng):
        b = rng.standard_normal((5, 4))
        assert r2_benefits(b, b) == pytest.approx(1.0)

    def test_affine_invariance(self, rng):
        b = rng.standard_normal((5, 4))
        assert r2_benefits(b, 2 * b + 3) == pytest.approx(1.0)

    def test_independent_vectors(self, rng):
        assert abs(r2_benefits(rng.standard_normal((20, 50)), rng.standard_normal((20, 50)))) < 0.02

    def test_equals_squared_correlation(self, rng):
        truth = rng.standard_normal((6, 7))
        learned = truth + rng.standard_normal((6, 7))
        r = np.corrcoef(truth.ravel(), learned.ravel())[0, 1]
        assert r2_benefits(truth, learned) == pytest.approx(r**2, abs=1e-12)

    def test_constant_learned(self, rng):
        with pytest.raises(UndefinedMetricError):
            r2_benefits(rng.standard_normal((3, 3)), np.ones((3, 3)))

    def test_shape_mismatch(self):
        with pytest.raises(ContractViolation):
            r2_benefits(np.ones((3, 2)), np.ones((2, 3)))


class TestEvaluate:

    def test_report(self, rng, path3):
        b = rng.standard_normal((3, 4))
        report = evaluate(path3.weights, path3, b, 2 * b)
        assert report.auc == 1.0
        assert report.r2 == pytest.approx(1.0)
        assert (report.n_pos, report.n_neg) == (2, 1)
        assert set(report.to_dict()) == {"auc", "r2", "n_pos", "n_neg"}

    def test_pair_counts(self, rng):
        g = random_weighted_graph(rng, 9)
        report = evaluate(rng.random((9, 9)), g)
        assert report.n_pos + report.n_neg == 36
        assert report.r2 is None
        assert 0.0 <= report.auc <= 1.0


class TestSpectralCluster:

    @staticmethod
    def assert_two_blocks(labels: np.ndarray, size: int = 4):
        assert len(set(labels[:size])) == 1
        assert len(set(labels[size:])) == 1
        assert labels[0] != labels[size]

    def test_disconnected_cliques(self):
        self.assert_two_blocks(spectral_cluster(two_cliques(), 2, seed=1))

    def test_weakly_bridged_cliques(self):
        self.assert_two_blocks(spectral_cluster(two_cliques(bridge=0.01), 2, seed=1))

    def test_complete_graph_labels_are_valid(self):
        labels = spectral_cluster(Graph(np.ones((6, 6)) - np.eye(6)), 2, seed=0)
        assert labels.shape == (6,)
        assert set(labels.tolist()) <= {0, 1}

    def test_deterministic(self, rng):
        g = random_weighted_graph(rng, 10)
        assert np.array_equal(spectral_cluster(g, 3, seed=7), spectral_cluster(g, 3, seed=7))

    @pytest.mark.parametrize("k", [1, 4])
    def test_cluster_count_bounds(self, path3, k):
        with pytest.raises(ParameterError) as info:
            spectral_cluster(path3, k)
        assert info.value.field == "k"

    def test_isolated_nodes_get_zero_rows(self):
        w = np.zeros((4, 4))
        w[0, 1] = w[1, 0] = 1.0
        lap = normalized_laplacian(Graph(w))
        assert np.all(lap[2:] == 0.0)
        assert np.allclose(lap[:2, :2], [[1.0, -1.0], [-1.0, 1.0]])

    def test_normalized_spectrum_bounds(self, rng):
        vals = np.linalg.eigvalsh(normalized_laplacian(random_weighted_graph(rng, 9)))
        assert vals.min() >= -1e-12
        assert vals.max() <= 2.0 + 1e-12


class TestBoxStats:

    def test_quartiles(self):
        stats = box_stats([1.0, 2.0, 3.0, 4.0])
        assert stats == {"count": 4, "mean": 2.5, "median": 2.5, "q25": 1.75, "q75": 3.25}

    def test_skips_missing_values(self):
        assert box_stats([1.0, float("nan"), 3.0])["count"] == 2

    def test_empty(self):
        assert box_stats([])["mean"] is None
