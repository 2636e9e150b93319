"""Scoring of learned graphs and benefits, and spectral clustering of learned graphs"""

from dataclasses import asdict, dataclass
from typing import Optional, Union

import numpy as np
import structlog
from scipy import linalg, stats
from sklearn.cluster import KMeans

from src.baselines import ScoreMatrix
from src.errors import ContractViolation, ParameterError, UndefinedMetricError
from src.games import BenefitMatrix
from src.graphs import Graph

log = structlog.get_logger()

Scores = Union[ScoreMatrix, Graph, np.ndarray]


@dataclass(frozen=True)
class EvalReport:
    auc: float
    r2: Optional[float]
    n_pos: int
    n_neg: int

    def to_dict(self) -> dict:
        return asdict(self)


def _score_matrix(scores: Scores) -> np.ndarray:
    if isinstance(scores, ScoreMatrix):
        return scores.scores
    if isinstance(scores, Graph):
        return scores.weights
    return np.asarray(scores, dtype=float)


def rank_auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """Mann-Whitney AUC with average ranks, so ties count one half"""
    labels = np.asarray(labels, dtype=bool)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError(f"AUC needs both classes, got {n_pos} positive and {n_neg} negative pairs")
    ranks = stats.rankdata(scores, method="average")
    return float((ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def auc_edges(scores: Scores, truth: Graph) -> float:
    """AUC of edge scores against the true edge set, over unordered node pairs"""
    m = _score_matrix(scores)
    if m.shape != (truth.n, truth.n):
        raise ContractViolation(f"scores have shape {m.shape}, truth has n={truth.n}")
    iu = np.triu_indices(truth.n, 1)
    return rank_auc(m[iu], truth.weights[iu] > 0)


def r2_benefits(truth: BenefitMatrix, learned: BenefitMatrix) -> float:
    """R^2 of regressing vectorized true benefits on vectorized learned ones"""
    truth = np.asarray(truth, dtype=float)
    learned = np.asarray(learned, dtype=float)
    if truth.shape != learned.shape:
        raise ContractViolation(f"benefit shapes differ: {truth.shape} vs {learned.shape}")
    x = learned.ravel()
    y = truth.ravel()
    if x.size < 2 or np.ptp(x) == 0:
        raise UndefinedMetricError("R^2 is undefined for constant learned benefits")
    return float(stats.linregress(x, y).rvalue ** 2)


def evaluate(
    scores: Scores,
    truth: Graph,
    truth_benefits: Optional[BenefitMatrix] = None,
    learned_benefits: Optional[BenefitMatrix] = None,
) -> EvalReport:
    iu = np.triu_indices(truth.n, 1)
    n_pos = int(np.count_nonzero(truth.weights[iu] > 0))
    r2 = None
    if truth_benefits is not None and learned_benefits is not None:
        r2 = r2_benefits(truth_benefits, learned_benefits)
    return EvalReport(auc=auc_edges(scores, truth), r2=r2, n_pos=n_pos, n_neg=len(iu[0]) - n_pos)


def normalized_laplacian(g: Graph) -> np.ndarray:
    """I - D^-1/2 G D^-1/2, with all-zero rows for isolated nodes"""
    deg = g.weights.sum(axis=1)
    connected = deg > 0
    inv_sqrt = np.zeros(g.n)
    inv_sqrt[connected] = 1.0 / np.sqrt(deg[connected])
    lap = np.diag(connected.astype(float)) - inv_sqrt[:, None] * g.weights * inv_sqrt[None, :]
    return (lap + lap.T) / 2.0


def spectral_cluster(g: Graph, k: int, seed: int = 0) -> np.ndarray:
    """Cluster labels in {0..k-1} from the k smallest normalized-Laplacian eigenvectors"""
    if not 2 <= k <= g.n:
        raise ParameterError("k", f"cluster count must satisfy 2 <= k <= n = {g.n}, got {k}")

    _, vecs = linalg.eigh(normalized_laplacian(g))
    embedding = vecs[:, :k]
    norms = np.linalg.norm(embedding, axis=1)
    norms[norms == 0] = 1.0
    embedding = embedding / norms[:, None]

    kmeans = KMeans(n_clusters=k, n_init=20, random_state=seed % 2**32)
    labels = kmeans.fit_predict(embedding)
    log.debug("Spectral clustering done", n=g.n, k=k, inertia=float(kmeans.inertia_))
    return labels.astype(int)


def box_stats(values) -> dict:
    """Mean, median and quartiles, the statistics drawn in the AUC box plots"""
    v = np.asarray(list(values), dtype=float)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return {"count": 0, "mean": None, "median": None, "q25": None, "q75": None}
    q25, median, q75 = np.percentile(v, [25, 50, 75])
    return {"count": int(v.size), "mean": float(v.mean()), "median": float(median), "q25": float(q25), "q75": float(q75)}
