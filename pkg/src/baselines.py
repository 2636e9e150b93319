"""Structure-learning baselines: sample correlation and graphical Lasso"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import structlog
from scipy import linalg
from sklearn.covariance import empirical_covariance

from src.errors import ContractViolation, ParameterError
from src.games import ActionMatrix

log = structlog.get_logger()

DIAGONAL_SHRINKAGE = 1e-6


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    """Symmetric edge scores, higher meaning more likely an edge; diagonal is zero"""

    scores: np.ndarray
    metadata: dict = field(default_factory=dict)
    precision: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.scores.shape[0]


def _check_samples(actions: ActionMatrix) -> np.ndarray:
    a = np.asarray(actions, dtype=float)
    if a.ndim != 2:
        raise ContractViolation(f"actions must be an N x K matrix, got shape {a.shape}")
    if a.shape[1] < 2:
        raise ParameterError("actions", "need at least two games to estimate dependence")
    if not np.all(np.isfinite(a)):
        raise ContractViolation("actions have non-finite entries")
    return a


def sample_correlation(actions: ActionMatrix) -> ScoreMatrix:
    """Pearson correlation between players' action rows.

    Rows with zero variance have undefined correlation; they score 0 against
    everyone and are listed in ``metadata["constant_rows"]``.
    """
    a = _check_samples(actions)
    centered = a - a.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(centered, axis=1)
    constant = norms == 0

    safe = np.where(constant, 1.0, norms)
    unit = centered / safe[:, None]
    unit[constant] = 0.0
    scores = np.clip(unit @ unit.T, -1.0, 1.0)
    scores = (scores + scores.T) / 2.0
    np.fill_diagonal(scores, 0.0)

    constant_rows = np.flatnonzero(constant).tolist()
    if constant_rows:
        log.warning("Constant action rows scored as uncorrelated", rows=constant_rows)

    return ScoreMatrix(scores=scores, metadata={"method": "correlation", "constant_rows": constant_rows})


def _soft_threshold_offdiag(m: np.ndarray, kappa: float) -> np.ndarray:
    out = np.sign(m) * np.maximum(np.abs(m) - kappa, 0.0)
    np.fill_diagonal(out, np.diag(m))
    return out


def _glasso_objective(s: np.ndarray, theta: np.ndarray, lam: float) -> float:
    sign, logdet = np.linalg.slogdet(theta)
    if sign <= 0:
        return float("inf")
    off = np.abs(theta).sum() - np.abs(np.diag(theta)).sum()
    return float(np.sum(s * theta) - logdet + lam * off)


def glasso_admm(
    s: np.ndarray,
    lam: float,
    rho: float = 1.0,
    tol: float = 1e-6,
    max_iter: int = 5000,
) -> tuple[np.ndarray, np.ndarray, dict]:
    """ADMM for min tr(S X) - log det X + lam * sum_{i != j} |X_ij|.

    Returns the positive-definite iterate X, its sparse copy Z and run info.
    """
    n = s.shape[0]
    z = np.zeros((n, n))
    u = np.zeros((n, n))
    x = np.eye(n)
    trace = []
    converged = False
    abs_tol = np.sqrt(n) * 1e-10

    it = 0
    for it in range(1, max_iter + 1):
        # log-det prox through the eigendecomposition keeps X positive definite
        es, q = linalg.eigh(rho * (z - u) - s)
        xi = (es + np.sqrt(es**2 + 4.0 * rho)) / (2.0 * rho)
        x = (q * xi) @ q.T
        x = (x + x.T) / 2.0

        z_old = z
        z = _soft_threshold_offdiag(x + u, lam / rho)
        u = u + x - z

        trace.append(_glasso_objective(s, x, lam))
        r_norm = np.linalg.norm(x - z)
        s_norm = np.linalg.norm(rho * (z - z_old))
        eps_pri = abs_tol + tol * max(np.linalg.norm(x), np.linalg.norm(z))
        eps_dual = abs_tol + tol * np.linalg.norm(rho * u)
        if r_norm <= eps_pri and s_norm <= eps_dual:
            converged = True
            break

    return x, z, {"iterations": it, "converged": converged, "objective_trace": trace}


def graphical_lasso(actions: ActionMatrix, lam: float) -> ScoreMatrix:
    """Sparse precision estimate of the action rows; edge scores are |Theta_ij|"""
    if not lam >= 0:
        raise ParameterError("lambda", f"must be non-negative, got {lam}")
    a = _check_samples(actions)
    n = a.shape[0]

    s = empirical_covariance(a.T)
    s = s + DIAGONAL_SHRINKAGE * np.trace(s) / n * np.eye(n)

    precision, sparse, info = glasso_admm(s, lam)
    if not info["converged"]:
        log.warning("Graphical lasso hit its iteration cap", lam=lam, iterations=info["iterations"])

    scores = np.abs((sparse + sparse.T) / 2.0)
    np.fill_diagonal(scores, 0.0)
    metadata = {
        "method": "glasso",
        "lambda": lam,
        "score": "abs_precision",
        "iterations": info["iterations"],
        "converged": info["converged"],
        "objective": info["objective_trace"][-1],
    }
    return ScoreMatrix(scores=scores, metadata=metadata, precision=precision)
