"""Linear-quadratic network games: benefits, equilibria and synthetic datasets"""

from dataclasses import dataclass
from typing import Literal, NamedTuple, Optional

import numpy as np
import structlog
from scipy import linalg

from src.errors import AssumptionViolation, ContractViolation, DataError, NumericalError, ParameterError
from src.graphs import (
    Graph,
    GraphModelParams,
    PathLike,
    Sign,
    beta_for_rho,
    generate_graph,
    graph_laplacian,
    spectral_decomposition,
    spectral_radius,
)

log = structlog.get_logger()

# N x K, one column per game
BenefitMatrix = np.ndarray
ActionMatrix = np.ndarray

NULL_EIGEN_CUTOFF = 1e-9


@dataclass(frozen=True)
class BenefitRegime:
    """How marginal benefits are drawn.

    ``band`` is a 1-based inclusive range over Laplacian eigenvectors sorted
    by ascending eigenvalue and is only used by the bandlimited regime.
    """

    kind: Literal["independent", "homophilous", "bandlimited"] = "independent"
    band: Optional[tuple[int, int]] = None
    noise_std: float = 0.0

    def __post_init__(self):
        if self.kind not in ("independent", "homophilous", "bandlimited"):
            raise ParameterError("kind", f"unknown benefit regime {self.kind!r}")
        if self.noise_std < 0:
            raise ParameterError("noise_std", "must be non-negative")
        if self.kind == "bandlimited":
            if self.band is None:
                raise ParameterError("band", "bandlimited regime needs an eigenvector band")
            lo, hi = self.band
            if lo < 1 or hi < lo:
                raise ParameterError("band", f"band must satisfy 1 <= lo <= hi, got {self.band}")


class SimulatedDataset(NamedTuple):
    graph: Graph
    beta: float
    benefits: BenefitMatrix
    actions: ActionMatrix


def payoff(g: Graph, beta: float, b: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Per-player utility b_i a_i - a_i^2 / 2 + beta a_i (G a)_i"""
    b = np.asarray(b, dtype=float)
    a = np.asarray(a, dtype=float)
    if b.shape != (g.n,) or a.shape != (g.n,):
        raise ContractViolation(f"expected vectors of length {g.n}, got b{b.shape} and a{a.shape}")
    return b * a - 0.5 * a**2 + beta * a * (g.weights @ a)


def _factorize(g: Graph, beta: float):
    rho = spectral_radius(beta * g.weights)
    if rho >= 1.0:
        raise AssumptionViolation(rho)
    system = np.eye(g.n) - beta * g.weights
    try:
        # I - beta*G is positive definite whenever rho(beta*G) < 1
        return linalg.cho_factor(system)
    except linalg.LinAlgError as e:
        raise NumericalError(f"cannot factorize I - beta*G: {e}") from e


def equilibrium_matrix(g: Graph, beta: float, benefits: BenefitMatrix) -> ActionMatrix:
    """Nash equilibria of K games sharing one factorization of I - beta*G"""
    benefits = np.asarray(benefits, dtype=float)
    if benefits.ndim != 2 or benefits.shape[0] != g.n:
        raise ContractViolation(f"benefits must be {g.n} x K, got {benefits.shape}")

    factor = _factorize(g, beta)
    if benefits.shape[1] == 0:
        return np.zeros((g.n, 0))
    actions = linalg.cho_solve(factor, benefits)
    if not np.all(np.isfinite(actions)):
        raise NumericalError("equilibrium solve produced non-finite actions")
    return actions


def equilibrium(g: Graph, beta: float, b: np.ndarray) -> np.ndarray:
    """Unique Nash equilibrium a solving (I - beta*G) a = b"""
    b = np.asarray(b, dtype=float)
    if b.shape != (g.n,):
        raise ContractViolation(f"expected a benefit vector of length {g.n}, got {b.shape}")
    return equilibrium_matrix(g, beta, b[:, None])[:, 0]


def sample_benefits(g: Graph, K: int, regime: BenefitRegime, seed: int) -> BenefitMatrix:
    """Draw an N x K benefit matrix under ``regime``, then add Gaussian noise"""
    if K < 0:
        raise ParameterError("K", "game count must be non-negative")
    n = g.n
    rng = np.random.default_rng(seed)

    if regime.kind == "independent":
        benefits = rng.standard_normal((n, K))

    elif regime.kind == "homophilous":
        # N(0, L^+) through the Laplacian eigenbasis, null space left at zero
        info = spectral_decomposition(graph_laplacian(g))
        scale = np.zeros(n)
        positive = info.eigenvalues > NULL_EIGEN_CUTOFF
        scale[positive] = 1.0 / np.sqrt(info.eigenvalues[positive])
        benefits = info.eigenvectors @ (scale[:, None] * rng.standard_normal((n, K)))

    else:
        lo, hi = regime.band
        if hi > n:
            raise ParameterError("band", f"band {regime.band} exceeds node count {n}")
        info = spectral_decomposition(graph_laplacian(g))
        basis = info.eigenvectors[:, lo - 1 : hi]
        benefits = basis @ rng.standard_normal((hi - lo + 1, K))
        norms = np.linalg.norm(benefits, axis=0)
        norms[norms == 0] = 1.0
        benefits = benefits / norms

    if regime.noise_std > 0:
        benefits = benefits + regime.noise_std * rng.standard_normal((n, K))
    return benefits


def simulate_dataset(
    params: GraphModelParams,
    K: int,
    target_rho: float,
    sign: Sign,
    regime: BenefitRegime,
    seed: int,
) -> SimulatedDataset:
    """Graph, beta, benefits and equilibrium actions for K synthetic games"""
    graph = generate_graph(params)
    beta = beta_for_rho(graph, target_rho, sign)
    benefits = sample_benefits(graph, K, regime, seed)
    actions = equilibrium_matrix(graph, beta, benefits)

    log.debug(
        "Dataset simulated",
        model=params.model,
        n=params.n,
        K=K,
        edges=graph.edge_count,
        beta=beta,
        regime=regime.kind,
    )
    return SimulatedDataset(graph=graph, beta=beta, benefits=benefits, actions=actions)


def load_matrix_csv(path: PathLike, expected_rows: Optional[int] = None) -> np.ndarray:
    """Read an N x K matrix (no header), one row per player"""
    try:
        m = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except (OSError, ValueError) as e:
        raise DataError(f"cannot parse matrix CSV {path}: {e}") from e

    rows, cols = m.shape
    if not np.all(np.isfinite(m)):
        raise DataError(f"matrix CSV {path} has non-finite entries", rows=rows, cols=cols)
    if expected_rows is not None and rows != expected_rows:
        raise DataError(f"matrix CSV {path} must have {expected_rows} rows", rows=rows, cols=cols)
    return m


def save_matrix_csv(m: np.ndarray, path: PathLike):
    np.savetxt(path, np.asarray(m, dtype=float), delimiter=",", fmt="%.17g")
