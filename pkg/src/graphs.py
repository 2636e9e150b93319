"""Graph representation, random graph models and spectral utilities"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Union

import networkx as nx
import numpy as np
import structlog
from scipy import linalg

from src.errors import ContractViolation, DataError, ParameterError

log = structlog.get_logger()

Sign = Literal["complement", "substitute"]
PathLike = Union[str, Path]

SYMMETRY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected weighted graph stored as a dense symmetric adjacency matrix.

    The weight matrix is copied and frozen on construction. Symmetry is
    checked bit-for-bit, so build graphs through ``from_matrix`` or
    ``from_upper`` when the input is only approximately symmetric.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float, copy=True)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ContractViolation(f"adjacency must be square, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ContractViolation("adjacency has non-finite entries")
        if not np.array_equal(w, w.T):
            raise ContractViolation("adjacency is not symmetric")
        if np.any(np.diag(w) != 0):
            raise ContractViolation("adjacency has a non-zero diagonal")
        if np.any(w < 0):
            raise ContractViolation("adjacency has negative weights")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.weights, 1)))

    @property
    def volume(self) -> float:
        """Sum of all entries, i.e. the element-wise L1 norm"""
        return float(self.weights.sum())

    def upper(self) -> np.ndarray:
        """Free entries above the diagonal, in ``np.triu_indices(n, 1)`` order"""
        return self.weights[np.triu_indices(self.n, 1)].copy()

    @classmethod
    def from_upper(cls, n: int, x: np.ndarray) -> "Graph":
        x = np.asarray(x, dtype=float)
        iu = np.triu_indices(n, 1)
        if x.shape != (len(iu[0]),):
            raise ContractViolation(f"expected {len(iu[0])} upper-triangular entries, got {x.shape}")
        w = np.zeros((n, n))
        w[iu] = x
        return cls(w + w.T)

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "Graph":
        """Symmetrize by averaging and drop the diagonal"""
        m = np.asarray(m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ContractViolation(f"adjacency must be square, got shape {m.shape}")
        return cls.from_upper(m.shape[0], ((m + m.T) / 2.0)[np.triu_indices(m.shape[0], 1)])

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(np.zeros((n, n)))


@dataclass(frozen=True)
class GraphModelParams:
    """Parameters of a random graph model.

    ``p`` is the edge probability for ER and the rewiring probability for WS,
    ``k`` the ring degree for WS and ``m`` the attachments per node for BA.
    """

    model: Literal["ER", "WS", "BA"]
    n: int
    p: float = 0.2
    k: int = 2
    m: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.model not in ("ER", "WS", "BA"):
            raise ParameterError("model", f"unknown graph model {self.model!r}")
        if self.n < 1:
            raise ParameterError("n", "node count must be positive")
        if self.model in ("ER", "WS") and not 0.0 <= self.p <= 1.0:
            raise ParameterError("p", f"probability {self.p} outside [0, 1]")
        if self.model == "WS":
            if self.k < 2 or self.k % 2:
                raise ParameterError("k", f"ring degree must be even and >= 2, got {self.k}")
            if self.k >= self.n:
                raise ParameterError("k", f"ring degree {self.k} must be < n = {self.n}")
        if self.model == "BA" and not 1 <= self.m < self.n:
            raise ParameterError("m", f"attachments must satisfy 1 <= m < n, got m={self.m}, n={self.n}")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed", "seed must be a 64-bit unsigned integer")


@dataclass(frozen=True, eq=False)
class SpectralInfo:
    """Eigenpairs of a symmetric matrix, eigenvalues ascending"""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def ws_degree(n: int) -> int:
    """floor(log2 n) rounded down to an even ring degree, at least 2"""
    k = int(math.floor(math.log2(n))) if n > 1 else 2
    return max(2, k - (k % 2))


def generate_graph(params: GraphModelParams) -> Graph:
    """Sample an unweighted ER / WS / BA graph, reproducible from ``params.seed``"""
    if params.model == "ER":
        g = nx.gnp_random_graph(params.n, params.p, seed=params.seed)
    elif params.model == "WS":
        g = nx.watts_strogatz_graph(params.n, params.k, params.p, seed=params.seed)
    else:
        # star_graph(m) seed; for m=1 this is a single edge between two nodes
        g = nx.barabasi_albert_graph(params.n, params.m, seed=params.seed)

    w = nx.to_numpy_array(g, nodelist=range(params.n), dtype=float)
    graph = Graph.from_matrix(w)
    log.debug("Graph generated", model=params.model, n=params.n, edges=graph.edge_count, seed=params.seed)
    return graph


def graph_laplacian(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian L = D - G"""
    w = g.weights
    lap = -w.copy()
    lap[np.diag_indices_from(lap)] = w.sum(axis=1)
    return lap


def _check_symmetric(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {m.shape}")
    scale = 1.0 + (np.abs(m).max() if m.size else 0.0)
    if not np.allclose(m, m.T, rtol=0.0, atol=SYMMETRY_TOL * scale):
        raise ContractViolation("matrix is not symmetric")
    return m


def spectral_decomposition(m: np.ndarray) -> SpectralInfo:
    """Eigendecomposition of a symmetric matrix"""
    m = _check_symmetric(m)
    vals, vecs = linalg.eigh((m + m.T) / 2.0)
    return SpectralInfo(eigenvalues=vals, eigenvectors=vecs)


def spectral_radius(m: np.ndarray) -> float:
    """Largest absolute eigenvalue of a symmetric matrix"""
    m = _check_symmetric(m)
    if m.size == 0:
        return 0.0
    vals = linalg.eigvalsh((m + m.T) / 2.0)
    return float(np.max(np.abs(vals)))


def beta_for_rho(g: Graph, target_rho: float, sign: Sign = "complement") -> float:
    """Network-effect strength beta with rho(beta*G) equal to ``target_rho``"""
    if not 0.0 < target_rho < 1.0:
        raise ParameterError("target_rho", f"{target_rho} outside (0, 1)")
    if sign not in ("complement", "substitute"):
        raise ParameterError("sign", f"unknown sign {sign!r}")

    rho = spectral_radius(g.weights)
    if rho == 0.0:
        raise ParameterError("graph", "graph has no edges, so beta is undefined")

    beta = target_rho / rho
    return beta if sign == "complement" else -beta


def load_graph_csv(path: PathLike) -> Graph:
    """Read an N x N weight matrix (no header), symmetrizing by averaging"""
    try:
        m = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except (OSError, ValueError) as e:
        raise DataError(f"cannot parse graph CSV {path}: {e}") from e

    rows, cols = m.shape
    if rows != cols:
        raise DataError(f"graph CSV {path} is not square", rows=rows, cols=cols)
    if not np.all(np.isfinite(m)):
        raise DataError(f"graph CSV {path} has non-finite weights")
    if np.any(m < 0):
        raise DataError(f"graph CSV {path} has negative weights")
    if not np.allclose(m, m.T, rtol=0.0, atol=SYMMETRY_TOL):
        raise DataError(f"graph CSV {path} is not symmetric")
    if np.any(np.diag(m) != 0):
        log.warning("Dropping self-loops from graph CSV", path=str(path))

    return Graph.from_matrix(m)


def save_graph_csv(g: Graph, path: PathLike):
    np.savetxt(path, g.weights, delimiter=",", fmt="%.17g")
