import numpy as np
import pytest

from src.graphs import Graph


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def path3() -> Graph:
    """Path 0 - 1 - 2 with unit weights"""
    return Graph(np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float))


@pytest.fixture
def k3() -> Graph:
    return Graph(np.ones((3, 3)) - np.eye(3))


def random_weighted_graph(rng: np.random.Generator, n: int, density: float = 0.5) -> Graph:
    """Random graph with uniform(0.1, 1) weights; at least one edge"""
    mask = rng.random(n * (n - 1) // 2) < density
    if not mask.any():
        mask[0] = True
    x = np.where(mask, rng.uniform(0.1, 1.0, mask.size), 0.0)
    return Graph.from_upper(n, x)


def two_cliques(size: int = 4, bridge: float = 0.0) -> Graph:
    n = 2 * size
    w = np.zeros((n, n))
    w[:size, :size] = 1.0
    w[size:, size:] = 1.0
    np.fill_diagonal(w, 0.0)
    if bridge:
        w[size - 1, size] = w[size, size - 1] = bridge
    return Graph(w)
