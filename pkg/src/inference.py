"""Joint recovery of the interaction graph and marginal benefits from equilibrium actions.

Both learners share one engine: an accelerated projected-gradient solver for
quadratics over the feasible graph set (symmetric, non-negative, zero
diagonal, entries summing to N). The set is parameterized by the N(N-1)/2
entries above the diagonal, where it becomes a scaled simplex with an exact
sort-based projection.
"""

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import structlog
from scipy import linalg
from scipy.spatial.distance import pdist

from src.errors import ContractViolation, NumericalError, ParameterError
from src.games import ActionMatrix, BenefitMatrix, save_matrix_csv
from src.graphs import Graph, PathLike, graph_laplacian, save_graph_csv, spectral_radius

log = structlog.get_logger()


@dataclass(frozen=True)
class SolverParams:
    """Inputs of both learners. ``beta`` is supplied by the caller or tuned outside."""

    beta: float
    theta1: float = 0.0
    theta2: float = 0.0
    inner_tol: float = 1e-8
    inner_max_iter: int = 20000
    bcd_tol: float = 1e-4
    bcd_max_iter: int = 50
    seed: int = 0
    restarts: int = 1

    def __post_init__(self):
        if not math.isfinite(self.beta):
            raise ParameterError("beta", "must be finite")
        for name in ("theta1", "theta2"):
            value = getattr(self, name)
            if not value >= 0 or not math.isfinite(value):
                raise ParameterError(name, f"must be a finite non-negative number, got {value}")
        for name in ("inner_tol", "bcd_tol"):
            if not getattr(self, name) > 0:
                raise ParameterError(name, "tolerance must be positive")
        for name in ("inner_max_iter", "bcd_max_iter", "restarts"):
            if getattr(self, name) < 1:
                raise ParameterError(name, "must be at least 1")


@dataclass(frozen=True, eq=False)
class LearnedModel:
    graph: Graph
    benefits: BenefitMatrix
    objective_trace: tuple[float, ...]
    converged: bool
    iterations: int
    params: SolverParams
    algorithm: str
    spectral_radius: float

    @property
    def beta(self) -> float:
        return self.params.beta

    @property
    def objective(self) -> float:
        return self.objective_trace[-1]

    @property
    def stable(self) -> bool:
        """Whether the learned game has a unique stable equilibrium, rho(beta*G) < 1"""
        return self.spectral_radius < 1.0


def _check_actions(actions: ActionMatrix) -> np.ndarray:
    a = np.asarray(actions, dtype=float)
    if a.ndim != 2:
        raise ContractViolation(f"actions must be an N x K matrix, got shape {a.shape}")
    if a.shape[0] < 2:
        raise ParameterError("actions", "need at least two players")
    if a.shape[1] < 1:
        raise ParameterError("actions", "need at least one game")
    if not np.all(np.isfinite(a)):
        raise ContractViolation("actions have non-finite entries")
    return a


def _check_joint(g: Graph, b: BenefitMatrix, a: ActionMatrix) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or a.shape != b.shape or a.shape[0] != g.n:
        raise ContractViolation(f"dimension mismatch: graph n={g.n}, benefits {b.shape}, actions {a.shape}")
    return a, b


def project_simplex(v: np.ndarray, total: float) -> np.ndarray:
    """Euclidean projection of ``v`` onto {x >= 0, sum(x) = total}"""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - total
    ind = np.arange(1, v.size + 1)
    cond = u - css / ind > 0
    r = ind[cond][-1]
    tau = css[cond][-1] / r
    return np.maximum(v - tau, 0.0)


def project_feasible(candidate: np.ndarray) -> Graph:
    """Closest feasible graph (symmetric, non-negative, zero diagonal, volume N)"""
    m = np.asarray(candidate, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractViolation(f"candidate must be square, got shape {m.shape}")
    n = m.shape[0]
    if n < 2:
        raise ParameterError("candidate", "need n >= 2 for any free entry")
    m = (m + m.T) / 2.0
    x = project_simplex(m[np.triu_indices(n, 1)], n / 2.0)
    return Graph.from_upper(n, x)


def uniform_feasible(n: int) -> np.ndarray:
    """Upper-triangular entries of the feasible graph with all edges equal"""
    return np.full(n * (n - 1) // 2, 1.0 / (n - 1))


def objective_f(g: Graph, b: BenefitMatrix, a: ActionMatrix, params: SolverParams) -> float:
    """||(I - beta G)A - B||_F^2 + theta1 ||G||_F^2 + theta2 ||B||_F^2"""
    a, b = _check_joint(g, b, a)
    resid = a - params.beta * (g.weights @ a) - b
    return float(np.sum(resid**2) + params.theta1 * np.sum(g.weights**2) + params.theta2 * np.sum(b**2))


def objective_h(g: Graph, b: BenefitMatrix, a: ActionMatrix, params: SolverParams) -> float:
    """||(I - beta G)A - B||_F^2 + theta1 ||G||_F^2 + theta2 tr(B^T L B)"""
    a, b = _check_joint(g, b, a)
    resid = a - params.beta * (g.weights @ a) - b
    smooth = np.sum(b * (graph_laplacian(g) @ b))
    return float(np.sum(resid**2) + params.theta1 * np.sum(g.weights**2) + params.theta2 * smooth)


def benefits_closed_form(g: Graph, a: ActionMatrix, params: SolverParams) -> BenefitMatrix:
    """Minimizer over B of the homophilous objective: (I + theta2 L)^-1 (I - beta G) A"""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != g.n:
        raise ContractViolation(f"actions must have {g.n} rows, got shape {a.shape}")
    rhs = a - params.beta * (g.weights @ a)
    if params.theta2 == 0:
        return rhs
    system = np.eye(g.n) + params.theta2 * graph_laplacian(g)
    try:
        return linalg.solve(system, rhs, assume_a="pos")
    except linalg.LinAlgError as e:
        raise NumericalError(f"cannot solve for benefits: {e}") from e


@dataclass
class _QPResult:
    x: np.ndarray
    trace: list[float]
    converged: bool
    iterations: int


class GraphQP:
    """Quadratic over the feasible graph set.

    f(x) = weight ||T - beta G(x) A||_F^2 + theta1 ||G(x)||_F^2 + <c, x>

    where G(x) is the symmetric matrix with upper-triangular entries x. Each
    free entry appears twice in G, which the gradient accounts for.
    """

    def __init__(
        self,
        actions: np.ndarray,
        target: np.ndarray,
        weight: float,
        beta: float,
        theta1: float,
        linear: Optional[np.ndarray] = None,
    ):
        self.actions = actions
        self.target = target
        self.weight = weight
        self.beta = beta
        self.theta1 = theta1
        self.n = actions.shape[0]
        self.iu = np.triu_indices(self.n, 1)
        self.linear = np.zeros(len(self.iu[0])) if linear is None else linear
        self.total = self.n / 2.0

    def _matrix(self, x: np.ndarray) -> np.ndarray:
        w = np.zeros((self.n, self.n))
        w[self.iu] = x
        return w + w.T

    def value(self, x: np.ndarray) -> float:
        resid = self.target - self.beta * (self._matrix(x) @ self.actions)
        return float(self.weight * np.sum(resid**2) + 2.0 * self.theta1 * np.dot(x, x) + np.dot(self.linear, x))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        resid = self.target - self.beta * (self._matrix(x) @ self.actions)
        full = -2.0 * self.weight * self.beta * (resid @ self.actions.T)
        return (full + full.T)[self.iu] + 4.0 * self.theta1 * x + self.linear

    def project(self, v: np.ndarray) -> np.ndarray:
        return project_simplex(v, self.total)

    def gradient_mapping(self, x: np.ndarray, step: float) -> float:
        """||x - P(x - step * grad)|| / step, zero exactly at the constrained minimizer"""
        return float(np.linalg.norm(x - self.project(x - step * self.gradient(x))) / step)

    def lipschitz_estimate(self, iterations: int = 50) -> float:
        """Power iteration on the (constant) Hessian"""
        zero_grad = self.gradient(np.zeros_like(self.linear))
        v = np.random.default_rng(0).standard_normal(self.linear.size)
        v /= np.linalg.norm(v)
        est = 0.0
        for _ in range(iterations):
            hv = self.gradient(v) - zero_grad
            est = float(np.linalg.norm(hv))
            if est == 0.0:
                break
            v = hv / est
        return est

    def minimize(self, x0: np.ndarray, tol: float, max_iter: int) -> _QPResult:
        """Accelerated projected gradient with backtracking and restart on increase.

        Stops once the objective decrease is below ``tol`` (relative) and the
        gradient mapping at a short step is below ``1e-2 * sqrt(tol)`` in
        absolute terms, so the returned point is first-order optimal to that
        bound however large the gradient itself is.
        """
        x = self.project(x0)
        fx = self.value(x)
        lip = max(self.lipschitz_estimate(), 1e-12)
        grad_tol = 1e-2 * math.sqrt(tol)

        y, t = x.copy(), 1.0
        momentum = False
        trace = [fx]
        converged = False
        it = 0

        while it < max_iter:
            it += 1
            fy = self.value(y)
            gy = self.gradient(y)
            while True:
                x_new = self.project(y - gy / lip)
                d = x_new - y
                f_new = self.value(x_new)
                if f_new <= fy + np.dot(gy, d) + 0.5 * lip * np.dot(d, d) + 1e-14 * max(1.0, abs(fy)):
                    break
                lip *= 2.0

            if f_new > fx and momentum:
                y, t, momentum = x.copy(), 1.0, False
                continue

            decrease = fx - f_new
            if decrease < 0.0:
                # plain step from x: the increase is rounding, keep stepping on the mapping
                y, t = x_new.copy(), 1.0
            else:
                t_new = (1.0 + math.sqrt(1.0 + 4.0 * t * t)) / 2.0
                y = x_new + ((t - 1.0) / t_new) * (x_new - x)
                momentum = t > 1.0
                t = t_new
            x, fx = x_new, f_new
            trace.append(fx)

            if decrease <= tol * max(1.0, abs(fx)) and self.gradient_mapping(x, 1e-3 / lip) <= grad_tol:
                converged = True
                break

        return _QPResult(x=x, trace=trace, converged=converged, iterations=it)


def _finish(
    graph: Graph,
    benefits: np.ndarray,
    trace: list[float],
    converged: bool,
    iterations: int,
    params: SolverParams,
    algorithm: str,
) -> LearnedModel:
    rho = spectral_radius(params.beta * graph.weights)
    if rho >= 1.0:
        log.warning("Learned game violates rho(beta*G) < 1", algorithm=algorithm, beta=params.beta, rho=rho)
    if not converged:
        log.warning("Solver hit its iteration cap", algorithm=algorithm, iterations=iterations)
    return LearnedModel(
        graph=graph,
        benefits=benefits,
        objective_trace=tuple(trace),
        converged=converged,
        iterations=iterations,
        params=params,
        algorithm=algorithm,
        spectral_radius=rho,
    )


def solve_independent(actions: ActionMatrix, params: SolverParams) -> LearnedModel:
    """Learn a game with independent marginal benefits.

    For fixed G the optimal benefits are B = (I - beta G)A / (1 + theta2),
    which leaves theta2/(1+theta2) ||(I - beta G)A||^2 + theta1 ||G||^2 to
    minimize over the feasible graph set. The trace holds the full objective
    at every accepted iterate.
    """
    a = _check_actions(actions)
    n = a.shape[0]
    weight = params.theta2 / (1.0 + params.theta2)

    qp = GraphQP(a, target=a, weight=weight, beta=params.beta, theta1=params.theta1)
    result = qp.minimize(uniform_feasible(n), params.inner_tol, params.inner_max_iter)

    graph = Graph.from_upper(n, result.x)
    benefits = (a - params.beta * (graph.weights @ a)) / (1.0 + params.theta2)
    log.debug("Independent-benefit solve done", n=n, iterations=result.iterations, objective=result.trace[-1])
    return _finish(graph, benefits, result.trace, result.converged, result.iterations, params, "alg1")


def _bcd(a: np.ndarray, params: SolverParams, rng: np.random.Generator) -> LearnedModel:
    n = a.shape[0]
    benefits = rng.standard_normal(a.shape)
    x = uniform_feasible(n)
    trace: list[float] = []
    converged = False
    iterations = 0

    for iterations in range(1, params.bcd_max_iter + 1):
        # tr(B^T L B) = sum over pairs i<j of G_ij ||B_i - B_j||^2, linear in G
        smooth = params.theta2 * pdist(benefits, "sqeuclidean")
        qp = GraphQP(a, target=a - benefits, weight=1.0, beta=params.beta, theta1=params.theta1, linear=smooth)
        x = qp.minimize(x, params.inner_tol, params.inner_max_iter).x

        graph = Graph.from_upper(n, x)
        benefits = benefits_closed_form(graph, a, params)
        h = objective_h(graph, benefits, a, params)
        log.debug("BCD iteration", iteration=iterations, objective=h)

        if trace and abs(trace[-1] - h) < params.bcd_tol:
            trace.append(h)
            converged = True
            break
        trace.append(h)

    return _finish(graph, benefits, trace, converged, iterations, params, "alg2")


def solve_homophilous(actions: ActionMatrix, params: SolverParams) -> LearnedModel:
    """Learn a game with homophilous benefits by alternating G- and B-steps.

    Runs ``params.restarts`` seeded initializations of B and keeps the one
    with the lowest final objective.
    """
    a = _check_actions(actions)
    best: Optional[LearnedModel] = None
    for restart in range(params.restarts):
        model = _bcd(a, params, np.random.default_rng([params.seed, restart]))
        if best is None or model.objective < best.objective:
            best = model
    return best


def model_metadata(model: LearnedModel) -> dict:
    return {
        "algorithm": model.algorithm,
        "params": asdict(model.params),
        "objective": model.objective,
        "objective_trace": list(model.objective_trace),
        "iterations": model.iterations,
        "converged": model.converged,
        "spectral_radius": model.spectral_radius,
        "stable": model.stable,
    }


def save_model(model: LearnedModel, directory: PathLike):
    """Write graph.csv, benefits.csv and model.json into ``directory``"""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    save_graph_csv(model.graph, out / "graph.csv")
    save_matrix_csv(model.benefits, out / "benefits.csv")
    (out / "model.json").write_text(json.dumps(model_metadata(model), indent=2), encoding="utf-8")
