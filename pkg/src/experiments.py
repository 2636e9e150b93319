"""Synthetic sweeps and real-data learning built on the solver modules"""

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd
import structlog

from src.baselines import graphical_lasso, sample_correlation
from src.config import ExperimentConfig
from src.errors import ConfigError, NetGameError
from src.evaluation import EvalReport, auc_edges, box_stats, evaluate, r2_benefits
from src.games import BenefitRegime, simulate_dataset
from src.graphs import Graph, GraphModelParams, ws_degree
from src.inference import LearnedModel, SolverParams, solve_homophilous, solve_independent

log = structlog.get_logger()

RESULT_COLUMNS = [
    "model",
    "density",
    "band",
    "algorithm",
    "n",
    "K",
    "rho",
    "noise_std",
    "theta1",
    "theta2",
    "lambda",
    "beta",
    "repeat",
    "seed",
    "auc",
    "r2",
    "objective",
    "iterations",
    "converged",
    "runtime_ms",
    "error",
]

# columns that identify one grid point of a sweep
GRID_KEY = ["model", "density", "band", "algorithm", "n", "K", "rho", "noise_std", "theta1", "theta2", "lambda"]
DATA_KEY = ["model", "density", "band", "n", "K", "rho", "noise_std"]

# seed streams derived from (master seed, repeat)
GRAPH_STREAM, BENEFIT_STREAM, SOLVER_STREAM = 0, 1, 2


def derive_seed(master: int, *keys: int) -> int:
    """Counter-based seed: the same (master, keys) always gives the same 64-bit seed"""
    return int(np.random.SeedSequence([master, *keys]).generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class DataPoint:
    """One simulated-data configuration of a sweep, before repeats"""

    model: str
    density: float
    band: Optional[tuple[int, int]]
    n: int
    K: int
    rho: float
    noise_std: float

    def graph_params(self, seed: int, ws_p: float) -> GraphModelParams:
        if self.model == "ER":
            return GraphModelParams(model="ER", n=self.n, p=self.density, seed=seed)
        if self.model == "WS":
            return GraphModelParams(model="WS", n=self.n, k=int(self.density), p=ws_p, seed=seed)
        return GraphModelParams(model="BA", n=self.n, m=int(self.density), seed=seed)


@dataclass(frozen=True)
class SweepTask:
    point: DataPoint
    repeat: int
    config: ExperimentConfig


def _densities(config: ExperimentConfig, model: str) -> list[float]:
    if model == "ER":
        return list(config.graph.p)
    if model == "WS":
        return [float(k) for k in (config.graph.ws_k or [ws_degree(config.graph.n)])]
    return [float(m) for m in config.graph.ba_m]


def data_points(config: ExperimentConfig) -> list[DataPoint]:
    bands = config.game.bands if config.game.regime == "bandlimited" else [None]
    points = []
    for model in config.graph.models:
        for density, K, rho, noise, band in itertools.product(
            _densities(config, model), config.game.K, config.game.target_rho, config.game.noise_std, bands
        ):
            band = tuple(band) if band is not None else None
            points.append(DataPoint(model, density, band, config.graph.n, K, rho, noise))
    return points


def hyper_grid(config: ExperimentConfig, algorithm: str) -> list[dict]:
    """Hyperparameter combinations an algorithm is run with"""
    if algorithm in ("alg1", "alg2"):
        return [{"theta1": t1, "theta2": t2} for t1, t2 in itertools.product(config.grid.theta1, config.grid.theta2)]
    if algorithm == "glasso":
        return [{"lambda": lam} for lam in config.grid.lambdas]
    return [{}]


def solver_params(config: ExperimentConfig, beta: float, theta1: float, theta2: float, seed: int) -> SolverParams:
    s = config.solver
    return SolverParams(
        beta=beta,
        theta1=theta1,
        theta2=theta2,
        inner_tol=s.inner_tol,
        inner_max_iter=s.inner_max_iter,
        bcd_tol=s.bcd_tol,
        bcd_max_iter=s.bcd_max_iter,
        seed=seed,
        restarts=s.restarts,
    )


def _base_row(point: DataPoint, repeat: int, seed: int, algorithm: str, hyper: dict) -> dict:
    return {
        "model": point.model,
        "density": point.density,
        "band": "" if point.band is None else f"{point.band[0]}-{point.band[1]}",
        "algorithm": algorithm,
        "n": point.n,
        "K": point.K,
        "rho": point.rho,
        "noise_std": point.noise_std,
        "theta1": hyper.get("theta1", math.nan),
        "theta2": hyper.get("theta2", math.nan),
        "lambda": hyper.get("lambda", math.nan),
        "beta": math.nan,
        "repeat": repeat,
        "seed": seed,
        "auc": math.nan,
        "r2": math.nan,
        "objective": math.nan,
        "iterations": 0,
        "converged": False,
        "runtime_ms": 0.0,
        "error": "",
    }


def _run_algorithm(row: dict, algorithm: str, hyper: dict, dataset, config: ExperimentConfig, solver_seed: int):
    graph, beta, benefits, actions = dataset
    row["beta"] = beta

    if algorithm in ("alg1", "alg2"):
        params = solver_params(config, beta, hyper["theta1"], hyper["theta2"], solver_seed)
        solve = solve_independent if algorithm == "alg1" else solve_homophilous
        model = solve(actions, params)
        row["auc"] = auc_edges(model.graph, graph)
        row["r2"] = r2_benefits(benefits, model.benefits)
        row["objective"] = model.objective
        row["iterations"] = model.iterations
        row["converged"] = model.converged
    elif algorithm == "glasso":
        result = graphical_lasso(actions, hyper["lambda"])
        row["auc"] = auc_edges(result, graph)
        row["objective"] = result.metadata["objective"]
        row["iterations"] = result.metadata["iterations"]
        row["converged"] = result.metadata["converged"]
    else:
        result = sample_correlation(actions)
        row["auc"] = auc_edges(result, graph)
        row["iterations"] = 1
        row["converged"] = not result.metadata["constant_rows"]


def run_task(task: SweepTask) -> list[dict]:
    """Simulate one dataset and run every algorithm and grid point on it"""
    config, point, repeat = task.config, task.point, task.repeat
    graph_seed = derive_seed(config.seed, repeat, GRAPH_STREAM)
    benefit_seed = derive_seed(config.seed, repeat, BENEFIT_STREAM)
    solver_seed = derive_seed(config.seed, repeat, SOLVER_STREAM)

    dataset = None
    data_error = ""
    try:
        regime = BenefitRegime(kind=config.game.regime, band=point.band, noise_std=point.noise_std)
        dataset = simulate_dataset(
            point.graph_params(graph_seed, config.graph.ws_p), point.K, point.rho, config.game.sign, regime, benefit_seed
        )
    except NetGameError as e:
        data_error = f"{type(e).__name__}: {e}"
        log.warning("Dataset simulation failed", model=point.model, repeat=repeat, error=str(e))

    rows = []
    for algorithm in config.algorithms:
        for hyper in hyper_grid(config, algorithm):
            row = _base_row(point, repeat, graph_seed, algorithm, hyper)
            if dataset is None:
                row["error"] = data_error
                rows.append(row)
                continue
            start = time.perf_counter()
            try:
                _run_algorithm(row, algorithm, hyper, dataset, config, solver_seed)
            except NetGameError as e:
                row["converged"] = False
                row["error"] = f"{type(e).__name__}: {e}"
                log.warning("Grid point failed", algorithm=algorithm, repeat=repeat, error=str(e))
            row["runtime_ms"] = (time.perf_counter() - start) * 1000.0
            rows.append(row)
    return rows


def sweep_tasks(config: ExperimentConfig) -> list[SweepTask]:
    return [SweepTask(point, repeat, config) for point in data_points(config) for repeat in range(config.repeats)]


def run_sweep(config: ExperimentConfig, max_workers: int = 1) -> pd.DataFrame:
    """Run every grid point for every repeat; rows come back sorted by key"""
    tasks = sweep_tasks(config)
    log.info("Sweep starting", tasks=len(tasks), algorithms=config.algorithms, workers=max_workers)
    start = time.perf_counter()

    if max_workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            chunks = list(pool.map(run_task, tasks))
    else:
        chunks = [run_task(task) for task in tasks]

    table = pd.DataFrame([row for chunk in chunks for row in chunk], columns=RESULT_COLUMNS)
    table = table.sort_values(GRID_KEY + ["repeat"], kind="mergesort", na_position="first").reset_index(drop=True)
    log.info("Sweep finished", rows=len(table), runtime_ms=round((time.perf_counter() - start) * 1000.0, 1))
    return table


def _clean(value):
    if isinstance(value, (float, np.floating)) and not math.isfinite(value):
        return None
    if isinstance(value, np.generic):
        return value.item()
    return value


def summarize(table: pd.DataFrame) -> dict:
    """AUC box statistics per grid point plus the best-mean grid point per algorithm and data setting"""
    grid_points = []
    for key, group in table.groupby(GRID_KEY, sort=True, dropna=False):
        entry = {col: _clean(v) for col, v in zip(GRID_KEY, key)}
        entry["auc"] = box_stats(group["auc"])
        entry["r2_mean"] = _clean(group["r2"].mean()) if group["r2"].notna().any() else None
        entry["failed"] = int((group["error"] != "").sum())
        grid_points.append(entry)

    best = []
    data_and_alg = DATA_KEY + ["algorithm"]
    for key, _ in table.groupby(data_and_alg, sort=True, dropna=False):
        matching = [
            p for p in grid_points
            if all(_same(p[c], _clean(v)) for c, v in zip(data_and_alg, key)) and p["auc"]["mean"] is not None
        ]
        if matching:
            top = max(matching, key=lambda p: p["auc"]["mean"])
            best.append({**{c: top[c] for c in GRID_KEY}, "auc_mean": top["auc"]["mean"], "r2_mean": top["r2_mean"]})

    return {"rows": int(len(table)), "grid_points": grid_points, "best": best}


def _same(a, b) -> bool:
    return a == b or (a is None and b is None)


@dataclass(frozen=True, eq=False)
class LearnResult:
    model: LearnedModel
    report: Optional[EvalReport]
    candidates: pd.DataFrame


def learn_real(
    actions: np.ndarray,
    config: ExperimentConfig,
    truth: Optional[Graph] = None,
) -> LearnResult:
    """Grid-search beta jointly with the theta grids on observed actions.

    With a ground-truth graph the candidate with the highest AUC wins;
    otherwise the lowest final objective. Candidates whose learned game is
    unstable (rho(beta*G) >= 1) stay in the table, flagged, and are only
    picked when no stable candidate exists.
    """
    algorithms = [a for a in config.algorithms if a in ("alg1", "alg2")]
    if not algorithms:
        raise ConfigError("learn mode needs at least one of alg1 / alg2 in algorithms")

    solver_seed = derive_seed(config.seed, 0, SOLVER_STREAM)
    rows, models = [], []
    for algorithm in algorithms:
        solve = solve_independent if algorithm == "alg1" else solve_homophilous
        for beta, theta1, theta2 in itertools.product(config.grid.beta, config.grid.theta1, config.grid.theta2):
            start = time.perf_counter()
            row = {"algorithm": algorithm, "beta": beta, "theta1": theta1, "theta2": theta2, "error": ""}
            try:
                model = solve(actions, solver_params(config, beta, theta1, theta2, solver_seed))
                auc = auc_edges(model.graph, truth) if truth is not None else math.nan
            except NetGameError as e:
                rows.append({**row, "converged": False, "stable": False, "error": f"{type(e).__name__}: {e}"})
                continue
            row.update(
                objective=model.objective,
                iterations=model.iterations,
                converged=model.converged,
                spectral_radius=model.spectral_radius,
                stable=model.stable,
                auc=auc,
                runtime_ms=(time.perf_counter() - start) * 1000.0,
            )
            if not model.stable:
                log.warning("Unstable grid point", algorithm=algorithm, beta=beta, rho=model.spectral_radius)
            rows.append(row)
            models.append((len(rows) - 1, model))

    if not models:
        raise ConfigError(f"every grid point failed, first error: {rows[0]['error']}")

    candidates = pd.DataFrame(rows)
    pool = [(i, m) for i, m in models if m.stable] or models
    if truth is not None:
        best_index, best = max(pool, key=lambda im: candidates.at[im[0], "auc"])
    else:
        best_index, best = min(pool, key=lambda im: im[1].objective)
    candidates["selected"] = candidates.index == best_index

    report = evaluate(best.graph, truth) if truth is not None else None
    log.info(
        "Learning finished",
        algorithm=best.algorithm,
        beta=best.beta,
        theta1=best.params.theta1,
        theta2=best.params.theta2,
        auc=report.auc if report else None,
    )
    return LearnResult(model=best, report=report, candidates=candidates)
