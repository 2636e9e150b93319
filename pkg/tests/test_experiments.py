"""
Tests for sweeps, summaries and grid-searched learning on observed actions.
"""
import math

import numpy as np
import pandas as pd
import pytest

from src.config import load_experiment_config
from src.errors import ConfigError
from src.experiments import (
    GRID_KEY,
    RESULT_COLUMNS,
    SOLVER_STREAM,
    data_points,
    derive_seed,
    hyper_grid,
    learn_real,
    run_sweep,
    solver_params,
    summarize,
)
from src.games import BenefitRegime, simulate_dataset
from src.graphs import Graph, GraphModelParams
from src.inference import solve_independent

BASE = ['--graph.models=["ER"]', "--graph.n=8", "--graph.p=[0.4]", "--game.K=[20]", "--repeats=1", "--seed=3"]


def sweep_config(*overrides: str):
    return load_experiment_config(overrides=BASE + list(overrides))


def stable_table(table: pd.DataFrame) -> pd.DataFrame:
    return table.drop(columns=["runtime_ms"])


class TestDeriveSeed:

    def test_deterministic(self):
        assert derive_seed(7, 3, 1) == derive_seed(7, 3, 1)

    def test_streams_differ(self):
        seeds = {derive_seed(7, r, s) for r in range(5) for s in range(3)}
        assert len(seeds) == 15

    def test_is_64_bit(self):
        assert 0 <= derive_seed(2**40, 99) < 2**64


class TestGrid:

    def test_data_points_cover_models(self):
        config = sweep_config('--graph.models=["ER","WS","BA"]', "--game.target_rho=[0.2,0.8]")
        points = data_points(config)
        assert len(points) == 6
        ws = [p for p in points if p.model == "WS"]
        assert {p.density for p in ws} == {2.0}

    def test_bands_only_for_bandlimited(self):
        config = sweep_config('--game.regime="bandlimited"', "--game.bands=[[1,3],[4,6]]")
        assert [p.band for p in data_points(config)] == [(1, 3), (4, 6)]
        assert data_points(sweep_config("--game.bands=[[1,3],[4,6]]"))[0].band is None

    def test_hyper_grids(self):
        config = sweep_config("--grid.theta1_log2=[-2,2]", "--grid.theta2_log2=[0,1,2]", "--grid.lambda_log2=[-3]")
        assert len(hyper_grid(config, "alg1")) == 6
        assert hyper_grid(config, "glasso") == [{"lambda": 0.125}]
        assert hyper_grid(config, "correlation") == [{}]

    def test_solver_params_carry_settings(self):
        config = sweep_config("--solver.bcd_tol=0.001", "--solver.restarts=3")
        params = solver_params(config, 0.2, 0.5, 1.0, seed=9)
        assert (params.bcd_tol, params.restarts, params.seed) == (0.001, 3, 9)


class TestRunSweep:

    def test_single_row(self):
        table = run_sweep(sweep_config())
        assert len(table) == 1
        assert list(table.columns) == RESULT_COLUMNS
        row = table.iloc[0]
        assert row["error"] == ""
        assert 0.0 <= row["auc"] <= 1.0
        assert row["beta"] > 0
        assert row["theta1"] == 2.0**-4

    def test_row_count(self):
        config = sweep_config(
            '--graph.models=["ER","WS"]',
            '--algorithms=["alg1","correlation","glasso"]',
            "--grid.theta1_log2=[-4,0]",
            "--grid.lambda_log2=[-4,-2]",
            "--repeats=2",
        )
        table = run_sweep(config)
        assert len(table) == 20
        assert table.groupby("algorithm").size().to_dict() == {"alg1": 8, "correlation": 4, "glasso": 8}
        assert table.loc[table["algorithm"] != "glasso", "lambda"].isna().all()

    def test_bit_identical_rerun(self):
        config = sweep_config('--algorithms=["alg1","alg2","correlation"]', "--repeats=2")
        pd.testing.assert_frame_equal(stable_table(run_sweep(config)), stable_table(run_sweep(config)))

    def test_parallel_matches_sequential(self):
        config = sweep_config('--algorithms=["alg1","glasso"]', "--repeats=3")
        pd.testing.assert_frame_equal(
            stable_table(run_sweep(config, max_workers=1)), stable_table(run_sweep(config, max_workers=2))
        )

    def test_failures_become_rows(self):
        table = run_sweep(sweep_config("--graph.p=[0.0]", '--algorithms=["alg1","correlation"]'))
        assert len(table) == 2
        assert table["error"].str.startswith("ParameterError").all()
        assert not table["converged"].any()
        assert table["auc"].isna().all()

    def test_repeats_use_fresh_graphs(self):
        table = run_sweep(sweep_config("--repeats=3"))
        assert table["seed"].nunique() == 3


class TestSummarize:

    def test_grid_points_and_best(self):
        table = run_sweep(sweep_config("--grid.theta1_log2=[-4,4]", "--repeats=2"))
        summary = summarize(table)
        assert summary["rows"] == 4
        assert len(summary["grid_points"]) == 2
        assert all(p["auc"]["count"] == 2 for p in summary["grid_points"])
        assert len(summary["best"]) == 1
        best = summary["best"][0]
        assert best["auc_mean"] == max(p["auc"]["mean"] for p in summary["grid_points"])
        assert set(GRID_KEY) <= set(best)

    def test_counts_failures(self):
        summary = summarize(run_sweep(sweep_config("--graph.p=[0.0]")))
        assert summary["grid_points"][0]["failed"] == 1
        assert summary["grid_points"][0]["auc"]["mean"] is None
        assert summary["best"] == []


@pytest.fixture(scope="module")
def dataset():
    regime = BenefitRegime("independent", noise_std=math.sqrt(0.1))
    return simulate_dataset(GraphModelParams(model="ER", n=10, p=0.4, seed=21), 50, 0.6, "complement", regime, 22)


class TestLearnReal:

    def test_recovers_sign_with_truth(self, dataset):
        config = sweep_config("--grid.beta=[-0.3,0.3]", "--grid.theta1_log2=[-2,2,6]", "--grid.theta2_log2=[0]")
        result = learn_real(dataset.actions, config, truth=dataset.graph)
        assert result.model.beta > 0
        assert result.report.auc > 0.6
        assert result.candidates["selected"].sum() == 1
        assert len(result.candidates) == 6

    def test_single_point_matches_direct_solve(self, dataset):
        config = sweep_config("--grid.beta=[0.2]", "--grid.theta1_log2=[-2]", "--grid.theta2_log2=[0]")
        result = learn_real(dataset.actions, config)
        direct = solve_independent(dataset.actions, solver_params(config, 0.2, 0.25, 1.0, derive_seed(3, 0, SOLVER_STREAM)))
        assert np.array_equal(result.model.graph.weights, direct.graph.weights)
        assert result.report is None

    def test_unstable_points_are_flagged(self, dataset):
        config = sweep_config("--grid.beta=[5.0]", "--grid.theta1_log2=[0]")
        result = learn_real(dataset.actions, config)
        assert not result.candidates["stable"].any()
        assert not result.model.stable

    def test_needs_a_learner(self, dataset):
        with pytest.raises(ConfigError):
            learn_real(dataset.actions, sweep_config('--algorithms=["glasso"]'))

    def test_undefined_auc_fails_every_point(self, dataset):
        config = sweep_config("--grid.beta=[0.1,0.3]", "--grid.theta1_log2=[0]", "--grid.theta2_log2=[0]")
        with pytest.raises(ConfigError, match="UndefinedMetricError"):
            learn_real(dataset.actions, config, truth=Graph.empty(10))
