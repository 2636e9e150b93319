"""
End-to-end tests of the netgames command line, one per subcommand.
"""
import json
import math

import numpy as np
import pandas as pd
import pytest

from src.games import BenefitRegime, save_matrix_csv, simulate_dataset
from src.graphs import GraphModelParams, save_graph_csv
from src.main import main
from tests.conftest import two_cliques

SMALL = ['--graph.models=["ER"]', "--graph.n=8", "--graph.p=[0.4]", "--game.K=[20]", "--seed=4"]


@pytest.fixture(autouse=True)
def quiet(monkeypatch):
    monkeypatch.setenv("NETGAMES_LOG_LEVEL", "WARNING")
    monkeypatch.setenv("NETGAMES_LOG_FORMAT", "json")
    monkeypatch.delenv("NETGAMES_MAX_WORKERS", raising=False)


@pytest.fixture
def simulated(tmp_path):
    out = tmp_path / "data"
    assert main(["simulate", f"--output={out}", *SMALL]) == 0
    return out


class TestSimulate:

    def test_writes_dataset(self, simulated):
        meta = json.loads((simulated / "meta.json").read_text())
        assert meta["rho"] == pytest.approx(0.6)
        actions = np.loadtxt(simulated / "actions.csv", delimiter=",")
        assert actions.shape == (8, 20)
        assert np.loadtxt(simulated / "graph.csv", delimiter=",").shape == (8, 8)

    def test_one_directory_per_data_point(self, tmp_path):
        out = tmp_path / "many"
        assert main(["simulate", f"--output={out}", *SMALL, "--game.target_rho=[0.2,0.8]"]) == 0
        assert len(list(out.glob("*/actions.csv"))) == 2


class TestLearn:

    def test_with_truth(self, simulated, tmp_path):
        out = tmp_path / "learned"
        code = main([
            "learn",
            f"--output={out}",
            f"--actions_csv={simulated / 'actions.csv'}",
            f"--truth_csv={simulated / 'graph.csv'}",
            "--grid.beta=[0.3]",
            "--grid.theta1_log2=[-2,0]",
        ])
        assert code == 0
        assert json.loads((out / "model.json").read_text())["algorithm"] == "alg1"
        assert len(pd.read_csv(out / "candidates.csv")) == 2
        assert 0.0 <= json.loads((out / "eval.json").read_text())["auc"] <= 1.0

    @pytest.mark.parametrize("sign, direction", [("complement", 1.0), ("substitute", -1.0)])
    def test_round_trip_recovers_network(self, tmp_path, sign, direction):
        regime = BenefitRegime("independent", noise_std=math.sqrt(0.1))
        data = simulate_dataset(GraphModelParams(model="ER", n=20, p=0.2, seed=31), 50, 0.6, sign, regime, 32)
        save_matrix_csv(data.actions, tmp_path / "actions.csv")
        save_graph_csv(data.graph, tmp_path / "truth.csv")

        out = tmp_path / "learned"
        code = main([
            "learn",
            f"--output={out}",
            f"--actions_csv={tmp_path / 'actions.csv'}",
            f"--truth_csv={tmp_path / 'truth.csv'}",
            "--grid.beta=[-0.4,-0.2,0.2,0.4]",
            "--grid.theta1_log2=[-2,2]",
            "--grid.theta2_log2=[0]",
        ])
        assert code == 0
        assert direction * json.loads((out / "model.json").read_text())["params"]["beta"] > 0
        assert json.loads((out / "eval.json").read_text())["auc"] >= 0.7

    def test_truth_size_mismatch(self, simulated, tmp_path):
        save_graph_csv(two_cliques(size=2), tmp_path / "small.csv")
        code = main([
            "learn",
            f"--output={tmp_path / 'learned'}",
            f"--actions_csv={simulated / 'actions.csv'}",
            f"--truth_csv={tmp_path / 'small.csv'}",
        ])
        assert code == 3

    def test_missing_actions_file(self, tmp_path):
        code = main(["learn", f"--output={tmp_path}", f"--actions_csv={tmp_path / 'absent.csv'}"])
        assert code == 3


class TestSweep:

    def test_writes_results_and_summary(self, tmp_path):
        out = tmp_path / "sweep"
        code = main(["sweep", f"--output={out}", *SMALL, "--repeats=2", '--algorithms=["alg1","correlation"]'])
        assert code == 0
        table = pd.read_csv(out / "results.csv", keep_default_na=False)
        assert len(table) == 4
        summary = json.loads((out / "summary.json").read_text())
        assert summary["rows"] == 4
        assert len(summary["best"]) == 2

    def test_config_file(self, tmp_path):
        path = tmp_path / "sweep.json"
        path.write_text(json.dumps({"graph": {"models": ["BA"], "n": 8}, "game": {"K": [10]}, "repeats": 1}))
        out = tmp_path / "sweep"
        assert main(["sweep", "--config", str(path), f"--output={out}"]) == 0
        assert len(pd.read_csv(out / "results.csv")) == 1


class TestEvaluate:

    def test_truth_against_itself(self, simulated, tmp_path):
        out = tmp_path / "eval"
        code = main([
            "evaluate",
            f"--output={out}",
            f"--graph_csv={simulated / 'graph.csv'}",
            f"--truth_csv={simulated / 'graph.csv'}",
            f"--benefits_csv={simulated / 'benefits.csv'}",
            f"--learned_benefits_csv={simulated / 'benefits.csv'}",
        ])
        assert code == 0
        report = json.loads((out / "eval.json").read_text())
        assert report["auc"] == 1.0
        assert report["r2"] == pytest.approx(1.0)
        assert report["n_pos"] + report["n_neg"] == 28

    def test_edgeless_truth_is_a_numerical_failure(self, tmp_path):
        np.savetxt(tmp_path / "empty.csv", np.zeros((4, 4)), delimiter=",")
        np.savetxt(tmp_path / "scores.csv", np.ones((4, 4)), delimiter=",")
        code = main([
            "evaluate",
            f"--output={tmp_path / 'eval'}",
            f"--graph_csv={tmp_path / 'scores.csv'}",
            f"--truth_csv={tmp_path / 'empty.csv'}",
        ])
        assert code == 4


class TestCluster:

    def test_two_cliques(self, tmp_path):
        save_graph_csv(two_cliques(bridge=0.01), tmp_path / "g.csv")
        out = tmp_path / "clusters"
        assert main(["cluster", f"--output={out}", f"--graph_csv={tmp_path / 'g.csv'}", "--clusters=2"]) == 0
        labels = np.loadtxt(out / "clusters.csv", dtype=int)
        assert len(set(labels[:4])) == 1 and len(set(labels[4:])) == 1
        assert json.loads((out / "clusters.json").read_text())["sizes"] == [4, 4]


class TestConfigErrors:

    def test_invalid_field(self, tmp_path):
        assert main(["sweep", f"--output={tmp_path}", "--graph.n=1"]) == 2

    def test_missing_config_file(self, tmp_path):
        assert main(["sweep", "--config", str(tmp_path / "absent.json")]) == 2

    def test_missing_inputs(self, tmp_path):
        assert main(["cluster", f"--output={tmp_path}"]) == 2

    def test_bad_environment(self, monkeypatch, tmp_path):
        monkeypatch.setenv("NETGAMES_LOG_FORMAT", "xml")
        assert main(["sweep", f"--output={tmp_path}"]) == 2
