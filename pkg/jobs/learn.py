"""Learning a game from observed actions"""

from typing import Any, Dict

import structlog

from src.errors import DataError
from src.experiments import learn_real
from src.games import load_matrix_csv
from src.graphs import load_graph_csv
from src.inference import save_model

from .base import BaseJob

log = structlog.get_logger()


class LearnJob(BaseJob):
    """Grid-search beta and thetas on an actions CSV, optionally scored against a truth graph"""

    mode = "learn"

    def execute(self) -> Dict[str, Any]:
        actions = load_matrix_csv(self.config.actions_csv)
        truth = None
        if self.config.truth_csv:
            truth = load_graph_csv(self.config.truth_csv)
            if truth.n != actions.shape[0]:
                raise DataError(
                    f"truth graph has {truth.n} nodes but actions have {actions.shape[0]} rows",
                    rows=actions.shape[0],
                    cols=actions.shape[1],
                )

        log.info("Learning from actions", n=actions.shape[0], K=actions.shape[1], truth=truth is not None)
        result = learn_real(actions, self.config, truth)

        save_model(result.model, self.output_dir)
        result.candidates.to_csv(self.output_dir / "candidates.csv", index=False)
        summary = {"beta": result.model.beta, "algorithm": result.model.algorithm, "objective": result.model.objective}
        if result.report is not None:
            self.write_json("eval.json", result.report.to_dict())
            summary["auc"] = result.report.auc
        return summary
