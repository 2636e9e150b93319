"""Scoring a learned graph against ground truth"""

from typing import Any, Dict

from src.errors import DataError
from src.evaluation import evaluate
from src.games import load_matrix_csv
from src.graphs import load_graph_csv

from .base import BaseJob


class EvaluateJob(BaseJob):
    """AUC of a learned score matrix, plus R^2 when both benefit matrices are given"""

    mode = "evaluate"

    def execute(self) -> Dict[str, Any]:
        truth = load_graph_csv(self.config.truth_csv)
        # scores may be signed (correlations), so no graph validation here
        scores = load_matrix_csv(self.config.graph_csv)
        if scores.shape != (truth.n, truth.n):
            raise DataError("score matrix does not match the truth graph", rows=scores.shape[0], cols=scores.shape[1])

        truth_b = learned_b = None
        if self.config.benefits_csv and self.config.learned_benefits_csv:
            truth_b = load_matrix_csv(self.config.benefits_csv, expected_rows=truth.n)
            learned_b = load_matrix_csv(self.config.learned_benefits_csv, expected_rows=truth.n)

        report = evaluate(scores, truth, truth_b, learned_b)
        self.write_json("eval.json", report.to_dict())
        return report.to_dict()
