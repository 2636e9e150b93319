"""Synthetic dataset generation"""

import json
from typing import Any, Dict

import structlog

from src.experiments import BENEFIT_STREAM, GRAPH_STREAM, data_points, derive_seed
from src.games import BenefitRegime, save_matrix_csv, simulate_dataset
from src.graphs import save_graph_csv, spectral_radius

from .base import BaseJob

log = structlog.get_logger()


class SimulateJob(BaseJob):
    """Write graph.csv, benefits.csv, actions.csv and meta.json per data point"""

    mode = "simulate"

    def execute(self) -> Dict[str, Any]:
        points = data_points(self.config)
        graph_seed = derive_seed(self.config.seed, 0, GRAPH_STREAM)
        benefit_seed = derive_seed(self.config.seed, 0, BENEFIT_STREAM)
        written = []

        for point in points:
            target = self.output_dir if len(points) == 1 else self.output_dir / self._slug(point)
            target.mkdir(parents=True, exist_ok=True)

            regime = BenefitRegime(kind=self.config.game.regime, band=point.band, noise_std=point.noise_std)
            dataset = simulate_dataset(
                point.graph_params(graph_seed, self.config.graph.ws_p),
                point.K,
                point.rho,
                self.config.game.sign,
                regime,
                benefit_seed,
            )

            save_graph_csv(dataset.graph, target / "graph.csv")
            save_matrix_csv(dataset.benefits, target / "benefits.csv")
            save_matrix_csv(dataset.actions, target / "actions.csv")
            meta = {
                "model": point.model,
                "density": point.density,
                "n": point.n,
                "K": point.K,
                "target_rho": point.rho,
                "rho": spectral_radius(dataset.beta * dataset.graph.weights),
                "beta": dataset.beta,
                "sign": self.config.game.sign,
                "regime": regime.kind,
                "band": list(point.band) if point.band else None,
                "noise_std": point.noise_std,
                "edges": dataset.graph.edge_count,
                "graph_seed": graph_seed,
                "benefit_seed": benefit_seed,
            }
            (target / "meta.json").write_text(json.dumps(meta, indent=2), encoding="utf-8")
            log.info("Dataset written", path=str(target), model=point.model, edges=dataset.graph.edge_count)
            written.append(str(target))

        return {"datasets": written}

    @staticmethod
    def _slug(point) -> str:
        band = f"_band{point.band[0]}-{point.band[1]}" if point.band else ""
        return f"{point.model}_d{point.density:g}_K{point.K}_rho{point.rho:g}_noise{point.noise_std:g}{band}"
