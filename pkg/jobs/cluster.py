"""Spectral clustering of a learned graph"""

from typing import Any, Dict

import numpy as np
import structlog

from src.evaluation import spectral_cluster
from src.graphs import load_graph_csv

from .base import BaseJob

log = structlog.get_logger()


class ClusterJob(BaseJob):
    """Write clusters.csv (one label per node) and clusters.json"""

    mode = "cluster"

    def execute(self) -> Dict[str, Any]:
        graph = load_graph_csv(self.config.graph_csv)
        labels = spectral_cluster(graph, self.config.clusters, seed=self.config.seed)
        np.savetxt(self.output_dir / "clusters.csv", labels, fmt="%d")

        sizes = np.bincount(labels, minlength=self.config.clusters).tolist()
        meta = {"k": self.config.clusters, "seed": self.config.seed, "laplacian": "symmetric_normalized", "sizes": sizes}
        self.write_json("clusters.json", meta)
        log.info("Clusters written", k=self.config.clusters, sizes=sizes)
        return meta
