"""Synthetic factor sweeps"""

from typing import Any, Dict

import structlog

from src.experiments import run_sweep, summarize

from .base import BaseJob

log = structlog.get_logger()


class SweepJob(BaseJob):
    """Write results.csv (one row per grid point and seed) and summary.json"""

    mode = "sweep"

    def execute(self) -> Dict[str, Any]:
        table = run_sweep(self.config, max_workers=self.settings.max_workers)
        table.to_csv(self.output_dir / "results.csv", index=False)

        summary = summarize(table)
        self.write_json("summary.json", summary)

        failed = int((table["error"] != "").sum())
        if failed:
            log.warning("Some grid points failed", failed=failed, rows=len(table))
        return {"rows": len(table), "failed": failed}
