"""Job executor - routes an experiment config to its job and maps failures to exit codes"""

import time
from typing import Dict, Type

import structlog

from jobs import ClusterJob, EvaluateJob, LearnJob, SimulateJob, SweepJob
from jobs.base import BaseJob
from src.config import Config, ExperimentConfig
from src.errors import ConfigError, NetGameError

log = structlog.get_logger()

EXIT_OK = 0
EXIT_CONFIG = ConfigError.exit_code

JOB_TYPES: Dict[str, Type[BaseJob]] = {
    job.mode: job for job in (SimulateJob, LearnJob, SweepJob, EvaluateJob, ClusterJob)
}


class JobExecutor:
    """Executes one experiment job"""

    def __init__(self, settings: Config):
        self.settings = settings

    def execute_job(self, config: ExperimentConfig) -> int:
        """Run the job for ``config.mode`` and return the process exit code"""
        job_cls = JOB_TYPES.get(config.mode)
        if job_cls is None:
            log.error("Unknown mode", mode=config.mode)
            return EXIT_CONFIG

        job = job_cls(config, self.settings)
        log.info("Executing job", mode=config.mode, output=str(job.output_dir), seed=config.seed)

        if not job.validate():
            return EXIT_CONFIG

        start = time.perf_counter()
        try:
            result = job.execute()
            log.info("Job completed", mode=config.mode, runtime_s=round(time.perf_counter() - start, 3), **result)
            return EXIT_OK

        except NetGameError as e:
            log.error("Job failed", mode=config.mode, error=str(e), kind=type(e).__name__, exit_code=e.exit_code)
            return e.exit_code

        except OSError as e:
            log.error("Job failed writing output", mode=config.mode, error=str(e))
            return EXIT_CONFIG

        finally:
            job.cleanup()
