"""Base class for experiment jobs"""

import json
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict

import structlog

from src.config import Config, ExperimentConfig

log = structlog.get_logger()


class BaseJob(ABC):
    """Base class for all CLI subcommands"""

    mode = "base"

    def __init__(self, config: ExperimentConfig, settings: Config):
        self.config = config
        self.settings = settings
        self.output_dir = Path(config.output or settings.output_dir)

    @abstractmethod
    def execute(self) -> Dict[str, Any]:
        """Execute the job and return a summary of what was written"""
        pass

    def validate(self) -> bool:
        """Make sure the output directory exists and is writable"""
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
            marker = self.output_dir / ".write_check"
            marker.touch()
            marker.unlink()
        except OSError as e:
            log.error("Output directory is not writable", path=str(self.output_dir), error=str(e))
            return False
        return True

    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        path = self.output_dir / name
        path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
        return path

    def cleanup(self):
        pass
