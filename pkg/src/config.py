"""Configuration management for netgames runs"""

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.errors import ConfigError

load_dotenv()


@dataclass
class Config:
    """Runner settings from environment variables"""

    log_level: str = field(default_factory=lambda: os.getenv("NETGAMES_LOG_LEVEL", "INFO"))
    log_format: str = field(default_factory=lambda: os.getenv("NETGAMES_LOG_FORMAT", "console"))
    output_dir: str = field(default_factory=lambda: os.getenv("NETGAMES_OUTPUT_DIR", "results"))
    max_workers: int = field(default_factory=lambda: max(1, min(int(os.getenv("NETGAMES_MAX_WORKERS", "1")), 64)))
    master_seed: int = field(default_factory=lambda: int(os.getenv("NETGAMES_SEED", "0")))

    def validate(self) -> tuple[bool, Optional[str]]:
        """Validate configuration values"""
        if self.log_format not in ("console", "json"):
            return False, "NETGAMES_LOG_FORMAT must be console or json"

        if not self.output_dir:
            return False, "NETGAMES_OUTPUT_DIR must not be empty"

        if self.master_seed < 0:
            return False, "NETGAMES_SEED must be non-negative"

        return True, None


GraphModel = Literal["ER", "WS", "BA"]
Algorithm = Literal["alg1", "alg2", "correlation", "glasso"]
Mode = Literal["simulate", "learn", "sweep", "evaluate", "cluster"]


class GraphSpec(BaseModel):
    """Random-graph section; list fields are swept"""

    model_config = ConfigDict(extra="forbid")

    models: list[GraphModel] = Field(default_factory=lambda: ["ER", "WS", "BA"], min_length=1)
    n: int = Field(20, ge=2)
    p: list[float] = Field(default_factory=lambda: [0.2], min_length=1)
    # empty means the log2 degree rule
    ws_k: list[int] = Field(default_factory=list)
    ws_p: float = Field(0.2, ge=0.0, le=1.0)
    ba_m: list[int] = Field(default_factory=lambda: [1], min_length=1)

    @field_validator("p")
    @classmethod
    def _check_p(cls, v: list[float]) -> list[float]:
        if any(not 0.0 <= x <= 1.0 for x in v):
            raise ValueError("every edge probability must lie in [0, 1]")
        return v


class GameSpec(BaseModel):
    """Game section; list fields are swept"""

    model_config = ConfigDict(extra="forbid")

    K: list[int] = Field(default_factory=lambda: [50], min_length=1)
    target_rho: list[float] = Field(default_factory=lambda: [0.6], min_length=1)
    sign: Literal["complement", "substitute"] = "complement"
    regime: Literal["independent", "homophilous", "bandlimited"] = "independent"
    bands: list[tuple[int, int]] = Field(default_factory=lambda: [(1, 5)], min_length=1)
    noise_std: list[float] = Field(default_factory=lambda: [math.sqrt(0.1)], min_length=1)

    @field_validator("target_rho")
    @classmethod
    def _check_rho(cls, v: list[float]) -> list[float]:
        if any(not 0.0 < x < 1.0 for x in v):
            raise ValueError("every target spectral radius must lie in (0, 1)")
        return v

    @field_validator("noise_std")
    @classmethod
    def _check_noise(cls, v: list[float]) -> list[float]:
        if any(x < 0 for x in v):
            raise ValueError("noise standard deviations must be non-negative")
        return v

    @field_validator("K")
    @classmethod
    def _check_k(cls, v: list[int]) -> list[int]:
        if any(x < 0 for x in v):
            raise ValueError("game counts must be non-negative")
        return v

    @field_validator("bands")
    @classmethod
    def _check_bands(cls, v: list[tuple[int, int]]) -> list[tuple[int, int]]:
        if any(lo < 1 or hi < lo for lo, hi in v):
            raise ValueError("bands must satisfy 1 <= lo <= hi")
        return v


class GridSpec(BaseModel):
    """Hyperparameter grids; theta and lambda are log2 exponents, beta literal values"""

    model_config = ConfigDict(extra="forbid")

    theta1_log2: list[float] = Field(default_factory=lambda: [-4.0], min_length=1)
    theta2_log2: list[float] = Field(default_factory=lambda: [0.0], min_length=1)
    lambda_log2: list[float] = Field(default_factory=lambda: [-4.0], min_length=1)
    beta: list[float] = Field(default_factory=lambda: [0.1], min_length=1)

    @property
    def theta1(self) -> list[float]:
        return [2.0 ** e for e in self.theta1_log2]

    @property
    def theta2(self) -> list[float]:
        return [2.0 ** e for e in self.theta2_log2]

    @property
    def lambdas(self) -> list[float]:
        return [2.0 ** e for e in self.lambda_log2]


class SolverSettings(BaseModel):
    """Tolerances and caps shared by every solver run of an experiment"""

    model_config = ConfigDict(extra="forbid")

    inner_tol: float = Field(1e-8, gt=0)
    inner_max_iter: int = Field(20000, ge=1)
    bcd_tol: float = Field(1e-4, gt=0)
    bcd_max_iter: int = Field(50, ge=1)
    restarts: int = Field(1, ge=1)


class ExperimentConfig(BaseModel):
    """Full experiment description, loaded from JSON and CLI overrides"""

    model_config = ConfigDict(extra="forbid")

    mode: Mode = "sweep"
    graph: GraphSpec = Field(default_factory=GraphSpec)
    game: GameSpec = Field(default_factory=GameSpec)
    grid: GridSpec = Field(default_factory=GridSpec)
    solver: SolverSettings = Field(default_factory=SolverSettings)
    algorithms: list[Algorithm] = Field(default_factory=lambda: ["alg1"], min_length=1)
    repeats: int = Field(20, ge=1)
    seed: int = Field(0, ge=0)
    output: Optional[str] = None

    # data files for learn / evaluate / cluster
    actions_csv: Optional[str] = None
    truth_csv: Optional[str] = None
    graph_csv: Optional[str] = None
    benefits_csv: Optional[str] = None
    learned_benefits_csv: Optional[str] = None
    clusters: int = Field(2, ge=2)

    @model_validator(mode="after")
    def _check_mode_inputs(self) -> "ExperimentConfig":
        if self.mode == "learn" and not self.actions_csv:
            raise ValueError("actions_csv is required for mode 'learn'")
        if self.mode == "evaluate" and not (self.graph_csv and self.truth_csv):
            raise ValueError("graph_csv and truth_csv are required for mode 'evaluate'")
        if self.mode == "cluster" and not self.graph_csv:
            raise ValueError("graph_csv is required for mode 'cluster'")
        return self


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_overrides(data: dict, overrides: list[str]) -> dict:
    """Apply ``--key=value`` overrides; dotted keys address nested sections"""
    for item in overrides:
        if not item.startswith("--") or "=" not in item:
            raise ConfigError(f"override must look like --key=value, got {item!r}")
        key, raw = item[2:].split("=", 1)
        parts = key.replace("-", "_").split(".")
        node = data
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key!r} descends into a non-section value")
        node[parts[-1]] = _parse_value(raw)
    return data


def load_experiment_config(
    path: Optional[str] = None,
    overrides: Optional[list[str]] = None,
    mode: Optional[str] = None,
    defaults: Optional[dict] = None,
) -> ExperimentConfig:
    """Build an ExperimentConfig from defaults, an optional JSON file and overrides, in that order"""
    data: dict = dict(defaults or {})
    if path:
        try:
            data.update(json.loads(Path(path).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config file {path}: {e}") from e
        except (TypeError, ValueError) as e:
            raise ConfigError(f"config file {path} must hold a JSON object") from e

    apply_overrides(data, overrides or [])
    if mode:
        data["mode"] = mode

    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        fields = ", ".join(".".join(str(p) for p in err["loc"]) or "<root>" for err in e.errors())
        raise ConfigError(f"invalid config field(s) {fields}: {e}") from e
