"""
Experiment configuration: TOML files validated by pydantic models, with
environment fallbacks read from `.env` through python-dotenv.

Precedence is CLI flag > config file > environment > built-in default.
"""

import os
import tomllib
from pathlib import Path
from typing import Literal, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..errors import ConfigurationError
from .logger_utils import get_logger

logger = get_logger(__name__, "INFO")

ALGORITHMS = ("d-admm", "zhu-admm", "subgradient", "mm-ngs", "linear-consensus")
RHO_GRID = [1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0]
DEFAULT_OUT_DIR = "results"
DEFAULT_MAX_WORKERS = 4

NetworkModel = Literal[
    "suite", "erdos-renyi", "watts-strogatz", "barabasi-albert", "geometric", "lattice"
]
Algorithm = Literal["d-admm", "zhu-admm", "subgradient", "mm-ngs", "linear-consensus"]


class NetworkSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    model: NetworkModel = "suite"
    nodes: int = Field(10, ge=2)
    seed: int = 0
    p: Optional[float] = Field(None, gt=0, le=1)
    n: Optional[int] = Field(None, ge=1)
    d: Optional[float] = Field(None, gt=0)

    def generator_params(self) -> dict:
        return {
            key: value
            for key, value in (("p", self.p), ("n", self.n), ("d", self.d))
            if value is not None
        }


class ProblemSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: Literal["consensus", "bpdn", "lasso", "svm"] = "consensus"
    seed: int = 0
    matrix: Optional[Literal["gaussian", "dct"]] = None
    m: Optional[int] = Field(None, ge=1)
    n: Optional[int] = Field(None, ge=1)
    k: Optional[int] = Field(None, ge=1)
    noise_std: Optional[float] = Field(None, ge=0)
    beta: Optional[float] = Field(None, gt=0)
    sigma: Optional[float] = Field(None, gt=0)
    delta: Optional[float] = Field(None, gt=0)
    margin: Optional[float] = Field(None, gt=0)
    theta_mean: Optional[float] = None
    theta_std: Optional[float] = Field(None, ge=0)

    def generator_params(self) -> dict:
        return self.model_dump(exclude={"family", "seed"}, exclude_none=True)


class RunSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    algorithms: list[Algorithm] = Field(
        default_factory=lambda: ["d-admm", "zhu-admm", "mm-ngs"]
    )
    rho: list[float] = Field(default_factory=lambda: list(RHO_GRID))
    tol: float = 1e-4
    max_steps: Optional[int] = Field(None, ge=1)
    seeds: int = Field(1, ge=1)
    out_dir: Optional[str] = None
    max_workers: Optional[int] = Field(None, ge=1)
    inner_tol: float = Field(1e-6, gt=0)
    inner_max_sweeps: int = Field(50, ge=1)
    inner_forcing: float = Field(0.1, ge=0)
    zhu_self_term: Literal["degree", "single"] = "degree"

    @field_validator("rho")
    @classmethod
    def _positive_grid(cls, rho: list[float]) -> list[float]:
        if not rho:
            raise ValueError("rho grid must not be empty")
        if any(value <= 0 for value in rho):
            raise ValueError("every rho must be positive")
        return rho

    @field_validator("tol")
    @classmethod
    def _tolerance_range(cls, tol: float) -> float:
        if not 0 < tol < 1:
            raise ValueError("tol must lie in (0, 1)")
        return tol


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    network: NetworkSpec = Field(default_factory=NetworkSpec)
    problem: ProblemSpec = Field(default_factory=ProblemSpec)
    run: RunSpec = Field(default_factory=RunSpec)

    @property
    def max_steps(self) -> int:
        if self.run.max_steps is not None:
            return self.run.max_steps
        return 10_000 if self.problem.family == "svm" else 1000


class Settings(BaseModel):
    """Environment-level settings (DADMM_* variables)."""

    log_level: str = "INFO"
    log_file: Optional[str] = None
    out_dir: str = DEFAULT_OUT_DIR
    max_workers: int = Field(DEFAULT_MAX_WORKERS, ge=1)


def load_settings(env_file: Optional[Union[str, Path]] = None) -> Settings:
    load_dotenv(env_file)
    values = {
        "log_level": os.getenv("DADMM_LOG_LEVEL"),
        "log_file": os.getenv("DADMM_LOG_FILE"),
        "out_dir": os.getenv("DADMM_OUT_DIR"),
        "max_workers": os.getenv("DADMM_MAX_WORKERS"),
    }
    try:
        return Settings(**{key: value for key, value in values.items() if value})
    except ValidationError as e:
        raise ConfigurationError(f"Invalid DADMM_* environment: {e}") from e


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"Config file not found: {path}")
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(f"{path} is not valid TOML: {e}") from e

    try:
        config = ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid config {path}: {e}") from e
    logger.debug(f"Loaded config {path}: {config.model_dump()}")
    return config


def with_overrides(
    config: ExperimentConfig,
    settings: Optional[Settings] = None,
    seed: Optional[int] = None,
    seeds: Optional[int] = None,
    out_dir: Optional[str] = None,
    max_steps: Optional[int] = None,
    tol: Optional[float] = None,
    workers: Optional[int] = None,
) -> ExperimentConfig:
    """
    Layers CLI flags over the file values, and environment settings under
    them for the keys the file left unset.
    """
    data = config.model_dump()
    run = data["run"]
    if settings is not None:
        run["out_dir"] = run["out_dir"] or settings.out_dir
        run["max_workers"] = run["max_workers"] or settings.max_workers
    if seed is not None:
        data["network"]["seed"] = seed
        data["problem"]["seed"] = seed
    for key, value in (
        ("seeds", seeds),
        ("out_dir", out_dir),
        ("max_steps", max_steps),
        ("tol", tol),
        ("max_workers", workers),
    ):
        if value is not None:
            run[key] = value

    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid override: {e}") from e
