"""
Result containers and output files.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from edgelab import __version__
from edgelab.config import settings
from edgelab.harness.config import ExperimentConfig, OutputFormat

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class EdgeResult:
    """
    Extreme eigenvalues of Sigma_hat over independent trials.

    Targets are the Marchenko-Pastur edges (1 -+ sqrt(rho))^2 for rho = n / m.
    """

    n: int
    m: int
    lambda_min: np.ndarray
    lambda_max: np.ndarray

    def __post_init__(self) -> None:
        if np.any(self.lambda_min > self.lambda_max):
            raise ValueError("lambda_min exceeds lambda_max in some trial")
        # eigensolver noise on rank-deficient covariances
        self.lambda_min = np.clip(self.lambda_min, 0.0, None)

    @property
    def rho(self) -> float:
        return self.n / self.m

    @property
    def target_min(self) -> float:
        return (1.0 - math.sqrt(self.rho)) ** 2

    @property
    def target_max(self) -> float:
        return (1.0 + math.sqrt(self.rho)) ** 2

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "trial": np.arange(self.lambda_min.size),
                "lambda_min": self.lambda_min,
                "lambda_max": self.lambda_max,
            }
        )

    def summary(self) -> dict[str, float | int]:
        mean_min = float(self.lambda_min.mean())
        mean_max = float(self.lambda_max.mean())
        ddof = 1 if self.lambda_min.size > 1 else 0
        return {
            "n": self.n,
            "m": self.m,
            "rho": self.rho,
            "trials": int(self.lambda_min.size),
            "mean_lambda_min": mean_min,
            "std_lambda_min": float(self.lambda_min.std(ddof=ddof)),
            "mean_lambda_max": mean_max,
            "std_lambda_max": float(self.lambda_max.std(ddof=ddof)),
            "target_min": self.target_min,
            "target_max": self.target_max,
            "error_min": mean_min - self.target_min,
            "error_max": mean_max - self.target_max,
            "relative_error_max": (mean_max - self.target_max) / self.target_max,
        }


@dataclass(slots=True)
class ExperimentOutput:
    """Tables and summary of one experiment."""

    tables: dict[str, pd.DataFrame]
    summary: dict[str, Any]
    violations: list[str] = field(default_factory=list)
    failed_cells: int = 0

    @property
    def hard_violations(self) -> int:
        return len(self.violations)


class RunMetadata(BaseModel):
    """JSON metadata written next to every result."""

    kind: str = Field(description="Experiment kind")
    config: dict[str, Any] = Field(description="Config echo")
    config_hash: str = Field(description="sha256 of the config echo")
    seed: int = Field(description="Master seed")
    version: str = Field(description="edgelab version")
    exit_code: int = Field(description="Process exit status")
    summary: dict[str, Any] = Field(default_factory=dict)
    violations: list[str] = Field(default_factory=list)
    tables: dict[str, Any] = Field(default_factory=dict, description="Table files, or records in json format")


def output_stem(config: ExperimentConfig) -> Path:
    """
    Base path for output files.

    Without ``out`` files go to the results directory setting; an ``out``
    naming a directory gets ``<kind>-<hash>`` appended.
    """
    default_name = f"{config.kind.value}-{config.config_hash()[:12]}"
    out = config.out
    if out is None:
        return settings.results_dir / default_name
    if out.is_dir():
        return out / default_name
    return out.with_suffix("") if out.suffix in (".csv", ".json") else out


def to_jsonable(value: Any) -> Any:
    """Numpy scalars and containers as plain JSON values, NaN as null."""
    if isinstance(value, dict):
        return {key: to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, (np.floating, float)):
        return None if math.isnan(value) else float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def write_outputs(config: ExperimentConfig, output: ExperimentOutput, exit_code: int) -> list[Path]:
    """
    Write tables and metadata.

    csv: one ``<stem>.<table>.csv`` per table plus ``<stem>.json``.
    json: a single ``<stem>.json`` holding the tables as records.
    """
    stem = output_stem(config)
    stem.parent.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    tables: dict[str, Any] = {}
    if config.format is OutputFormat.CSV:
        for name, frame in output.tables.items():
            path = stem.parent / f"{stem.name}.{name}.csv"
            frame.to_csv(path, index=False)
            tables[name] = path.name
            written.append(path)
    else:
        tables = {name: to_jsonable(frame.to_dict(orient="records")) for name, frame in output.tables.items()}

    metadata = RunMetadata(
        kind=config.kind.value,
        config=config.canonical(),
        config_hash=config.config_hash(),
        seed=config.seed,
        version=__version__,
        exit_code=exit_code,
        summary=to_jsonable(output.summary),
        violations=output.violations,
        tables=tables,
    )
    meta_path = stem.parent / f"{stem.name}.json"
    meta_path.write_text(metadata.model_dump_json(indent=2))
    written.append(meta_path)

    for path in written:
        logger.info("wrote %s", path)
    return written
