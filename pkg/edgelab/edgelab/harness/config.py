"""
Experiment configuration.

A config is a flat key-value file in dotenv syntax, e.g.

    KIND=edges-mc
    MODEL=gaussian
    N=256
    RHO=0.111111
    TRIALS=20
    SEED=7

Keys are case-insensitive. Flags given on the command line override the
file. Grid keys (RANKS, T_FACTORS, M_GRID, N_GRID) take comma-separated
values.
"""

import hashlib
import json
from enum import Enum
from pathlib import Path
from typing import Any, Mapping

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from edgelab.config import UpdateMode
from edgelab.errors import ConfigError
from edgelab.samplers import Family, SamplerModel


class ExperimentKind(str, Enum):
    EDGES_MC = "edges-mc"
    WALK_LOWER = "walk-lower"
    WALK_UPPER = "walk-upper"
    TAIL_STP = "tail-stp"
    TAIL_WTPA = "tail-wtpa"
    DECOUPLING = "decoupling"
    MP_COMPARE = "mp-compare"
    CONVERGENCE = "convergence"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


# kinds that build a Gram matrix from m rows
NEEDS_M = frozenset(
    {ExperimentKind.EDGES_MC, ExperimentKind.WALK_LOWER, ExperimentKind.WALK_UPPER, ExperimentKind.MP_COMPARE}
)

DEFAULT_TRIALS = {
    ExperimentKind.EDGES_MC: 20,
    ExperimentKind.WALK_LOWER: 1,
    ExperimentKind.WALK_UPPER: 1,
    ExperimentKind.TAIL_STP: 10_000,
    ExperimentKind.TAIL_WTPA: 10_000,
    ExperimentKind.DECOUPLING: 10_000,
    ExperimentKind.MP_COMPARE: 1,
    ExperimentKind.CONVERGENCE: 10,
}

DEFAULT_EPS = {
    ExperimentKind.WALK_LOWER: 0.2,
    ExperimentKind.WALK_UPPER: 0.1,
}


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    kind: ExperimentKind = Field(description="Experiment to run")
    model: Family = Field(default=Family.GAUSSIAN, description="Sampler family")
    nu: float = Field(default=5.0, gt=2.0, description="Student-t degrees of freedom")
    tail_index: float = Field(default=3.0, gt=2.0, description="Pareto tail index")
    n: int = Field(ge=1, description="Dimension")
    m: int | None = Field(default=None, ge=1, description="Sample count")
    rho: float | None = Field(default=None, gt=0.0, description="Aspect ratio n / m")
    eps: float | None = Field(default=None, gt=0.0, lt=1.0, description="Walk accuracy parameter")
    trials: int | None = Field(default=None, ge=1, description="Trials, or Monte Carlo draws for tail kinds")
    seed: int = Field(default=0, ge=0, lt=2**64, description="Master seed")
    out: Path | None = Field(default=None, description="Output stem or directory")
    format: OutputFormat = Field(default=OutputFormat.CSV, description="Output format")
    n_jobs: int | None = Field(default=None, ge=1, description="Parallel trials")
    mode: UpdateMode | None = Field(default=None, description="Rank-one update path of the walks")
    ranks: list[int] | None = Field(default=None, description="Projection ranks for tail kinds")
    t_factors: list[float] = Field(default=[0.5, 1.0, 2.0], description="t as multiples of r")
    m_grid: list[float] = Field(default=[0.0, 4.0, 9.0, 25.0], description="Truncation levels M")
    n_grid: list[int] | None = Field(default=None, description="Dimensions for convergence / WTP-a")
    rank: int | None = Field(default=None, ge=1, description="Projection rank for decoupling")
    directions: int = Field(default=8, ge=0, description="Random directions per n for WTP-a")
    two_sided: bool = Field(default=False, description="Two-sided tail events")
    strict: bool = Field(default=False, description="Count failed tail cells as violations")

    @field_validator("ranks", "t_factors", "m_grid", "n_grid", mode="before")
    @classmethod
    def split_grid(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @model_validator(mode="after")
    def resolve_dimensions(self) -> "ExperimentConfig":
        """Derive m from rho by rounding n / rho and check the pair is consistent."""
        if self.rho is not None:
            derived = max(1, round(self.n / self.rho))
            if self.m is None:
                object.__setattr__(self, "m", derived)
            elif self.m != derived:
                raise ValueError(f"m={self.m} is inconsistent with n={self.n}, rho={self.rho}")
        if self.kind in NEEDS_M and self.m is None:
            raise ValueError(f"{self.kind.value} needs m or rho")
        if self.kind is ExperimentKind.CONVERGENCE and self.rho is None:
            raise ValueError("convergence needs rho")
        for grid in (self.n_grid, self.m_grid):
            if grid and any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError("grids must be increasing")
        return self

    @property
    def resolved_trials(self) -> int:
        return self.trials if self.trials is not None else DEFAULT_TRIALS[self.kind]

    @property
    def resolved_eps(self) -> float:
        return self.eps if self.eps is not None else DEFAULT_EPS.get(self.kind, 0.2)

    @property
    def resolved_ranks(self) -> list[int]:
        return self.ranks or sorted({max(1, self.n // 4), self.n})

    def sampler(self, dim: int | None = None) -> SamplerModel:
        return SamplerModel(
            family=self.model,
            dim=dim or self.n,
            seed=self.seed,
            nu=self.nu,
            tail_index=self.tail_index,
        )

    def canonical(self) -> dict[str, Any]:
        """Config echo without output-only keys."""
        return self.model_dump(mode="json", exclude={"out", "format", "n_jobs"})

    def config_hash(self) -> str:
        """sha256 of the canonical JSON echo."""
        payload = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()


def load_config(path: Path | None = None, overrides: Mapping[str, Any] | None = None) -> ExperimentConfig:
    """
    Read a key-value file and apply overrides (None values are ignored).

    Raises:
        ConfigError: If the file is missing or the merged values do not validate
    """
    values: dict[str, Any] = {}
    if path is not None:
        if not path.is_file():
            raise ConfigError(f"config file {path} does not exist")
        values.update({key.lower(): value for key, value in dotenv_values(path).items() if value is not None})
    values.update({key: value for key, value in (overrides or {}).items() if value is not None})

    try:
        return ExperimentConfig.model_validate(values)
    except ValidationError as e:
        raise ConfigError(f"Invalid experiment config: {e}") from e
