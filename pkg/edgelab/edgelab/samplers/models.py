"""
Sampler model descriptions, sample batches and the seeded RNG contract.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

FloatArray = NDArray[np.float64]

MAX_SEED = 2**64


class Family(str, Enum):
    """Isotropic distribution families."""

    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"
    STUDENT_T = "student_t"
    SYMMETRIC_PARETO = "symmetric_pareto"
    EXPONENTIAL_PRODUCT = "exponential_product"
    UNIFORM_BALL = "uniform_ball"
    ZERO = "zero"


# Families whose coordinates are i.i.d. copies of one scalar law.
IID_FAMILIES = frozenset(
    {
        Family.GAUSSIAN,
        Family.RADEMACHER,
        Family.STUDENT_T,
        Family.SYMMETRIC_PARETO,
        Family.EXPONENTIAL_PRODUCT,
        Family.ZERO,
    }
)

LOG_CONCAVE_FAMILIES = frozenset({Family.GAUSSIAN, Family.EXPONENTIAL_PRODUCT, Family.UNIFORM_BALL})


class SamplerModel(BaseModel):
    """
    A named isotropic distribution in dimension ``dim``.

    ``nu`` is only read by student_t, ``tail_index`` only by
    symmetric_pareto. The ``zero`` family draws all-zero vectors and is
    the one family that is not isotropic.
    """

    model_config = ConfigDict(frozen=True)

    family: Family = Field(description="Distribution family")
    dim: int = Field(ge=1, description="Dimension n of the vectors")
    seed: int = Field(default=0, ge=0, lt=MAX_SEED, description="64-bit master seed")
    nu: float = Field(default=5.0, gt=2.0, description="Student-t degrees of freedom")
    tail_index: float = Field(default=3.0, gt=2.0, description="Pareto tail index a")

    @property
    def is_iid(self) -> bool:
        return self.family in IID_FAMILIES

    @property
    def is_log_concave(self) -> bool:
        return self.family in LOG_CONCAVE_FAMILIES

    @property
    def is_isotropic(self) -> bool:
        return self.family is not Family.ZERO

    @property
    def label(self) -> str:
        """Short name used in report rows, e.g. ``student_t(nu=3)``."""
        if self.family is Family.STUDENT_T:
            return f"student_t(nu={self.nu:g})"
        if self.family is Family.SYMMETRIC_PARETO:
            return f"symmetric_pareto(a={self.tail_index:g})"
        return self.family.value

    def with_seed(self, seed: int) -> "SamplerModel":
        return self.model_validate({**self.model_dump(), "seed": seed})

    def with_dim(self, dim: int) -> "SamplerModel":
        return self.model_validate({**self.model_dump(), "dim": dim})

    def to_config(self) -> dict[str, str]:
        """Flat key-value block: family, nu, tail_index, dim, seed."""
        return {
            "family": self.family.value,
            "nu": repr(self.nu),
            "tail_index": repr(self.tail_index),
            "dim": str(self.dim),
            "seed": str(self.seed),
        }

    @classmethod
    def from_config(cls, block: Mapping[str, str | None]) -> "SamplerModel":
        values = {key: value for key, value in block.items() if value not in (None, "")}
        return cls.model_validate(values)


def generator(seed: int, *stream: int) -> np.random.Generator:
    """
    Counter-based generator for one named stream of an experiment.

    ``generator(seed, trial, chunk)`` is independent of every other
    (trial, chunk) pair and of the order in which streams are created.
    """
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(sequence))


@dataclass(frozen=True, slots=True, eq=False)
class SampleBatch:
    """
    m sample rows in R^n drawn from ``model`` on stream ``stream``.
    """

    rows: FloatArray
    model: SamplerModel
    stream: tuple[int, ...] = ()

    @property
    def m(self) -> int:
        return int(self.rows.shape[0])

    @property
    def n(self) -> int:
        return int(self.rows.shape[1])

    @classmethod
    def from_rows(cls, rows, model: SamplerModel | None = None) -> "SampleBatch":
        """Wrap explicit rows, e.g. hand-written test data."""
        array = np.atleast_2d(np.asarray(rows, dtype=np.float64))
        if model is None:
            model = SamplerModel(family=Family.GAUSSIAN, dim=array.shape[1])
        return cls(array, model)


@dataclass(frozen=True, slots=True)
class IsotropyReport:
    m: int
    mean_norm: float
    mean_bound: float
    covariance_error: float
    covariance_bound: float

    @property
    def passed(self) -> bool:
        return self.mean_norm <= self.mean_bound and self.covariance_error <= self.covariance_bound
