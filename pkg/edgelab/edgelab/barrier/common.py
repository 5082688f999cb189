"""
Pieces shared by the lower and upper barrier walks.
"""

import math
from dataclasses import dataclass
from enum import Enum

from edgelab.errors import InvalidParameterError
from edgelab.samplers import SampleBatch, SamplerModel, sample_batch

# relative slack for potential comparisons along a walk
POTENTIAL_SLACK = 1e-9


class ViolationKind(str, Enum):
    BARRIER = "barrier"
    POTENTIAL = "potential"
    BUDGET = "budget"
    CERTIFICATE = "certificate"
    LEVEL_RATIO = "level_ratio"
    ALPHA_BUDGET = "alpha_budget"
    DELTA1_BOUND = "delta1_bound"
    GAP_FALLBACK = "gap_fallback"
    COMPOSED_CONDITION = "composed_condition"
    RESIDUAL_LEVELS = "residual_levels"
    CONCENTRATION = "concentration"


SOFT_KINDS = frozenset(
    {
        ViolationKind.GAP_FALLBACK,
        ViolationKind.COMPOSED_CONDITION,
        ViolationKind.RESIDUAL_LEVELS,
        ViolationKind.CONCENTRATION,
    }
)


@dataclass(frozen=True, slots=True)
class Violation:
    step: int
    kind: ViolationKind
    message: str

    @property
    def is_hard(self) -> bool:
        return self.kind not in SOFT_KINDS

    def __str__(self) -> str:
        return f"step {self.step}: {self.kind.value}: {self.message}"


def resolve_batch(
    source: SampleBatch | SamplerModel, m: int | None, stream: tuple[int, ...]
) -> SampleBatch:
    """Use an explicit batch as is or draw m rows of a model."""
    if isinstance(source, SampleBatch):
        if m is not None and m != source.m:
            raise InvalidParameterError(f"batch has {source.m} rows, m={m} was requested")
        return source
    if m is None:
        raise InvalidParameterError("m is required when walking a sampler model")
    return sample_batch(source, m, stream=stream)


def exceeds(value: float, reference: float) -> bool:
    """value > reference beyond the relative potential slack."""
    return value > reference + POTENTIAL_SLACK * max(1.0, abs(reference))


def floor_log4(value: float) -> int:
    """Largest integer j with 4^j <= value (value >= 1)."""
    j = int(math.floor(math.log(value, 4)))
    while 4.0 ** (j + 1) <= value:
        j += 1
    while j > 0 and 4.0**j > value:
        j -= 1
    return j
