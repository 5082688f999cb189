"""
Barrier walks for the smallest and largest eigenvalue.
"""

from edgelab.barrier.common import SOFT_KINDS, Violation, ViolationKind
from edgelab.barrier.levels import LevelSets, h_excess, level_sets
from edgelab.barrier.lower import (
    LowerShift,
    LowerShiftParams,
    LowerWalkResult,
    LowerWalkState,
    construct_lower_shift,
    expected_shift_floor,
    feasible_lower_shift,
    q1,
    q2,
    regularity_shift_lower,
    run_lower_walk,
)
from edgelab.barrier.upper import (
    F2,
    Q1,
    Q2,
    Delta1,
    Delta2,
    UpperShiftParams,
    UpperWalkResult,
    UpperWalkState,
    alpha_condition_holds,
    construct_delta1,
    construct_delta2,
    delta1,
    delta2,
    regularity_shift_upper,
    run_upper_walk,
    select_alpha,
)

__all__ = [
    "F2",
    "Q1",
    "Q2",
    "SOFT_KINDS",
    "Delta1",
    "Delta2",
    "LevelSets",
    "LowerShift",
    "LowerShiftParams",
    "LowerWalkResult",
    "LowerWalkState",
    "UpperShiftParams",
    "UpperWalkResult",
    "UpperWalkState",
    "Violation",
    "ViolationKind",
    "alpha_condition_holds",
    "construct_delta1",
    "construct_delta2",
    "construct_lower_shift",
    "delta1",
    "delta2",
    "expected_shift_floor",
    "feasible_lower_shift",
    "h_excess",
    "level_sets",
    "q1",
    "q2",
    "regularity_shift_lower",
    "regularity_shift_upper",
    "run_lower_walk",
    "run_upper_walk",
    "select_alpha",
]
