"""
Tail-projection property testers.
"""

from edgelab.tails.projections import ProjectionSpec, coordinate_projection, random_projection
from edgelab.tails.properties import (
    DecouplingReport,
    TailEstimate,
    TailFunctions,
    TailReport,
    TruncatedMomentReport,
    check_stp,
    check_wtp_a,
    check_wtp_b,
    decoupled_moment_check,
    estimate_projection_tail,
    projection_excess,
)

__all__ = [
    "DecouplingReport",
    "ProjectionSpec",
    "TailEstimate",
    "TailFunctions",
    "TailReport",
    "TruncatedMomentReport",
    "check_stp",
    "check_wtp_a",
    "check_wtp_b",
    "coordinate_projection",
    "decoupled_moment_check",
    "estimate_projection_tail",
    "projection_excess",
    "random_projection",
]
