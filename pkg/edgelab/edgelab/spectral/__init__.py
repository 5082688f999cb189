"""
Dense symmetric eigen-machinery: decomposition, rank-one updates and
Stieltjes potentials.
"""

from edgelab.spectral.core import (
    RankOneVector,
    SymmetricSpectrum,
    as_rank_one,
    eigendecompose,
    rank_one_update,
    sherman_morrison_trace,
    stieltjes_lower,
    stieltjes_upper,
)

__all__ = [
    "RankOneVector",
    "SymmetricSpectrum",
    "as_rank_one",
    "eigendecompose",
    "rank_one_update",
    "sherman_morrison_trace",
    "stieltjes_lower",
    "stieltjes_upper",
]
