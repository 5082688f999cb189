"""
Marchenko-Pastur reference law.
"""

from edgelab.mp.law import (
    ESD,
    MPParams,
    ks_distance,
    mp_cdf,
    mp_density,
    mp_edges,
    mp_quantile,
    mp_table,
    mp_total_mass,
)

__all__ = [
    "ESD",
    "MPParams",
    "ks_distance",
    "mp_cdf",
    "mp_density",
    "mp_edges",
    "mp_quantile",
    "mp_table",
    "mp_total_mass",
]
