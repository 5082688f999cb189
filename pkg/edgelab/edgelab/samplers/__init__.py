"""
Seeded generators of centered isotropic random vectors.
"""

from edgelab.samplers.families import (
    empirical_covariance,
    gram_matrix,
    isotropy_check,
    moment_bound,
    sample_batch,
    sample_rows,
    sample_vector,
)
from edgelab.samplers.models import (
    Family,
    IsotropyReport,
    SampleBatch,
    SamplerModel,
    generator,
)

__all__ = [
    "Family",
    "IsotropyReport",
    "SampleBatch",
    "SamplerModel",
    "empirical_covariance",
    "generator",
    "gram_matrix",
    "isotropy_check",
    "moment_bound",
    "sample_batch",
    "sample_rows",
    "sample_vector",
]
