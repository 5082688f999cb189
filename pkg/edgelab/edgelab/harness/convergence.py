"""
Normalised edge errors as the dimension grows at a fixed aspect ratio.
"""

import logging
import math
from typing import Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy import linalg

from edgelab.config import settings
from edgelab.errors import InvalidParameterError
from edgelab.samplers import SamplerModel, gram_matrix, sample_batch

logger = logging.getLogger(__name__)


def _extreme_eigenvalues(model: SamplerModel, m: int, stream: tuple[int, ...]) -> tuple[float, float]:
    values = linalg.eigvalsh(gram_matrix(sample_batch(model, m, stream=stream)))
    return float(max(values[0], 0.0)), float(values[-1])


def convergence_table(
    model: SamplerModel,
    rho: float,
    n_grid: Sequence[int],
    trials: int,
    *,
    n_jobs: int | None = None,
) -> pd.DataFrame:
    """
    Mean lambda_min(A) / (sqrt(m) - sqrt(n))^2 and lambda_max(A) / (sqrt(m) + sqrt(n))^2
    per n, with m = round(n / rho).

    A row whose lower normaliser vanishes (m = n) is flagged undefined and
    its lower ratio is NaN.

    Raises:
        InvalidParameterError: If n_grid is empty or not increasing, or rho <= 0
    """
    if rho <= 0:
        raise InvalidParameterError(f"rho must be positive, got {rho}")
    if not n_grid or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise InvalidParameterError("n_grid must be non-empty and increasing")
    if trials < 1:
        raise InvalidParameterError(f"trials must be positive, got {trials}")

    cells = [(index, int(n), max(1, round(n / rho))) for index, n in enumerate(n_grid)]
    jobs = [
        delayed(_extreme_eigenvalues)(model.with_dim(n), m, (index, trial))
        for index, n, m in cells
        for trial in range(trials)
    ]
    values = Parallel(n_jobs=n_jobs or settings.n_jobs)(jobs)

    rows = []
    for position, (_, n, m) in enumerate(cells):
        chunk = np.array(values[position * trials : (position + 1) * trials])
        lower_norm = (math.sqrt(m) - math.sqrt(n)) ** 2
        upper_norm = (math.sqrt(m) + math.sqrt(n)) ** 2
        defined = lower_norm > 0.0
        rows.append(
            {
                "n": n,
                "m": m,
                "trials": trials,
                "lambda_min_ratio": float(chunk[:, 0].mean() / lower_norm) if defined else math.nan,
                "lambda_max_ratio": float(chunk[:, 1].mean() / upper_norm),
                "lower_normaliser": lower_norm,
                "upper_normaliser": upper_norm,
                "defined": defined,
            }
        )
        logger.debug("convergence n=%d m=%d done", n, m)
    return pd.DataFrame(rows)
