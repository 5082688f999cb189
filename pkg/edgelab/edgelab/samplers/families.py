"""
Draws for every sampler family and the covariance / Gram reductions.

Standardisation constants are analytic, so each coordinate has variance
exactly one:

    student_t(nu)        T / sqrt(nu / (nu - 2))
    symmetric_pareto(a)  +-x0 U^{-1/a},  x0 = sqrt((a - 2) / a)
    exponential_product  Laplace with scale 1 / sqrt(2)
    uniform_ball         direction * U^{1/n} * sqrt(n + 2)
"""

import logging
import math

import numpy as np
from numpy.typing import NDArray
from scipy import special

from edgelab.config import settings
from edgelab.errors import InvalidParameterError
from edgelab.samplers.models import Family, IsotropyReport, SampleBatch, SamplerModel, generator

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


def sample_rows(model: SamplerModel, size: int, rng: np.random.Generator) -> FloatArray:
    """Draw ``size`` independent vectors of ``model`` as the rows of a matrix."""
    if size < 0:
        raise InvalidParameterError(f"size must be non-negative, got {size}")

    n = model.dim
    shape = (size, n)

    match model.family:
        case Family.GAUSSIAN:
            return rng.standard_normal(shape)
        case Family.RADEMACHER:
            return 2.0 * rng.integers(0, 2, size=shape).astype(np.float64) - 1.0
        case Family.STUDENT_T:
            nu = model.nu
            return rng.standard_t(nu, size=shape) / math.sqrt(nu / (nu - 2.0))
        case Family.SYMMETRIC_PARETO:
            a = model.tail_index
            x0 = math.sqrt((a - 2.0) / a)
            # 1 - U lies in (0, 1], so the power stays finite
            magnitude = x0 * (1.0 - rng.random(shape)) ** (-1.0 / a)
            sign = 2.0 * rng.integers(0, 2, size=shape) - 1.0
            return sign * magnitude
        case Family.EXPONENTIAL_PRODUCT:
            return rng.laplace(0.0, 1.0 / math.sqrt(2.0), size=shape)
        case Family.UNIFORM_BALL:
            direction = rng.standard_normal(shape)
            direction /= np.linalg.norm(direction, axis=1, keepdims=True)
            radius = rng.power(n, size=size) * math.sqrt(n + 2.0)
            return direction * radius[:, None]
        case Family.ZERO:
            return np.zeros(shape)

    raise InvalidParameterError(f"unknown family {model.family!r}")


def sample_vector(model: SamplerModel, *, rng: np.random.Generator | None = None) -> FloatArray:
    """
    One draw of ``model``.

    Without an explicit generator the draw comes from the model's own
    seed, so repeated calls return the same vector.
    """
    if rng is None:
        rng = generator(model.seed)
    return sample_rows(model, 1, rng)[0]


def sample_batch(model: SamplerModel, m: int, *, stream: tuple[int, ...] = ()) -> SampleBatch:
    """
    m i.i.d. copies of ``model`` drawn from stream ``(seed, *stream)``.

    Identical (model, m, stream) give bit-identical rows.
    """
    if m < 1:
        raise InvalidParameterError(f"a batch needs at least one row, got m={m}")
    rows = sample_rows(model, m, generator(model.seed, *stream))
    return SampleBatch(rows, model, tuple(stream))


def gram_matrix(batch: SampleBatch) -> FloatArray:
    """A = sum_k X_k X_k^T."""
    if batch.m == 0:
        raise InvalidParameterError("empty batch")
    return batch.rows.T @ batch.rows


def empirical_covariance(batch: SampleBatch) -> FloatArray:
    """Sigma_hat = A / m."""
    return gram_matrix(batch) / batch.m


def isotropy_check(model: SamplerModel, m: int | None = None, *, stream: tuple[int, ...] = ()) -> IsotropyReport:
    """
    Empirical mean and covariance of m draws against the isotropy bounds

        |mean| <= 4 sqrt(n) / sqrt(m),   max_ij |Sigma_hat - I| <= 10 / sqrt(m)

    with m = 50 n by default.
    """
    n = model.dim
    m = 50 * n if m is None else m
    batch = sample_batch(model, m, stream=stream)

    mean = batch.rows.mean(axis=0)
    deviation = empirical_covariance(batch) - np.eye(n)
    return IsotropyReport(
        m=m,
        mean_norm=float(np.linalg.norm(mean)),
        mean_bound=4.0 * math.sqrt(n) / math.sqrt(m),
        covariance_error=float(np.max(np.abs(deviation))),
        covariance_bound=10.0 / math.sqrt(m),
    )


def _gaussian_abs_moment(p: float) -> float:
    return 2.0 ** (p / 2.0) * special.gamma((p + 1.0) / 2.0) / math.sqrt(math.pi)


def coordinate_abs_moment(model: SamplerModel, p: float) -> float | None:
    """
    E|xi|^p of one standardised coordinate, or None when there is no
    closed form. Infinite moments return inf.
    """
    match model.family:
        case Family.GAUSSIAN:
            return _gaussian_abs_moment(p)
        case Family.RADEMACHER:
            return 1.0
        case Family.ZERO:
            return 0.0
        case Family.STUDENT_T:
            nu = model.nu
            if p >= nu:
                return math.inf
            log_raw = (
                (p / 2.0) * math.log(nu)
                + special.gammaln((p + 1.0) / 2.0)
                + special.gammaln((nu - p) / 2.0)
                - 0.5 * math.log(math.pi)
                - special.gammaln(nu / 2.0)
            )
            return math.exp(log_raw) / (nu / (nu - 2.0)) ** (p / 2.0)
        case Family.EXPONENTIAL_PRODUCT:
            return special.gamma(p + 1.0) * 2.0 ** (-p / 2.0)
        case Family.SYMMETRIC_PARETO:
            a = model.tail_index
            if p >= a:
                return math.inf
            x0 = math.sqrt((a - 2.0) / a)
            return a * x0**p / (a - p)
    return None


def moment_bound(
    model: SamplerModel,
    kappa: float = 1.0,
    *,
    trials: int | None = None,
    directions: int = 8,
    stream: tuple[int, ...] = (),
) -> float:
    """
    K = sup_y E|<X, y>|^{2 + kappa} over unit directions y.

    For i.i.d. coordinates the coordinate direction and the Gaussian
    limit of spread directions are both analytic and the larger one is
    returned. Otherwise (and whenever ``trials`` is given) K is a Monte
    Carlo maximum over the coordinate direction, the diagonal direction
    and ``directions`` random unit vectors.
    """
    if kappa <= 0:
        raise InvalidParameterError(f"kappa must be positive, got {kappa}")
    p = 2.0 + kappa

    analytic = coordinate_abs_moment(model, p) if model.is_iid else None
    if analytic is not None and trials is None:
        if model.family is Family.ZERO:
            return 0.0
        return max(analytic, _gaussian_abs_moment(p))

    trials = trials or settings.chunk_size
    n = model.dim
    rng = generator(model.seed, *stream, 0)
    frame = [np.eye(n)[0], np.full(n, 1.0 / math.sqrt(n))]
    random_dirs = rng.standard_normal((directions, n))
    random_dirs /= np.linalg.norm(random_dirs, axis=1, keepdims=True)
    frame.extend(random_dirs)
    basis = np.stack(frame, axis=1)

    rows = sample_rows(model, trials, generator(model.seed, *stream, 1))
    estimate = float(np.max(np.mean(np.abs(rows @ basis) ** p, axis=0)))
    logger.debug("Monte Carlo moment bound for %s: %.4f", model.label, estimate)
    if analytic is not None:
        return max(estimate, analytic)
    return estimate
