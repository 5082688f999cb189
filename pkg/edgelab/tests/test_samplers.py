import math

import numpy as np
import pytest

from edgelab.errors import InvalidParameterError
from edgelab.samplers import (
    Family,
    SampleBatch,
    SamplerModel,
    empirical_covariance,
    gram_matrix,
    isotropy_check,
    moment_bound,
    sample_batch,
    sample_vector,
)
from edgelab.samplers.families import coordinate_abs_moment

GAUSSIAN_THIRD = 2.0 * math.sqrt(2.0 / math.pi)


def model(family: Family, dim: int = 4, **kwargs) -> SamplerModel:
    return SamplerModel(family=family, dim=dim, **kwargs)


class TestSamplerModel:
    @pytest.mark.parametrize(
        "kwargs",
        [{"nu": 2.0}, {"tail_index": 1.5}, {"seed": -1}, {"seed": 2**64}, {"dim": 0}],
    )
    def test_rejects_out_of_range(self, kwargs):
        values = {"family": Family.STUDENT_T, "dim": 3, **kwargs}
        with pytest.raises(ValueError):
            SamplerModel(**values)

    def test_config_block(self):
        original = model(Family.SYMMETRIC_PARETO, dim=7, seed=42, tail_index=3.5)
        block = original.to_config()
        assert block["family"] == "symmetric_pareto"
        assert SamplerModel.from_config(block) == original

    def test_labels(self):
        assert model(Family.STUDENT_T, nu=3).label == "student_t(nu=3)"
        assert model(Family.SYMMETRIC_PARETO).label == "symmetric_pareto(a=3)"
        assert model(Family.GAUSSIAN).label == "gaussian"

    def test_family_flags(self):
        assert model(Family.RADEMACHER).is_iid
        assert not model(Family.UNIFORM_BALL).is_iid
        assert model(Family.UNIFORM_BALL).is_log_concave
        assert not model(Family.STUDENT_T).is_log_concave
        assert not model(Family.ZERO).is_isotropic

    def test_derived_models_are_validated(self):
        original = model(Family.STUDENT_T, dim=5, seed=1, nu=4)
        assert original.with_seed(9) == model(Family.STUDENT_T, dim=5, seed=9, nu=4)
        assert original.with_dim(12) == model(Family.STUDENT_T, dim=12, seed=1, nu=4)
        with pytest.raises(ValueError):
            original.with_seed(-1)
        with pytest.raises(ValueError):
            original.with_dim(0)


class TestDraws:
    def test_rademacher_support(self):
        x = sample_vector(model(Family.RADEMACHER, dim=3, seed=1))
        assert set(np.unique(x)) <= {-1.0, 1.0}

    def test_zero_family(self):
        assert not sample_batch(model(Family.ZERO), 5).rows.any()

    def test_uniform_ball(self):
        rows = sample_batch(model(Family.UNIFORM_BALL, dim=2, seed=3), 100_000).rows
        assert np.all(np.linalg.norm(rows, axis=1) <= 2.0 + 1e-12)
        assert np.allclose(rows.var(axis=0), 1.0, atol=0.02)

    def test_student_t_is_standardised(self):
        rows = sample_batch(model(Family.STUDENT_T, dim=2, seed=4, nu=5), 200_000).rows
        assert np.allclose((rows**2).mean(axis=0), 1.0, atol=0.03)

    def test_batches_are_reproducible(self):
        gaussian = model(Family.GAUSSIAN, dim=5, seed=9)
        first = sample_batch(gaussian, 10, stream=(2,))
        second = sample_batch(gaussian, 10, stream=(2,))
        other = sample_batch(gaussian, 10, stream=(3,))
        assert np.array_equal(first.rows, second.rows)
        assert not np.array_equal(first.rows, other.rows)
        assert first.stream == (2,)

    def test_sample_vector_uses_model_seed(self):
        gaussian = model(Family.GAUSSIAN, seed=5)
        assert np.array_equal(sample_vector(gaussian), sample_vector(gaussian))
        assert not np.array_equal(sample_vector(gaussian), sample_vector(gaussian.with_seed(6)))

    def test_empty_batch_rejected(self):
        with pytest.raises(InvalidParameterError):
            sample_batch(model(Family.GAUSSIAN), 0)

    @pytest.mark.parametrize(
        "family",
        [Family.GAUSSIAN, Family.RADEMACHER, Family.EXPONENTIAL_PRODUCT, Family.UNIFORM_BALL],
    )
    def test_isotropy(self, family):
        report = isotropy_check(model(family, dim=8, seed=17))
        assert report.m == 400
        assert report.passed


class TestReductions:
    def test_covariance_examples(self):
        assert np.allclose(empirical_covariance(SampleBatch.from_rows([[1, 0], [0, 1]])), np.eye(2) / 2)
        assert np.allclose(empirical_covariance(SampleBatch.from_rows([[1, 1]])), np.ones((2, 2)))

    def test_gram_examples(self):
        assert np.allclose(gram_matrix(SampleBatch.from_rows([[1, 0], [0, 1]])), np.eye(2))
        x = np.array([1.0, -2.0, 2.0])
        gram = gram_matrix(SampleBatch.from_rows([x]))
        assert np.allclose(gram, np.outer(x, x))
        assert np.linalg.eigvalsh(gram)[-1] == pytest.approx(x @ x)


class TestMoments:
    @pytest.mark.parametrize("family", [f for f in Family if f not in (Family.ZERO, Family.UNIFORM_BALL)])
    def test_second_moment_is_one(self, family):
        assert coordinate_abs_moment(model(family), 2.0) == pytest.approx(1.0)

    def test_infinite_moments(self):
        assert coordinate_abs_moment(model(Family.STUDENT_T, nu=3), 3.0) == math.inf
        assert coordinate_abs_moment(model(Family.SYMMETRIC_PARETO, tail_index=3), 4.0) == math.inf

    def test_gaussian_bound(self):
        assert moment_bound(model(Family.GAUSSIAN)) == pytest.approx(GAUSSIAN_THIRD)

    def test_rademacher_bound_uses_spread_directions(self):
        # |<X, e_1>|^3 = 1, spread directions approach the Gaussian moment
        assert moment_bound(model(Family.RADEMACHER)) == pytest.approx(GAUSSIAN_THIRD)

    def test_zero_bound(self):
        assert moment_bound(model(Family.ZERO)) == 0.0

    def test_monte_carlo_bound(self):
        k = moment_bound(model(Family.UNIFORM_BALL, dim=6, seed=2), trials=20_000)
        assert 1.0 < k < 2.5

    def test_kappa_must_be_positive(self):
        with pytest.raises(InvalidParameterError):
            moment_bound(model(Family.GAUSSIAN), kappa=0.0)

    @pytest.mark.slow
    def test_pareto_fourth_moment_keeps_growing(self):
        # E|xi|^4 is infinite for a = 3, so sample means grow like m^(1/3)
        def median_fourth_moment(m: int) -> float:
            estimates = [
                np.mean(sample_batch(model(Family.SYMMETRIC_PARETO, dim=1, seed=seed, tail_index=3), m).rows ** 4)
                for seed in range(25)
            ]
            return float(np.median(estimates))

        moments = [median_fourth_moment(m) for m in (1_000, 10_000, 100_000)]
        assert moments[0] < moments[1] < moments[2]
        assert moments[2] > 2.0 * moments[0]
