import math

import numpy as np
import pytest
from scipy import linalg

from edgelab.barrier import (
    F2,
    Q1,
    Q2,
    UpperShiftParams,
    ViolationKind,
    alpha_condition_holds,
    construct_delta1,
    construct_delta2,
    delta1,
    delta2,
    regularity_shift_upper,
    run_upper_walk,
    select_alpha,
)
from edgelab.errors import BarrierViolationError, InvalidParameterError
from edgelab.samplers import Family, SamplerModel, gram_matrix, sample_batch
from edgelab.spectral import SymmetricSpectrum


def params(eps=0.25, alpha=0.1, gamma=1.0, **kwargs) -> UpperShiftParams:
    return UpperShiftParams(eps=eps, alpha=alpha, gamma=gamma, **kwargs)


class TestAlpha:
    def test_closed_form(self):
        assert select_alpha(4.0, 0.1) == pytest.approx(0.1 * (2 / 3) / (2.1 - 1 / 3))
        assert select_alpha(4.0, 0.1) == pytest.approx(0.037736, abs=1e-6)
        assert select_alpha(1.0, 0.05) == pytest.approx(0.016129, abs=1e-6)

    def test_vanishes_with_eps(self):
        assert select_alpha(4.0, 1e-9) < 1e-9

    @pytest.mark.parametrize("gamma, eps", [(1.0, 0.05), (4.0, 0.1), (9.0, 0.0625)])
    def test_alpha_is_maximal(self, gamma, eps):
        alpha = select_alpha(gamma, eps)
        assert alpha_condition_holds(alpha, gamma, eps)
        assert not alpha_condition_holds(alpha * 1.0001, gamma, eps)

    @pytest.mark.parametrize("gamma, eps", [(0.0, 0.1), (4.0, 0.0), (4.0, 0.3)])
    def test_rejects_bad_arguments(self, gamma, eps):
        with pytest.raises(InvalidParameterError):
            select_alpha(gamma, eps)

    def test_params_check_alpha_ceiling(self):
        # sqrt(gamma) / (1 + sqrt(gamma)) = 1/2 for gamma = 1
        with pytest.raises(InvalidParameterError):
            params(alpha=0.5)
        selected = UpperShiftParams.select(0.1, 4.0)
        assert selected.alpha == pytest.approx(select_alpha(4.0, 0.1))


class TestQuadraticForms:
    def test_q1_example(self, diagonal):
        assert Q1(diagonal(1.0), [2.0], 2.0, 1.0) == pytest.approx(2.0)

    def test_zero_vector(self, diagonal):
        spectrum = diagonal(1.0, 0.0)
        assert Q1(spectrum, np.zeros(2), 3.0) == 0.0
        assert Q2(spectrum, np.zeros(2), 3.0, 1.0) == 0.0
        assert F2(spectrum, np.zeros(2), 3.0) == 0.0

    def test_q2_and_f2_example(self, diagonal):
        spectrum = diagonal(0.0, 0.0)
        assert F2(spectrum, [1.0, 0.0], 1.0, 1.0) == pytest.approx(0.25)
        assert Q2(spectrum, [1.0, 0.0], 1.0, 1.0) == pytest.approx(0.25)

    def test_q2_is_f2_over_delta(self, diagonal):
        spectrum = diagonal(5.0, 2.0, 1.0)
        x = [1.0, -2.0, 0.5]
        for delta in (0.1, 1.0, 7.0):
            assert Q2(spectrum, x, 6.0, delta) == pytest.approx(F2(spectrum, x, 6.0, delta) / delta)

    def test_q2_needs_positive_shift(self, diagonal):
        with pytest.raises(InvalidParameterError):
            Q2(diagonal(0.0), [1.0], 1.0, 0.0)

    def test_barrier_below_spectrum(self, diagonal):
        with pytest.raises(BarrierViolationError):
            Q1(diagonal(2.0), [1.0], 2.0)


class TestDelta1:
    def test_zero_vector(self, diagonal):
        spectrum = diagonal(96.5, 96.5, 0.0, 0.0)
        assert delta1(spectrum, np.zeros(4), 100.0, params()) == 0.0

    def test_level_term(self, diagonal):
        # |I_1| = 2, h_1 = 3 > eps^2 2 sqrt(2)
        spectrum = diagonal(96.5, 96.5, 0.0, 0.0)
        result = construct_delta1(spectrum, [2.0, 1.0, 0.0, 0.0], 100.0, params())
        assert result.value == pytest.approx(12.0)
        assert result.norm_term == 0.0
        assert result.level_terms == {1: pytest.approx(12.0)}
        assert result.holds

    def test_norm_term(self):
        # eps |x|^2 = 8 >= n, so Delta_1 = eps^{-1/2} |x|^2 = 16 n
        x = [4.0, 4.0, 0.0, 0.0]
        assert delta1(SymmetricSpectrum.zero(4), x, 100.0, params()) == pytest.approx(64.0)

    def test_potential_must_be_below_one(self):
        with pytest.raises(InvalidParameterError):
            construct_delta1(SymmetricSpectrum.zero(4), np.ones(4), 2.0, params())


class TestDelta2:
    def test_zero_vector(self, diagonal):
        result = construct_delta2(diagonal(0.0), [0.0], 2.0, params())
        assert result.value == 0.0
        assert result.branch == 0
        assert result.holds

    def test_closed_form_branch(self, diagonal):
        # F2(0) = 0.01, 1.1 * 0.01 <= 0.1 * 2 * 0.4
        result = construct_delta2(diagonal(0.0), [0.1], 2.0, params())
        assert result.branch == 1
        assert result.value == pytest.approx(0.0275)
        assert delta2(diagonal(0.0), [0.1], 2.0, params()) == pytest.approx(0.0275)

    def test_doubling_branch(self, diagonal):
        # Q2(Delta) = 18 / (Delta (2 + Delta)) <= 0.4 first at Delta = 2^2 * 2
        result = construct_delta2(diagonal(0.0), [3.0], 2.0, params())
        assert result.branch == 2
        assert result.doublings == 2
        assert result.value == pytest.approx(8.0)
        assert result.q2 <= result.budget

    def test_potential_budget_precondition(self, diagonal):
        with pytest.raises(InvalidParameterError):
            construct_delta2(diagonal(0.0), [0.1], 1.0, params())


class TestRegularityShift:
    def test_one_step(self):
        # m(2) - m(3) = 2/3 > 1/2, m(3) - m(4) = 1/3
        assert regularity_shift_upper(SymmetricSpectrum.zero(4), 2.0, 0.25, 4) == 1

    def test_far_barrier(self, diagonal):
        spectrum = diagonal(3.0, 1.0)
        assert regularity_shift_upper(spectrum, 3.0 + 200.0, 0.25, 2) == 0

    def test_loose_threshold(self, diagonal):
        assert regularity_shift_upper(diagonal(0.0), 1.0, 0.5, 1) == 0


class TestUpperWalk:
    def test_zero_vectors(self):
        zero = SamplerModel(family=Family.ZERO, dim=4)
        result = run_upper_walk(zero, m=16, eps=0.1)
        u0 = 4.0 + 8.0
        assert result.u_final == pytest.approx(u0 + result.cumulative_shift)
        assert all(s.delta1 == 0.0 and s.delta2 == 0.0 for s in result.trajectory)
        assert not result.hard_violations

    def test_gaussian_walk(self, gaussian):
        model = gaussian(32, seed=8)
        result = run_upper_walk(model, m=256, eps=0.25, stream=(0,))

        lambda_max = linalg.eigvalsh(gram_matrix(sample_batch(model, 256, stream=(0,))))[-1]
        assert result.lambda_max == pytest.approx(lambda_max, rel=1e-8)
        assert result.u_final > lambda_max
        assert result.ratio >= 1.0
        assert all(s.u > s.lambda_max for s in result.trajectory)
        assert result.cumulative_shift <= result.shift_budget

        frame = result.to_frame()
        assert list(frame.columns) == [
            "k", "u_k", "lambda_max", "potential", "Delta1", "Delta2", "Delta_R", "max_level_ratio", "violations",
        ]
        summary = result.summary()
        assert summary["delta1_trend_bound"] == pytest.approx(32.0 * 2.0 * math.sqrt(2.0 / math.pi) * 0.5)
        assert summary["alpha"] == pytest.approx(select_alpha(8.0, 0.25))

    def test_moment_bound_override(self, gaussian):
        result = run_upper_walk(gaussian(16, seed=1), params(eps=0.2, alpha=0.05, gamma=4.0, moment_k=2.0), m=64)
        assert result.moment_k == 2.0
        assert result.delta1_trend_bound == pytest.approx(64.0 * math.sqrt(0.2))

    def test_soft_kinds_do_not_count_as_hard(self, gaussian):
        result = run_upper_walk(gaussian(8, seed=3), m=64, eps=0.25)
        soft = {ViolationKind.COMPOSED_CONDITION, ViolationKind.RESIDUAL_LEVELS}
        assert all(v.kind not in soft for v in result.hard_violations)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10))
def test_feasibility_over_seeds(seed, gaussian):
    result = run_upper_walk(gaussian(64, seed=seed), m=1024, eps=0.1)
    assert not result.hard_violations
    potentials = [s.potential for s in result.trajectory]
    assert all(b <= a + 1e-9 * max(1.0, a) for a, b in zip(potentials, potentials[1:]))
    assert result.cumulative_shift <= 2 * 0.1 * 64
    assert result.u_final > result.lambda_max


@pytest.mark.slow
def test_mean_ratio_over_seeds(gaussian):
    ratios = [run_upper_walk(gaussian(64, seed=seed), m=1024, eps=0.1).ratio for seed in range(10)]
    assert float(np.mean(ratios)) <= 3.0
