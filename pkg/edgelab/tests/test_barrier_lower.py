import logging
import math

import numpy as np
import pytest
from scipy import linalg

import edgelab.barrier.lower as lower
from edgelab.barrier import (
    LowerShiftParams,
    ViolationKind,
    construct_lower_shift,
    expected_shift_floor,
    feasible_lower_shift,
    q1,
    q2,
    regularity_shift_lower,
    run_lower_walk,
)
from edgelab.config import UpdateMode
from edgelab.errors import BarrierViolationError, InvalidParameterError, InvariantViolationError
from edgelab.samplers import Family, SampleBatch, SamplerModel, gram_matrix, sample_batch
from edgelab.spectral import SymmetricSpectrum, eigendecompose, rank_one_update, stieltjes_lower


class TestQuadraticForms:
    def test_hand_example(self, diagonal):
        spectrum = diagonal(3.0, 2.0)
        assert q1(spectrum, np.ones(2), 0.0) == pytest.approx(5.0 / 6.0)
        assert q2(spectrum, np.ones(2), 0.0) == pytest.approx(1.0)

    def test_zero_vector(self, diagonal):
        spectrum = diagonal(3.0, 2.0)
        assert q1(spectrum, np.zeros(2), 0.0) == 0.0
        assert q2(spectrum, np.zeros(2), 0.0, 0.5) == 0.0

    def test_initial_barrier(self):
        spectrum = SymmetricSpectrum.zero(4)
        e1 = np.eye(4)[0]
        assert q1(spectrum, e1, -4.0) == pytest.approx(0.25)
        assert q2(spectrum, e1, -4.0) == pytest.approx(0.25)

    def test_shift_past_spectrum(self, diagonal):
        with pytest.raises(BarrierViolationError):
            q1(diagonal(3.0, 2.0), np.ones(2), 1.0, 1.0)


class TestLowerShift:
    def test_params(self):
        params = LowerShiftParams(0.25)
        assert params.truncation == 4.0
        assert params.gap_requirement == 32.0
        assert not params.asymptotic_regime
        assert LowerShiftParams(1e-4).asymptotic_regime
        with pytest.raises(InvalidParameterError):
            LowerShiftParams(1.0)

    def test_zero_vector(self):
        assert feasible_lower_shift(SymmetricSpectrum.zero(4), np.zeros(4), -100.0, LowerShiftParams(0.2)) == 0.0

    def test_gap_fallback(self, caplog):
        params = LowerShiftParams(0.01)
        with caplog.at_level(logging.WARNING, logger="edgelab"):
            delta = feasible_lower_shift(SymmetricSpectrum.zero(4), np.eye(4)[0], -4.0, params)
        assert delta == 0.0
        assert "falls back to 0" in caplog.text

        shift = construct_lower_shift(SymmetricSpectrum.zero(4), np.eye(4)[0], -4.0, params)
        assert not shift.gap_ok
        assert shift.certificate is None

    @pytest.mark.parametrize("seed", range(5))
    def test_shift_keeps_potential(self, seed):
        batch = sample_batch(SamplerModel(family=Family.GAUSSIAN, dim=8, seed=seed), 200)
        spectrum = eigendecompose(gram_matrix(batch))
        params = LowerShiftParams(0.2)
        u = spectrum.lambda_min - 60.0
        x = np.random.default_rng(seed).standard_normal(8)

        shift = construct_lower_shift(spectrum, x, u, params)
        delta = feasible_lower_shift(spectrum, x, u, params)
        assert shift.gap_ok
        assert 0.0 <= delta <= params.truncation
        assert shift.certificate >= -1e-9

        updated = rank_one_update(spectrum, x)
        assert u + delta < updated.lambda_min
        assert stieltjes_lower(updated, u + delta) <= stieltjes_lower(spectrum, u) + 1e-12

    def test_expected_shift_floor(self):
        assert expected_shift_floor(1.0, 0.2, 1.0) == pytest.approx(0.8 / (1.2 * 2.0) - 0.8)


class TestRegularityShift:
    def test_loose_thresholds(self):
        spectrum = SymmetricSpectrum.zero(4)
        assert regularity_shift_lower(spectrum, -2.0, 0.25, 4) == 0
        assert regularity_shift_lower(spectrum, -2.0, 0.05, 4) == 0

    def test_one_step(self, diagonal):
        # m(9.5) - m(8.5) = 4/3 > 1, m(8.5) - m(7.5) = 4/15
        assert regularity_shift_lower(diagonal(10.0), 9.5, 1.0, 1) == 1

    def test_barrier_above_spectrum(self, diagonal):
        with pytest.raises(BarrierViolationError):
            regularity_shift_lower(diagonal(1.0), 1.0, 0.5, 1)


class TestLowerWalk:
    def test_zero_vectors_leave_barrier(self):
        zero = SamplerModel(family=Family.ZERO, dim=4)
        result = run_lower_walk(zero, m=16)
        assert result.u_final == pytest.approx(4.0 - 8.0)
        assert all(state.delta == 0.0 and state.delta_r == 0 for state in result.trajectory)
        assert not result.hard_violations
        assert {v.kind for v in result.violations} == {ViolationKind.GAP_FALLBACK}

    def test_needs_more_samples_than_dimension(self):
        with pytest.raises(InvalidParameterError):
            run_lower_walk(SampleBatch.from_rows(np.eye(3)))

    def test_gaussian_walk(self, gaussian):
        model = gaussian(32, seed=4)
        result = run_lower_walk(model, LowerShiftParams(0.25), m=512, stream=(0,))

        batch = sample_batch(model, 512, stream=(0,))
        lambda_min = linalg.eigvalsh(gram_matrix(batch))[0]
        assert result.lambda_min == pytest.approx(lambda_min, rel=1e-8)
        assert result.u_final <= lambda_min
        assert 0.0 < result.ratio <= 1.05

        assert not result.hard_violations
        potentials = [s.potential for s in result.trajectory]
        assert all(b <= a + 1e-9 * max(1.0, a) for a, b in zip(potentials, potentials[1:]))
        assert all(s.u < s.lambda_min for s in result.trajectory[1:])
        assert result.cumulative_shift <= result.shift_budget

        frame = result.to_frame()
        assert list(frame.columns) == ["k", "u_k", "lambda_min", "potential", "delta", "delta_R", "violation"]
        assert len(frame) == 513
        assert result.summary()["walk"] == "lower"

    def test_incremental_matches_full(self, gaussian):
        model = gaussian(8, seed=5)
        full = run_lower_walk(model, m=200, mode=UpdateMode.FULL)
        incremental = run_lower_walk(model, m=200, mode=UpdateMode.INCREMENTAL)
        assert incremental.u_final == pytest.approx(full.u_final, rel=1e-8)
        assert incremental.lambda_min == pytest.approx(full.lambda_min, rel=1e-6)

    def test_keep_spectra(self, gaussian):
        result = run_lower_walk(gaussian(4, seed=1), m=40, keep_spectra=True)
        assert all(state.spectrum is not None for state in result.trajectory)
        assert result.trajectory[-1].spectrum.lambda_min == pytest.approx(result.lambda_min)

    def test_concentration_frequency(self, gaussian):
        result = run_lower_walk(gaussian(16, seed=6), LowerShiftParams(0.3), m=1024)
        frequency, stderr, steps = result.concentration_frequency()
        assert steps > 0
        assert 0.0 <= frequency <= 1.0
        assert stderr >= 0.0

    @pytest.mark.parametrize("event, m, flagged", [(True, 1100, True), (False, 1100, False), (True, 500, False)])
    def test_concentration_check(self, monkeypatch, caplog, gaussian, event, m, flagged):
        monkeypatch.setattr(lower.LowerShift, "concentration_event", lambda self, eps: event)
        with caplog.at_level(logging.WARNING, logger="edgelab.barrier.lower"):
            result = run_lower_walk(gaussian(4, seed=3), LowerShiftParams(0.2), m=m)

        kinds = [v.kind for v in result.violations]
        assert (ViolationKind.CONCENTRATION in kinds) is flagged
        assert ("concentration event frequency" in caplog.text) is flagged
        assert not result.hard_violations

    def test_crossing_is_reported(self, monkeypatch, gaussian):
        real = lower.construct_lower_shift

        def overshoot(spectrum, x, u, params):
            shift = real(spectrum, x, u, params)
            # jumps past the spectrum
            return shift.__class__(1e6, shift.potential, True, True, None, None)

        monkeypatch.setattr(lower, "construct_lower_shift", overshoot)
        with pytest.raises(InvariantViolationError) as e:
            run_lower_walk(gaussian(4, seed=2), m=40)
        assert e.value.violations[-1].kind is ViolationKind.BARRIER


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10))
def test_feasibility_over_seeds(seed, gaussian):
    result = run_lower_walk(gaussian(64, seed=seed), LowerShiftParams(0.2), m=4096)
    assert not result.hard_violations
    assert result.cumulative_shift <= result.shift_budget
    assert result.u_final < result.lambda_min
    assert result.ratio >= 0.5
    assert math.isfinite(result.shift_floor)
