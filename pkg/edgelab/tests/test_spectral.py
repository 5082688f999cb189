import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from edgelab.config import UpdateMode
from edgelab.errors import (
    BarrierViolationError,
    DimensionMismatchError,
    NotSymmetricError,
    SingularUpdateError,
)
from edgelab.spectral import (
    RankOneVector,
    SymmetricSpectrum,
    as_rank_one,
    eigendecompose,
    rank_one_update,
    sherman_morrison_trace,
    stieltjes_lower,
    stieltjes_upper,
)

DIM = 6

small_ints = st.integers(min_value=-10, max_value=10)


@st.composite
def symmetric_with_vector(draw, n=DIM):
    half = draw(arrays(np.int64, (n, n), elements=small_ints)).astype(np.float64)
    x = draw(arrays(np.int64, (n,), elements=small_ints)).astype(np.float64)
    return (half + half.T) / 2.0, x


class TestEigendecompose:
    def test_identity(self):
        spectrum = eigendecompose(np.eye(2))
        assert np.allclose(spectrum.eigenvalues, [1.0, 1.0])
        assert spectrum.orthonormality_error() < 1e-12

    def test_diagonal_is_sorted_descending(self):
        spectrum = eigendecompose(np.diag([1.0, 3.0]))
        assert np.allclose(spectrum.eigenvalues, [3.0, 1.0])
        assert np.allclose(np.abs(spectrum.eigenvectors), [[0.0, 1.0], [1.0, 0.0]])

    def test_reconstruction(self, random_psd):
        a = random_psd(12, seed=3)
        spectrum = eigendecompose(a)
        spectrum.check_invariants(a)
        assert spectrum.trace == pytest.approx(np.trace(a))

    @pytest.mark.parametrize(
        "matrix",
        [
            np.array([[1.0, 2.0], [0.0, 1.0]]),
            np.ones((2, 3)),
            np.array([[np.nan, 0.0], [0.0, 1.0]]),
            np.zeros((0, 0)),
        ],
        ids=["asymmetric", "rectangular", "nan", "empty"],
    )
    def test_rejects_bad_input(self, matrix):
        with pytest.raises(NotSymmetricError):
            eigendecompose(matrix)


class TestRankOneUpdate:
    @pytest.mark.parametrize("mode", list(UpdateMode))
    def test_zero_matrix(self, mode):
        updated = rank_one_update(SymmetricSpectrum.zero(2), [1.0, 0.0], mode)
        assert np.allclose(updated.eigenvalues, [1.0, 0.0])

    @pytest.mark.parametrize("mode", list(UpdateMode))
    def test_identity_plus_ones(self, mode):
        updated = rank_one_update(eigendecompose(np.eye(2)), [1.0, 1.0], mode)
        assert np.allclose(updated.eigenvalues, [3.0, 1.0])
        top = updated.eigenvectors[:, 0]
        assert abs(top @ np.array([1.0, 1.0]) / np.sqrt(2.0)) == pytest.approx(1.0)

    def test_zero_vector_returns_same_spectrum(self):
        spectrum = eigendecompose(np.diag([2.0, 1.0]))
        assert rank_one_update(spectrum, np.zeros(2)) is spectrum

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            rank_one_update(SymmetricSpectrum.zero(3), [1.0, 2.0])

    def test_incremental_matches_full(self, random_psd):
        rng = np.random.default_rng(11)
        spectrum = eigendecompose(random_psd(32, seed=7))
        for _ in range(5):
            x = rng.standard_normal(32)
            full = rank_one_update(spectrum, x, UpdateMode.FULL)
            incremental = rank_one_update(spectrum, x, UpdateMode.INCREMENTAL)
            scale = max(1.0, full.lambda_max)
            assert np.max(np.abs(full.eigenvalues - incremental.eigenvalues)) <= 1e-8 * scale
            target = spectrum.matrix() + np.outer(x, x)
            assert incremental.reconstruction_error(target) < 1e-9
            spectrum = full

    def test_rank_one_vector_is_rebased(self):
        first = eigendecompose(np.diag([3.0, 1.0]))
        second = eigendecompose(np.array([[2.0, 1.0], [1.0, 2.0]]))
        vector = RankOneVector.from_vector([1.0, 0.0], first)
        rebased = as_rank_one(vector, second)
        assert rebased.basis is second
        assert rebased.projection_error() < 1e-12
        assert as_rank_one(vector, first) is vector

    @settings(max_examples=60, deadline=None)
    @given(symmetric_with_vector())
    def test_update_reconstructs_and_interlaces(self, case):
        a, x = case
        spectrum = eigendecompose(a)
        updated = rank_one_update(spectrum, x, UpdateMode.FULL)

        target = a + np.outer(x, x)
        scale = max(1.0, float(np.max(np.abs(target))))
        assert np.max(np.abs(updated.matrix() - target)) <= 1e-9 * scale
        assert updated.orthonormality_error() < 1e-10
        assert updated.trace == pytest.approx(spectrum.trace + x @ x, abs=1e-9 * scale)

        # interlacing: mu_i >= lambda_i >= mu_{i+1}
        tol = 1e-9 * scale
        assert np.all(updated.eigenvalues >= spectrum.eigenvalues - tol)
        assert np.all(updated.eigenvalues[1:] <= spectrum.eigenvalues[:-1] + tol)


class TestStieltjes:
    def test_lower_examples(self, diagonal):
        assert stieltjes_lower(diagonal(1.0, 1.0), 0.0) == pytest.approx(2.0)
        assert stieltjes_lower(diagonal(3.0, 2.0), 1.0) == pytest.approx(1.5)

    def test_lower_initial_potential(self):
        n, m = 4, 16
        u0 = n - np.sqrt(m * n)
        assert stieltjes_lower(SymmetricSpectrum.zero(n), u0) == pytest.approx(n / (np.sqrt(m * n) - n))

    def test_upper_examples(self, diagonal):
        assert stieltjes_upper(diagonal(1.0, 1.0), 2.0) == pytest.approx(2.0)
        assert stieltjes_upper(diagonal(3.0, 2.0), 5.0) == pytest.approx(1.0 / 3.0 + 0.5)

    def test_upper_initial_potential(self):
        n, m = 4, 16
        u0 = n + np.sqrt(m * n)
        assert stieltjes_upper(SymmetricSpectrum.zero(n), u0) == pytest.approx(1.0 / 3.0)

    def test_wrong_side_raises(self, diagonal):
        spectrum = diagonal(3.0, 1.0)
        with pytest.raises(BarrierViolationError) as e:
            stieltjes_lower(spectrum, 1.0)
        assert e.value.edge == 1.0
        with pytest.raises(BarrierViolationError):
            stieltjes_upper(spectrum, 2.0)


class TestShermanMorrison:
    def test_identity_example(self):
        spectrum = eigendecompose(np.eye(2))
        assert sherman_morrison_trace(spectrum, [1.0, 0.0], 0.0) == pytest.approx(1.5)

    def test_zero_vector_leaves_trace(self, diagonal):
        spectrum = diagonal(4.0, 2.0, 1.0)
        assert sherman_morrison_trace(spectrum, np.zeros(3), 0.5) == pytest.approx(
            stieltjes_lower(spectrum, 0.5)
        )

    def test_matches_direct_inverse(self, random_psd):
        rng = np.random.default_rng(2024)
        for trial in range(100):
            a = random_psd(16, seed=trial)
            spectrum = eigendecompose(a)
            x = rng.standard_normal(16)
            u = spectrum.lambda_min - 1.0
            direct = np.trace(np.linalg.inv(a - u * np.eye(16) + np.outer(x, x)))
            assert sherman_morrison_trace(spectrum, x, u) == pytest.approx(direct, rel=1e-10)

    def test_vanishing_denominator(self, diagonal):
        # 1 + 1 / (1 - 2) = 0
        with pytest.raises(SingularUpdateError):
            sherman_morrison_trace(diagonal(1.0), [1.0], 2.0)

    def test_u_on_spectrum(self, diagonal):
        with pytest.raises(BarrierViolationError):
            sherman_morrison_trace(diagonal(2.0, 1.0), [1.0, 1.0], 1.0)
