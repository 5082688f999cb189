"""
Symmetric spectra, rank-one updates and the two Stieltjes potentials.

Everything here is value-semantics: a SymmetricSpectrum is never mutated,
an update returns a new one.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg

from edgelab.config import UpdateMode
from edgelab.errors import (
    BarrierViolationError,
    DimensionMismatchError,
    InvariantViolationError,
    NotSymmetricError,
    SingularUpdateError,
)
from edgelab.spectral.secular import secular_update

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

SYMMETRY_TOL = 1e-10
ORTHONORMALITY_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-9
PROJECTION_TOL = 1e-10
SM_DENOMINATOR_TOL = 1e-12


@dataclass(frozen=True, slots=True, eq=False)
class SymmetricSpectrum:
    """
    Eigen-decomposition of a real symmetric matrix.

    Attributes:
        eigenvalues: lambda_1 >= ... >= lambda_n
        eigenvectors: Orthonormal eigenvectors as the columns of an n x n matrix
    """

    eigenvalues: FloatArray
    eigenvectors: FloatArray

    @classmethod
    def zero(cls, dim: int) -> "SymmetricSpectrum":
        """Spectrum of the n x n zero matrix with the standard basis."""
        return cls(np.zeros(dim), np.eye(dim))

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def trace(self) -> float:
        return float(self.eigenvalues.sum())

    def matrix(self) -> FloatArray:
        """Reconstruct sum_i lambda_i x_i x_i^T."""
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T

    def orthonormality_error(self) -> float:
        gram = self.eigenvectors.T @ self.eigenvectors
        return float(np.max(np.abs(gram - np.eye(self.dim))))

    def reconstruction_error(self, source: ArrayLike) -> float:
        """Relative Frobenius distance between the reconstruction and source."""
        source = np.asarray(source, dtype=np.float64)
        scale = max(float(np.linalg.norm(source)), np.finfo(np.float64).tiny)
        return float(np.linalg.norm(self.matrix() - source)) / scale

    def check_invariants(self, source: ArrayLike | None = None) -> None:
        """
        Raise InvariantViolationError unless ordering, orthonormality and
        (when a source matrix is given) reconstruction hold.
        """
        if np.any(np.diff(self.eigenvalues) > 0):
            raise InvariantViolationError("eigenvalues are not sorted non-increasing")
        error = self.orthonormality_error()
        if error > ORTHONORMALITY_TOL:
            raise InvariantViolationError(f"eigenvector Gram deviates from I by {error:.3e}")
        if source is not None:
            error = self.reconstruction_error(source)
            if error > RECONSTRUCTION_TOL:
                raise InvariantViolationError(f"reconstruction error {error:.3e}")


@dataclass(frozen=True, slots=True, eq=False)
class RankOneVector:
    """
    An update vector x with its projections <x, x_i> on a given spectrum.

    The projections are only meaningful against ``basis``; as_rank_one
    recomputes them when the vector is reused against another spectrum.
    """

    entries: FloatArray
    projections: FloatArray
    basis: SymmetricSpectrum = field(repr=False)

    @classmethod
    def from_vector(cls, x: ArrayLike, spectrum: SymmetricSpectrum) -> "RankOneVector":
        entries = np.asarray(x, dtype=np.float64).reshape(-1)
        if entries.size != spectrum.dim:
            raise DimensionMismatchError(
                f"vector has dimension {entries.size}, spectrum has {spectrum.dim}"
            )
        return cls(entries, spectrum.eigenvectors.T @ entries, spectrum)

    @property
    def dim(self) -> int:
        return int(self.entries.size)

    @property
    def norm_sq(self) -> float:
        return float(self.entries @ self.entries)

    @property
    def weights(self) -> FloatArray:
        """Squared projections <x, x_i>^2."""
        return self.projections * self.projections

    def is_zero(self) -> bool:
        return not np.any(self.entries)

    def projection_error(self) -> float:
        """Relative gap between sum_i <x, x_i>^2 and |x|^2."""
        norm_sq = self.norm_sq
        if norm_sq == 0.0:
            return float(self.weights.sum())
        return abs(float(self.weights.sum()) - norm_sq) / norm_sq


def as_rank_one(x: "RankOneVector | ArrayLike", spectrum: SymmetricSpectrum) -> RankOneVector:
    """Return x as a RankOneVector whose projections are taken against spectrum."""
    if isinstance(x, RankOneVector):
        if x.basis is spectrum:
            return x
        x = x.entries
    return RankOneVector.from_vector(x, spectrum)


def eigendecompose(matrix: ArrayLike) -> SymmetricSpectrum:
    """
    Decompose a real symmetric matrix.

    Raises:
        NotSymmetricError: If the input is not square, not finite or not
            symmetric to SYMMETRY_TOL
    """
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise NotSymmetricError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotSymmetricError("matrix has non-finite entries")

    scale = max(1.0, float(np.max(np.abs(a))))
    asymmetry = float(np.max(np.abs(a - a.T)))
    if asymmetry > SYMMETRY_TOL * scale:
        raise NotSymmetricError(f"matrix is not symmetric (max |A - A^T| = {asymmetry:.3e})")

    values, vectors = linalg.eigh((a + a.T) / 2.0)
    return SymmetricSpectrum(values[::-1].copy(), np.ascontiguousarray(vectors[:, ::-1]))


def rank_one_update(
    spectrum: SymmetricSpectrum,
    x: RankOneVector | ArrayLike,
    mode: UpdateMode | str = UpdateMode.FULL,
) -> SymmetricSpectrum:
    """
    Spectrum of A + x x^T.

    ``full`` re-decomposes diag(lambda) + z z^T in the current eigenbasis;
    ``incremental`` solves the secular equation and agrees with ``full``
    to about 1e-8 in the eigenvalues.

    Raises:
        DimensionMismatchError: If x and the spectrum differ in dimension
    """
    vector = as_rank_one(x, spectrum)
    mode = UpdateMode(mode)
    if vector.is_zero():
        return spectrum

    if mode is UpdateMode.INCREMENTAL:
        values, vectors = secular_update(
            spectrum.eigenvalues, spectrum.eigenvectors, vector.projections
        )
        return SymmetricSpectrum(values, vectors)

    z = vector.projections
    inner = np.diag(spectrum.eigenvalues) + np.outer(z, z)
    values, rotation = linalg.eigh(inner)
    vectors = spectrum.eigenvectors @ rotation[:, ::-1]
    return SymmetricSpectrum(values[::-1].copy(), vectors)


def stieltjes_lower(spectrum: SymmetricSpectrum, u: float) -> float:
    """
    Lower barrier potential tr((A - u)^{-1}) = sum_i 1 / (lambda_i - u).

    Raises:
        BarrierViolationError: If u >= lambda_min
    """
    if u >= spectrum.lambda_min:
        raise BarrierViolationError(
            f"lower barrier u={u} is not below lambda_min={spectrum.lambda_min}",
            barrier=u,
            edge=spectrum.lambda_min,
        )
    return float(np.sum(1.0 / (spectrum.eigenvalues - u)))


def stieltjes_upper(spectrum: SymmetricSpectrum, u: float) -> float:
    """
    Upper barrier potential tr((u - A)^{-1}) = sum_i 1 / (u - lambda_i).

    Raises:
        BarrierViolationError: If u <= lambda_max
    """
    if u <= spectrum.lambda_max:
        raise BarrierViolationError(
            f"upper barrier u={u} is not above lambda_max={spectrum.lambda_max}",
            barrier=u,
            edge=spectrum.lambda_max,
        )
    return float(np.sum(1.0 / (u - spectrum.eigenvalues)))


def sherman_morrison_trace(
    spectrum: SymmetricSpectrum, x: RankOneVector | ArrayLike, u: float
) -> float:
    """
    tr((A - u + x x^T)^{-1}) from the spectrum of A alone.

    Raises:
        BarrierViolationError: If u is an eigenvalue of A
        SingularUpdateError: If 1 + x^T (A - u)^{-1} x is within 1e-12 of zero
    """
    vector = as_rank_one(x, spectrum)
    gaps = spectrum.eigenvalues - u
    if np.any(gaps == 0.0):
        raise BarrierViolationError(
            f"u={u} is an eigenvalue of A", barrier=u, edge=float(u)
        )

    weights = vector.weights
    denominator = 1.0 + float(np.sum(weights / gaps))
    if abs(denominator) <= SM_DENOMINATOR_TOL:
        raise SingularUpdateError(
            f"Sherman-Morrison denominator {denominator:.3e} vanishes at u={u}"
        )
    return float(np.sum(1.0 / gaps)) - float(np.sum(weights / gaps**2)) / denominator
