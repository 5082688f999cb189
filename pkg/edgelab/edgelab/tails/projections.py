"""
Orthogonal projections used by the tail-projection testers.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy import linalg

from edgelab.errors import DimensionMismatchError, InvalidParameterError
from edgelab.samplers import generator

FloatArray = NDArray[np.float64]


@dataclass(frozen=True, slots=True, eq=False)
class ProjectionSpec:
    """
    A rank-r orthogonal projection P = B B^T on R^n.

    Attributes:
        basis: n x r matrix with orthonormal columns spanning the range
        provenance: ``random`` (Haar range from ``seed``) or ``coordinates``
        seed: Seed of a random range
        indices: Coordinates of a coordinate projection
    """

    basis: FloatArray
    provenance: str
    seed: int | None = None
    indices: tuple[int, ...] | None = None

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def rank(self) -> int:
        return int(self.basis.shape[1])

    def matrix(self) -> FloatArray:
        return self.basis @ self.basis.T

    def decoupled_matrix(self) -> FloatArray:
        """P_0: the projection matrix with its diagonal zeroed."""
        p = self.matrix()
        np.fill_diagonal(p, 0.0)
        return p

    def orthonormality_error(self) -> float:
        gram = self.basis.T @ self.basis
        return float(np.max(np.abs(gram - np.eye(self.rank))))

    def norms_sq(self, rows: FloatArray) -> FloatArray:
        """|P x|^2 for every row x."""
        if rows.shape[1] != self.dim:
            raise DimensionMismatchError(
                f"rows have dimension {rows.shape[1]}, projection acts on {self.dim}"
            )
        if self.indices is not None:
            picked = rows[:, list(self.indices)]
            return np.einsum("ij,ij->i", picked, picked)
        coords = rows @ self.basis
        return np.einsum("ij,ij->i", coords, coords)


def _check_rank(n: int, r: int) -> None:
    if n < 1 or not 1 <= r <= n:
        raise InvalidParameterError(f"rank must satisfy 1 <= r <= n, got r={r}, n={n}")


def random_projection(n: int, r: int, seed: int, *, stream: tuple[int, ...] = ()) -> ProjectionSpec:
    """
    Haar-random rank-r projection: QR of an n x r Gaussian frame with the
    signs of R's diagonal folded into Q.
    """
    _check_rank(n, r)
    if r == n:
        return ProjectionSpec(np.eye(n), "random", seed=seed)

    frame = generator(seed, *stream).standard_normal((n, r))
    q, upper = linalg.qr(frame, mode="economic")
    signs = np.sign(np.diag(upper))
    signs[signs == 0] = 1.0
    return ProjectionSpec(q * signs, "random", seed=seed)


def coordinate_projection(n: int, indices: Sequence[int]) -> ProjectionSpec:
    """Projection onto span{e_i : i in indices}."""
    chosen = tuple(sorted({int(i) for i in indices}))
    _check_rank(n, len(chosen))
    if chosen[0] < 0 or chosen[-1] >= n:
        raise InvalidParameterError(f"coordinate indices must lie in [0, {n}), got {chosen}")
    return ProjectionSpec(np.eye(n)[:, list(chosen)], "coordinates", indices=chosen)
