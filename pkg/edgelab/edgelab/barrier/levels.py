"""
Base-4 level sets of the distances u - lambda_i.

    I_j = {i : 4^{j-1} <= u - lambda_i < 4^j},  j >= 1

Indices with u - lambda_i < 1 belong to no level and are collected in a
residual set; that set is empty whenever the upper potential is below 1.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from edgelab.errors import BarrierViolationError
from edgelab.spectral import RankOneVector, SymmetricSpectrum

IntArray = NDArray[np.int64]


@dataclass(frozen=True, slots=True, eq=False)
class LevelSets:
    """
    Attributes:
        levels: j -> indices in I_j, only non-empty levels, ascending j
        residual: Indices with u - lambda_i < 1
    """

    levels: dict[int, IntArray]
    residual: IntArray

    def size(self, j: int) -> int:
        members = self.levels.get(j)
        return 0 if members is None else int(members.size)

    @property
    def max_ratio(self) -> float:
        """max_j |I_j| / 16^j."""
        if not self.levels:
            return 0.0
        return max(members.size / 16.0**j for j, members in self.levels.items())

    def ratio_bound_holds(self, eps: float, n: int) -> bool:
        """
        Whenever max_j |I_j| / 16^j <= 1/(eps n), every level satisfies
        |I_j| / 4^j <= sqrt(|I_j| / (eps n)).
        """
        if self.max_ratio > 1.0 / (eps * n):
            return True
        return all(
            members.size / 4.0**j <= math.sqrt(members.size / (eps * n)) * (1.0 + 1e-12)
            for j, members in self.levels.items()
        )


def level_sets(spectrum: SymmetricSpectrum, u: float) -> LevelSets:
    """
    Partition the indices by their level.

    Raises:
        BarrierViolationError: If u <= lambda_max
    """
    if u <= spectrum.lambda_max:
        raise BarrierViolationError(
            f"u = {u} is not above lambda_max = {spectrum.lambda_max}",
            barrier=u,
            edge=spectrum.lambda_max,
        )
    gaps = u - spectrum.eigenvalues
    residual = np.flatnonzero(gaps < 1.0)
    ranked = np.flatnonzero(gaps >= 1.0)
    distance = gaps[ranked]

    j = np.floor(np.log(distance) / np.log(4.0)).astype(np.int64) + 1
    j = np.where(4.0 ** (j - 1) > distance, j - 1, j)
    j = np.where(distance >= 4.0**j, j + 1, j)

    levels = {int(level): ranked[j == level] for level in np.unique(j)}
    return LevelSets(levels, residual)


def h_excess(levels: LevelSets, x: RankOneVector) -> dict[int, float]:
    """h_j = sum_{i in I_j} <x, x_i>^2 - |I_j| for every non-empty level."""
    weights = x.weights
    return {j: float(weights[members].sum()) - members.size for j, members in levels.levels.items()}

