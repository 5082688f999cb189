"""
Marchenko-Pastur law with aspect ratio rho = n / m.

The continuous part has density

    sqrt((a+ - x)(x - a-)) / (2 pi rho x)   on [a-, a+],  a+- = (1 +- sqrt(rho))^2

and for rho > 1 an atom of mass (rho - 1) / rho sits at zero.
"""

import math
from dataclasses import dataclass

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike, NDArray
from scipy import integrate, linalg, optimize

from edgelab.errors import InvalidParameterError
from edgelab.samplers import SampleBatch, empirical_covariance

FloatArray = NDArray[np.float64]

QUAD_TOL = 1e-10
ZERO_EIGENVALUE_TOL = 1e-10


@dataclass(frozen=True, slots=True)
class MPParams:
    rho: float

    def __post_init__(self) -> None:
        if not self.rho > 0:
            raise InvalidParameterError(f"rho must be positive, got {self.rho}")

    @property
    def lower_edge(self) -> float:
        return (1.0 - math.sqrt(self.rho)) ** 2

    @property
    def upper_edge(self) -> float:
        return (1.0 + math.sqrt(self.rho)) ** 2

    @property
    def edges(self) -> tuple[float, float]:
        return self.lower_edge, self.upper_edge

    @property
    def atom_mass(self) -> float:
        return max(0.0, (self.rho - 1.0) / self.rho)

    @property
    def continuous_mass(self) -> float:
        return 1.0 - self.atom_mass

    def density(self, x: ArrayLike) -> FloatArray | float:
        return mp_density(self.rho, x)

    def cdf(self, x: ArrayLike) -> FloatArray | float:
        return mp_cdf(self.rho, x)


def _params(rho: float | MPParams) -> MPParams:
    return rho if isinstance(rho, MPParams) else MPParams(float(rho))


def mp_edges(rho: float) -> tuple[float, float]:
    """(a-, a+) = ((1 - sqrt(rho))^2, (1 + sqrt(rho))^2)."""
    return _params(rho).edges


def mp_density(rho: float | MPParams, x: ArrayLike) -> FloatArray | float:
    """
    Density of the continuous part, zero outside [a-, a+].

    Raises:
        InvalidParameterError: At x = 0 when rho >= 1, where the law has an
            atom or an integrable singularity rather than a density value
    """
    mp = _params(rho)
    points = np.asarray(x, dtype=np.float64)
    if mp.rho >= 1.0 and np.any(points == 0.0):
        raise InvalidParameterError("the Marchenko-Pastur law has no density value at x = 0 for rho >= 1")

    lo, hi = mp.edges
    inside = (points > lo) & (points < hi)
    safe = np.where(inside, points, 1.0)
    values = np.where(
        inside,
        np.sqrt(np.clip((hi - safe) * (safe - lo), 0.0, None)) / (2.0 * math.pi * mp.rho * safe),
        0.0,
    )
    return float(values) if values.ndim == 0 else values


def _left_mass(mp: MPParams, x: float) -> float:
    """Continuous mass on [a-, x] for x inside the support."""
    lo, hi = mp.edges
    if lo == 0.0:
        # rho = 1: density sqrt(4 - t) / (2 pi sqrt(t))
        value, _ = integrate.quad(
            lambda t: math.sqrt(hi - t) / (2.0 * math.pi),
            lo, x, weight="alg", wvar=(-0.5, 0.0), epsabs=QUAD_TOL, epsrel=QUAD_TOL,
        )
        return value
    value, _ = integrate.quad(
        lambda t: math.sqrt(hi - t) / (2.0 * math.pi * mp.rho * t),
        lo, x, weight="alg", wvar=(0.5, 0.0), epsabs=QUAD_TOL, epsrel=QUAD_TOL,
    )
    return value


def _right_mass(mp: MPParams, x: float) -> float:
    """Continuous mass on [x, a+] for x inside the support."""
    lo, hi = mp.edges
    value, _ = integrate.quad(
        lambda t: math.sqrt(t - lo) / (2.0 * math.pi * mp.rho * t),
        x, hi, weight="alg", wvar=(0.0, 0.5), epsabs=QUAD_TOL, epsrel=QUAD_TOL,
    )
    return value


def mp_total_mass(rho: float | MPParams) -> float:
    """Integral of the density over [a-, a+] by quadrature."""
    mp = _params(rho)
    lo, hi = mp.edges
    if lo == 0.0:
        value, _ = integrate.quad(
            lambda t: 1.0 / (2.0 * math.pi), lo, hi, weight="alg", wvar=(-0.5, 0.5),
            epsabs=QUAD_TOL, epsrel=QUAD_TOL,
        )
        return value
    value, _ = integrate.quad(
        lambda t: 1.0 / (2.0 * math.pi * mp.rho * t), lo, hi, weight="alg", wvar=(0.5, 0.5),
        epsabs=QUAD_TOL, epsrel=QUAD_TOL,
    )
    return value


def _cdf_scalar(mp: MPParams, x: float) -> float:
    if x < 0.0:
        return 0.0
    lo, hi = mp.edges
    atom = mp.atom_mass
    if x <= lo:
        return atom
    if x >= hi:
        return 1.0
    if x <= (lo + hi) / 2.0:
        return min(1.0, atom + _left_mass(mp, x))
    return max(atom, 1.0 - _right_mass(mp, x))


def mp_cdf(rho: float | MPParams, x: ArrayLike) -> FloatArray | float:
    """Distribution function including the atom at zero."""
    mp = _params(rho)
    points = np.asarray(x, dtype=np.float64)
    values = np.array([_cdf_scalar(mp, float(p)) for p in points.reshape(-1)]).reshape(points.shape)
    return float(values) if values.ndim == 0 else values


def mp_quantile(rho: float | MPParams, p: float) -> float:
    """Smallest x with F(x) >= p."""
    mp = _params(rho)
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"p must lie in [0, 1], got {p}")
    lo, hi = mp.edges
    if p <= mp.atom_mass:
        return 0.0 if mp.atom_mass > 0 else lo
    if p >= 1.0:
        return hi
    return float(optimize.brentq(lambda t: _cdf_scalar(mp, t) - p, lo, hi, xtol=1e-12))


def mp_table(rho: float | MPParams, points: int = 200) -> pd.DataFrame:
    """
    Plot-ready table with columns x, density, cdf on Chebyshev nodes of
    the support.
    """
    mp = _params(rho)
    lo, hi = mp.edges
    nodes = (1.0 - np.cos(math.pi * (np.arange(points) + 0.5) / points)) / 2.0
    grid = lo + (hi - lo) * nodes
    return pd.DataFrame({"x": grid, "density": mp_density(mp, grid), "cdf": mp_cdf(mp, grid)})


@dataclass(frozen=True, slots=True, eq=False)
class ESD:
    """
    Empirical spectral distribution of Sigma_hat = A / m.

    Each eigenvalue carries mass 1/m, so the total mass is n/m; the
    distribution function below is normalised per eigenvalue (1/n).
    """

    eigenvalues: FloatArray
    m: int

    @property
    def n(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def total_mass(self) -> float:
        return self.n / self.m

    @property
    def rho(self) -> float:
        return self.n / self.m

    @classmethod
    def from_batch(cls, batch: SampleBatch) -> "ESD":
        values = linalg.eigvalsh(empirical_covariance(batch))
        return cls(np.sort(np.clip(values, 0.0, None)), batch.m)

    @classmethod
    def from_eigenvalues(cls, eigenvalues: ArrayLike, m: int) -> "ESD":
        values = np.sort(np.asarray(eigenvalues, dtype=np.float64).reshape(-1))
        if values.size == 0:
            raise InvalidParameterError("an ESD needs at least one eigenvalue")
        return cls(values, m)

    def cdf(self, x: ArrayLike) -> FloatArray:
        return np.searchsorted(self.eigenvalues, np.asarray(x, dtype=np.float64), side="right") / self.n


def ks_distance(esd: ESD, mp: MPParams | float, *, continuous_part: bool = False) -> float:
    """
    Kolmogorov-Smirnov distance between an ESD and the law.

    With ``continuous_part`` the (numerically) zero eigenvalues are dropped
    and the rest is compared with the normalised continuous part, which is
    the meaningful comparison when rho > 1.
    """
    mp = _params(mp)
    atom = mp.atom_mass
    scale = max(1.0, float(esd.eigenvalues[-1]))
    zero = esd.eigenvalues <= ZERO_EIGENVALUE_TOL * scale

    if continuous_part:
        values = esd.eigenvalues[~zero]
        if values.size == 0:
            return 1.0
        law = (mp_cdf(mp, values) - atom) / (1.0 - atom)
        law_left = law
    else:
        values = np.where(zero, 0.0, esd.eigenvalues)
        law = mp_cdf(mp, values)
        # left limit at the atom
        law_left = np.where(zero, 0.0, law)

    count = values.size
    above = np.arange(1, count + 1) / count - law
    below = law_left - np.arange(count) / count
    return float(np.clip(max(above.max(), below.max()), 0.0, 1.0))
