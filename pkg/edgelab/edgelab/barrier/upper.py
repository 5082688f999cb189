"""
Largest-eigenvalue barrier walk.

Starting from A = 0 and u_0 = n + sqrt(mn), every rank-one update moves
the barrier up by Delta_1 + Delta_2 and an integer regularity shift:

    u_k = u_{k-1} + Delta_1_k + Delta_2_k + Delta_R_k

Delta_1 absorbs the excess weight of x on the level sets, Delta_2 keeps
Q_2 below 1 - m(u) - alpha. The upper potential m(u) = tr((u - A)^{-1})
plus alpha stays below one along the walk, so u_m bounds lambda_max(A_n)
from above.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from edgelab.barrier.common import Violation, ViolationKind, exceeds, floor_log4, resolve_batch
from edgelab.barrier.levels import LevelSets, h_excess, level_sets
from edgelab.config import UpdateMode, settings
from edgelab.errors import BarrierViolationError, InvalidParameterError, InvariantViolationError
from edgelab.samplers import SampleBatch, SamplerModel, moment_bound
from edgelab.spectral import (
    RankOneVector,
    SymmetricSpectrum,
    as_rank_one,
    rank_one_update,
    stieltjes_upper,
)

logger = logging.getLogger(__name__)

MAX_DOUBLINGS = 64
BOUND_SLACK = 1e-9


def select_alpha(gamma: float, eps: float) -> float:
    """
    Largest alpha with (1 + alpha) / (1 - t - alpha) <= (1 + eps) / (1 - t)
    for all t in (0, 1 / (1 + sqrt(gamma))].

    The constraint is tightest at t* = 1 / (1 + sqrt(gamma)), giving
    alpha = eps (1 - t*) / (2 + eps - t*).

    Raises:
        InvalidParameterError: If gamma <= 0 or eps is outside (0, 1/4]
    """
    if gamma <= 0:
        raise InvalidParameterError(f"gamma must be positive, got {gamma}")
    if not 0.0 < eps <= 0.25:
        raise InvalidParameterError(f"eps must lie in (0, 1/4], got {eps}")
    t_star = 1.0 / (1.0 + math.sqrt(gamma))
    return eps * (1.0 - t_star) / (2.0 + eps - t_star)


def alpha_condition_holds(alpha: float, gamma: float, eps: float, points: int = 1000) -> bool:
    """Check the defining inequality of select_alpha on a uniform t grid ending at t*."""
    t_star = 1.0 / (1.0 + math.sqrt(gamma))
    t = np.linspace(t_star / points, t_star, points)
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs = (1.0 + alpha) / (1.0 - t - alpha)
    rhs = (1.0 + eps) / (1.0 - t)
    # equality holds at t*, allow for rounding there
    return bool(np.all((1.0 - t - alpha > 0) & (lhs <= rhs * (1.0 + 1e-12))))


@dataclass(frozen=True, slots=True)
class UpperShiftParams:
    """
    Attributes:
        eps: Accuracy parameter in (0, 1/4]
        alpha: Potential margin, 0 < alpha < sqrt(gamma) / (1 + sqrt(gamma))
        gamma: Aspect ratio m / n the margin was chosen for
        kappa: Moment exponent of the bound K
        moment_k: K = sup_y E|<X, y>|^{2 + kappa}, estimated from the sampler when None
    """

    eps: float
    alpha: float
    gamma: float
    kappa: float = 1.0
    moment_k: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.eps <= 0.25:
            raise InvalidParameterError(f"eps must lie in (0, 1/4], got {self.eps}")
        if self.gamma <= 0:
            raise InvalidParameterError(f"gamma must be positive, got {self.gamma}")
        ceiling = math.sqrt(self.gamma) / (1.0 + math.sqrt(self.gamma))
        if not 0.0 < self.alpha < ceiling:
            raise InvalidParameterError(f"alpha must lie in (0, {ceiling:.6g}), got {self.alpha}")

    @classmethod
    def select(cls, eps: float, gamma: float, **kwargs) -> "UpperShiftParams":
        """Parameters with the largest admissible alpha for (gamma, eps)."""
        return cls(eps=eps, alpha=select_alpha(gamma, eps), gamma=gamma, **kwargs)


def _upper_gaps(spectrum: SymmetricSpectrum, u: float) -> np.ndarray:
    if u <= spectrum.lambda_max:
        raise BarrierViolationError(
            f"u = {u} is not above lambda_max = {spectrum.lambda_max}",
            barrier=u,
            edge=spectrum.lambda_max,
        )
    return u - spectrum.eigenvalues


def _check_shift(delta: float) -> None:
    if delta < 0:
        raise InvalidParameterError(f"shift must be non-negative, got {delta}")


def Q1(spectrum: SymmetricSpectrum, x, u: float, delta: float = 0.0) -> float:
    """x^T (u + Delta - A)^{-1} x."""
    _check_shift(delta)
    gaps = _upper_gaps(spectrum, u) + delta
    return float(np.sum(as_rank_one(x, spectrum).weights / gaps))


def Q2(spectrum: SymmetricSpectrum, x, u: float, delta: float) -> float:
    """x^T (u + Delta - A)^{-2} x / (m(u) - m(u + Delta)), Delta > 0."""
    if delta <= 0:
        raise InvalidParameterError(f"Q2 needs Delta > 0, got {delta}")
    gaps = _upper_gaps(spectrum, u)
    shifted = gaps + delta
    numerator = np.sum(as_rank_one(x, spectrum).weights / shifted**2)
    return float(numerator / np.sum(delta / (gaps * shifted)))


def F2(spectrum: SymmetricSpectrum, x, u: float, delta: float = 0.0) -> float:
    """Delta Q2(Delta), continued to Delta = 0."""
    _check_shift(delta)
    gaps = _upper_gaps(spectrum, u)
    shifted = gaps + delta
    numerator = np.sum(as_rank_one(x, spectrum).weights / shifted**2)
    return float(numerator / np.sum(1.0 / (gaps * shifted)))


def _require_potential_below_one(potential: float) -> None:
    if potential >= 1.0:
        raise InvalidParameterError(f"upper potential {potential:.6g} must be below 1")


@dataclass(frozen=True, slots=True)
class Delta1:
    """
    Delta_1 with the terms it is built from and its Q1 bound.

    Attributes:
        value: Delta_1
        norm_term: eps^{-1/2} |x|^2 when eps |x|^2 >= n, else 0
        level_terms: j -> eps^{-1} h_j for the levels above their threshold
        q1: Q1(Delta_1)
        bound: m(u + Delta_1) + 6 sqrt(eps) + 8 eps sqrt(n) sqrt(max_j |I_j| / 16^j)
    """

    value: float
    norm_term: float
    level_terms: dict[int, float]
    q1: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.q1 <= self.bound + BOUND_SLACK * max(1.0, abs(self.bound))


def construct_delta1(
    spectrum: SymmetricSpectrum,
    x,
    u: float,
    params: UpperShiftParams,
    levels: LevelSets | None = None,
) -> Delta1:
    """
    Delta_1 = eps^{-1/2} |x|^2 1{eps |x|^2 >= n}
              + sum_{j <= log4(n / eps^2)} eps^{-1} h_j 1{h_j > eps^2 2^j sqrt(|I_j|)}

    Raises:
        BarrierViolationError: If u <= lambda_max
        InvalidParameterError: If m(u) >= 1
    """
    eps = params.eps
    n = spectrum.dim
    vector = as_rank_one(x, spectrum)
    _require_potential_below_one(stieltjes_upper(spectrum, u))
    levels = levels or level_sets(spectrum, u)

    norm_sq = vector.norm_sq
    norm_term = norm_sq / math.sqrt(eps) if eps * norm_sq >= n else 0.0

    top = floor_log4(n / eps**2)
    level_terms = {
        j: h / eps
        for j, h in h_excess(levels, vector).items()
        if j <= top and h > eps**2 * 2.0**j * math.sqrt(levels.size(j))
    }
    value = norm_term + sum(level_terms.values())

    bound = (
        stieltjes_upper(spectrum, u + value)
        + 6.0 * math.sqrt(eps)
        + 8.0 * eps * math.sqrt(n) * math.sqrt(levels.max_ratio)
    )
    return Delta1(value, norm_term, level_terms, Q1(spectrum, vector, u, value), bound)


def delta1(spectrum: SymmetricSpectrum, x, u: float, params: UpperShiftParams) -> float:
    """
    Delta_1 of construct_delta1.

    Raises:
        InvariantViolationError: If Q1(Delta_1) exceeds its bound
    """
    result = construct_delta1(spectrum, x, u, params)
    if not result.holds:
        raise InvariantViolationError(f"Q1(Delta_1) = {result.q1:.6g} exceeds {result.bound:.6g}")
    return result.value


@dataclass(frozen=True, slots=True)
class Delta2:
    """
    Attributes:
        value: Delta_2
        branch: 0 for x = 0, 1 for the closed form, 2 for the doubling search
        doublings: j of Delta_2 = 2^j (u - lambda_1) in branch 2
        q2: Q2(Delta_2), None when Delta_2 = 0
        budget: 1 - m(u) - alpha
    """

    value: float
    branch: int
    doublings: int
    q2: float | None
    budget: float

    @property
    def holds(self) -> bool:
        return self.q2 is None or self.q2 <= self.budget + BOUND_SLACK * max(1.0, self.budget)


def construct_delta2(spectrum: SymmetricSpectrum, x, u: float, params: UpperShiftParams) -> Delta2:
    """
    If (1 + alpha) F2(0) <= alpha (u - lambda_1) b then
    Delta_2 = (1 + alpha) F2(0) / b, otherwise the first 2^j (u - lambda_1),
    j = 0, 1, ..., with Q2 <= b; here b = 1 - m(u) - alpha.

    Raises:
        BarrierViolationError: If u <= lambda_max
        InvalidParameterError: If m(u) + alpha >= 1
        InvariantViolationError: If the search runs past 2^64 (u - lambda_1)
    """
    alpha = params.alpha
    vector = as_rank_one(x, spectrum)
    budget = 1.0 - stieltjes_upper(spectrum, u) - alpha
    if budget <= 0:
        raise InvalidParameterError(f"m(u) + alpha = {1.0 - budget:.6g} is not below 1")
    if vector.is_zero():
        return Delta2(0.0, 0, 0, None, budget)

    top_gap = u - spectrum.lambda_max
    f2_zero = F2(spectrum, vector, u, 0.0)
    if (1.0 + alpha) * f2_zero <= alpha * top_gap * budget:
        value = (1.0 + alpha) * f2_zero / budget
        return Delta2(value, 1, 0, Q2(spectrum, vector, u, value), budget)

    for j in range(MAX_DOUBLINGS + 1):
        value = 2.0**j * top_gap
        q2_value = Q2(spectrum, vector, u, value)
        if q2_value <= budget:
            return Delta2(value, 2, j, q2_value, budget)
    raise InvariantViolationError(f"no Delta_2 found within 2^{MAX_DOUBLINGS} (u - lambda_1)")


def delta2(spectrum: SymmetricSpectrum, x, u: float, params: UpperShiftParams) -> float:
    """
    Delta_2 of construct_delta2.

    Raises:
        InvariantViolationError: If Q2(Delta_2) exceeds 1 - m(u) - alpha
    """
    result = construct_delta2(spectrum, x, u, params)
    if not result.holds:
        raise InvariantViolationError(f"Q2(Delta_2) = {result.q2:.6g} exceeds {result.budget:.6g}")
    return result.value


def regularity_shift_upper(spectrum: SymmetricSpectrum, v: float, eps: float, n: int) -> int:
    """
    Smallest l >= 0 with m(v + l) - m(v + l + 1) <= 1 / (2 eps n).

    Raises:
        BarrierViolationError: If v <= lambda_max
    """
    gaps = _upper_gaps(spectrum, v)
    threshold = 1.0 / (2.0 * eps * n)
    shift = 0
    while np.sum(1.0 / ((gaps + shift) * (gaps + shift + 1.0))) > threshold:
        shift += 1
    return shift


@dataclass(frozen=True, slots=True)
class UpperWalkState:
    """
    The walk after step k.

    ``spectrum`` is only kept when the walk runs with keep_spectra.
    """

    k: int
    u: float
    lambda_max: float
    potential: float
    cumulative_shift: int
    delta1: float = 0.0
    delta2: float = 0.0
    delta_r: int = 0
    max_level_ratio: float = 0.0
    violations: tuple[Violation, ...] = ()
    spectrum: SymmetricSpectrum | None = field(default=None, repr=False)


@dataclass(slots=True)
class UpperWalkResult:
    n: int
    m: int
    params: UpperShiftParams
    u_final: float
    lambda_max: float
    initial_potential: float
    trajectory: list[UpperWalkState]
    violations: list[Violation]
    moment_k: float

    @property
    def ratio(self) -> float:
        """u_m / (sqrt(m) + sqrt(n))^2."""
        return self.u_final / (math.sqrt(self.m) + math.sqrt(self.n)) ** 2

    @property
    def shift_budget(self) -> float:
        return 2.0 * self.params.eps * self.n

    @property
    def cumulative_shift(self) -> int:
        return self.trajectory[-1].cumulative_shift if self.trajectory else 0

    @property
    def hard_violations(self) -> list[Violation]:
        return [v for v in self.violations if v.is_hard]

    @property
    def mean_delta1(self) -> float:
        steps = self.trajectory[1:]
        return float(np.mean([s.delta1 for s in steps])) if steps else 0.0

    @property
    def mean_delta2(self) -> float:
        steps = self.trajectory[1:]
        return float(np.mean([s.delta2 for s in steps])) if steps else 0.0

    @property
    def delta1_trend_bound(self) -> float:
        """32 K sqrt(eps)."""
        return 32.0 * self.moment_k * math.sqrt(self.params.eps)

    @property
    def delta2_leading_term(self) -> float:
        """(1 + alpha) / (1 - m(u_0) - alpha)."""
        alpha = self.params.alpha
        return (1.0 + alpha) / (1.0 - self.initial_potential - alpha)

    def to_frame(self) -> pd.DataFrame:
        """Trajectory table: k, u_k, lambda_max, potential, Delta1, Delta2, Delta_R, max_level_ratio, violations."""
        return pd.DataFrame(
            {
                "k": [s.k for s in self.trajectory],
                "u_k": [s.u for s in self.trajectory],
                "lambda_max": [s.lambda_max for s in self.trajectory],
                "potential": [s.potential for s in self.trajectory],
                "Delta1": [s.delta1 for s in self.trajectory],
                "Delta2": [s.delta2 for s in self.trajectory],
                "Delta_R": [s.delta_r for s in self.trajectory],
                "max_level_ratio": [s.max_level_ratio for s in self.trajectory],
                "violations": [";".join(v.kind.value for v in s.violations) for s in self.trajectory],
            }
        )

    def summary(self) -> dict[str, float | int | str]:
        return {
            "walk": "upper",
            "n": self.n,
            "m": self.m,
            "eps": self.params.eps,
            "alpha": self.params.alpha,
            "u_final": self.u_final,
            "lambda_max": self.lambda_max,
            "ratio": self.ratio,
            "cumulative_shift": self.cumulative_shift,
            "shift_budget": self.shift_budget,
            "mean_delta1": self.mean_delta1,
            "delta1_trend_bound": self.delta1_trend_bound,
            "mean_delta2": self.mean_delta2,
            "delta2_leading_term": self.delta2_leading_term,
            "hard_violations": len(self.hard_violations),
            "soft_violations": len(self.violations) - len(self.hard_violations),
        }


def _composed_condition(spectrum: SymmetricSpectrum, vector: RankOneVector, u: float, delta: float) -> bool:
    """Q1(Delta) < 1 and Q2(Delta) <= 1 - Q1(Delta)."""
    if delta <= 0:
        return True
    q1_value = Q1(spectrum, vector, u, delta)
    return q1_value < 1.0 and Q2(spectrum, vector, u, delta) <= 1.0 - q1_value + BOUND_SLACK


def run_upper_walk(
    source: SampleBatch | SamplerModel,
    params: UpperShiftParams | None = None,
    *,
    m: int | None = None,
    eps: float = 0.1,
    mode: UpdateMode | None = None,
    keep_spectra: bool = False,
    stream: tuple[int, ...] = (),
) -> UpperWalkResult:
    """
    Walk the upper barrier through the rows of a batch.

    Args:
        source: A batch, or a sampler model together with ``m``
        params: Shift parameters; by default alpha is selected for
            gamma = m / n and ``eps``
        m: Number of rows to draw when ``source`` is a model
        eps: Accuracy parameter used when ``params`` is not given
        mode: Rank-one update path, the library setting by default
        keep_spectra: Store every intermediate spectrum in the trajectory
        stream: Sampler stream when drawing from a model

    Raises:
        InvalidParameterError: If m < 1
        InvariantViolationError: If m(u) + alpha reaches 1 or the barrier
            falls below lambda_max
    """
    mode = UpdateMode(mode or settings.update_mode)
    batch = resolve_batch(source, m, stream)
    n, m = batch.n, batch.m
    if m < 1:
        raise InvalidParameterError(f"the upper walk needs m >= 1, got {m}")
    params = params or UpperShiftParams.select(eps, m / n)
    eps = params.eps
    moment_k = params.moment_k if params.moment_k is not None else moment_bound(batch.model, params.kappa)

    spectrum = SymmetricSpectrum.zero(n)
    u = n + math.sqrt(m * n)
    potential = stieltjes_upper(spectrum, u)
    initial_potential = potential

    violations: list[Violation] = []
    trajectory = [
        UpperWalkState(0, u, spectrum.lambda_max, potential, 0, spectrum=spectrum if keep_spectra else None)
    ]
    cumulative = 0

    logger.info("upper walk: n=%d m=%d eps=%g alpha=%.6g mode=%s", n, m, eps, params.alpha, mode.value)

    for k, row in enumerate(batch.rows, start=1):
        step_violations: list[Violation] = []

        if potential + params.alpha >= 1.0:
            violations.append(
                Violation(k, ViolationKind.ALPHA_BUDGET, f"m(u) + alpha = {potential + params.alpha:.6g}")
            )
            raise InvariantViolationError(f"upper walk ran out of potential budget at step {k}", violations)

        vector = RankOneVector.from_vector(row, spectrum)
        levels = level_sets(spectrum, u)
        if levels.residual.size:
            step_violations.append(
                Violation(k, ViolationKind.RESIDUAL_LEVELS, f"{levels.residual.size} index(es) with u - lambda_i < 1")
            )
        if not levels.ratio_bound_holds(eps, n):
            step_violations.append(Violation(k, ViolationKind.LEVEL_RATIO, "|I_j| / 4^j above sqrt(|I_j| / (eps n))"))

        first = construct_delta1(spectrum, vector, u, params, levels)
        if not first.holds:
            step_violations.append(
                Violation(k, ViolationKind.DELTA1_BOUND, f"Q1(Delta_1) = {first.q1:.6g} > {first.bound:.6g}")
            )
        second = construct_delta2(spectrum, vector, u, params)
        if not second.holds:
            step_violations.append(
                Violation(k, ViolationKind.CERTIFICATE, f"Q2(Delta_2) = {second.q2:.6g} > {second.budget:.6g}")
            )

        shift = first.value + second.value
        if not _composed_condition(spectrum, vector, u, shift):
            step_violations.append(
                Violation(k, ViolationKind.COMPOSED_CONDITION, "Q1 + Q2 > 1 at Delta_1 + Delta_2")
            )

        spectrum = rank_one_update(spectrum, vector, mode)
        v = u + shift
        if v <= spectrum.lambda_max:
            step_violations.append(
                Violation(k, ViolationKind.BARRIER, f"u={v} <= lambda_max={spectrum.lambda_max}")
            )
            violations.extend(step_violations)
            raise InvariantViolationError(f"upper barrier fell below the spectrum at step {k}", violations)

        delta_r = regularity_shift_upper(spectrum, v, eps, n)
        u = v + delta_r
        cumulative += delta_r
        previous = potential
        potential = stieltjes_upper(spectrum, u)

        if exceeds(potential, previous):
            step_violations.append(
                Violation(k, ViolationKind.POTENTIAL, f"potential {potential:.12g} > {previous:.12g}")
            )

        violations.extend(step_violations)
        trajectory.append(
            UpperWalkState(
                k=k,
                u=u,
                lambda_max=spectrum.lambda_max,
                potential=potential,
                cumulative_shift=cumulative,
                delta1=first.value,
                delta2=second.value,
                delta_r=delta_r,
                max_level_ratio=levels.max_ratio,
                violations=tuple(step_violations),
                spectrum=spectrum if keep_spectra else None,
            )
        )
        logger.debug(
            "k=%d u=%.6g Delta1=%.4g Delta2=%.4g Delta_R=%d m=%.6g",
            k, u, first.value, second.value, delta_r, potential,
        )

    result = UpperWalkResult(
        n=n,
        m=m,
        params=params,
        u_final=u,
        lambda_max=spectrum.lambda_max,
        initial_potential=initial_potential,
        trajectory=trajectory,
        violations=violations,
        moment_k=moment_k,
    )
    if cumulative > result.shift_budget:
        violations.append(
            Violation(m, ViolationKind.BUDGET, f"sum Delta_R = {cumulative} > {result.shift_budget:.6g}")
        )

    composed = sum(1 for v in violations if v.kind is ViolationKind.COMPOSED_CONDITION)
    if composed:
        logger.warning("composed shift condition failed on %d of %d steps", composed, m)
    logger.info("upper walk done: u_m=%.6g lambda_max=%.6g ratio=%.4f", u, result.lambda_max, result.ratio)
    return result
