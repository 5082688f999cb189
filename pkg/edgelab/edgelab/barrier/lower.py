"""
Smallest-eigenvalue barrier walk.

Starting from A = 0 and u_0 = n - sqrt(mn), every rank-one update
A <- A + x x^T moves the barrier by a feasible lower shift delta and then
back by an integer regularity shift delta_R:

    u_k = u_{k-1} + delta_k - delta_R_k

The lower potential m(u) = tr((A - u)^{-1}) never increases, so u_k stays
below lambda_min(A_k) and u_m certifies a lower bound for lambda_min(A_n).
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from edgelab.barrier.common import (
    Violation,
    ViolationKind,
    exceeds,
    resolve_batch,
)
from edgelab.config import UpdateMode, settings
from edgelab.errors import BarrierViolationError, InvalidParameterError, InvariantViolationError
from edgelab.samplers import SampleBatch, SamplerModel
from edgelab.spectral import (
    RankOneVector,
    SymmetricSpectrum,
    as_rank_one,
    rank_one_update,
    stieltjes_lower,
)
from edgelab.tails import TailFunctions

logger = logging.getLogger(__name__)

CERTIFICATE_SLACK = 1e-9
# fewest defined steps before the concentration frequency is judged
CONCENTRATION_MIN_STEPS = 1000
ASYMPTOTIC_EPS = 12.0**-3


@dataclass(frozen=True, slots=True)
class LowerShiftParams:
    """
    Accuracy parameter of the lower shift.

    ``truncation`` caps the weights <x, x_i>^2 that count towards delta and
    ``gap_requirement`` is the distance lambda_min - u under which the
    shift is guaranteed feasible.
    """

    eps: float = 0.2

    def __post_init__(self) -> None:
        if not 0.0 < self.eps < 1.0:
            raise InvalidParameterError(f"eps must lie in (0, 1), got {self.eps}")

    @property
    def truncation(self) -> float:
        return 1.0 / self.eps

    @property
    def gap_requirement(self) -> float:
        return 2.0 / self.eps**2

    @property
    def asymptotic_regime(self) -> bool:
        return self.eps < ASYMPTOTIC_EPS


def _shifted_gaps(spectrum: SymmetricSpectrum, u: float, delta: float) -> np.ndarray:
    barrier = u + delta
    if barrier >= spectrum.lambda_min:
        raise BarrierViolationError(
            f"u + delta = {barrier} is not below lambda_min = {spectrum.lambda_min}",
            barrier=barrier,
            edge=spectrum.lambda_min,
        )
    return spectrum.eigenvalues - barrier


def q1(spectrum: SymmetricSpectrum, x: RankOneVector | np.ndarray, u: float, delta: float = 0.0) -> float:
    """x^T (A - u - delta)^{-1} x."""
    gaps = _shifted_gaps(spectrum, u, delta)
    return float(np.sum(as_rank_one(x, spectrum).weights / gaps))


def q2(spectrum: SymmetricSpectrum, x: RankOneVector | np.ndarray, u: float, delta: float = 0.0) -> float:
    """x^T (A - u - delta)^{-2} x / tr((A - u - delta)^{-2})."""
    gaps = _shifted_gaps(spectrum, u, delta)
    inverse_sq = 1.0 / gaps**2
    return float(np.sum(as_rank_one(x, spectrum).weights * inverse_sq) / np.sum(inverse_sq))


@dataclass(frozen=True, slots=True)
class LowerShift:
    """
    A lower shift with everything the walk logs about it.

    Attributes:
        delta: The shift
        potential: m(u) before the update
        gap_ok: Whether lambda_min - u met the gap requirement
        indicator: Whether q1(1/eps) <= (1 + eps) m(u) + eps
        q1_truncated: q1(1/eps), None when u + 1/eps is not below lambda_min
        certificate: q2(delta) - delta (1 + q1(delta)), None when gap_ok is false
    """

    delta: float
    potential: float
    gap_ok: bool
    indicator: bool
    q1_truncated: float | None
    certificate: float | None

    def concentration_event(self, eps: float) -> bool | None:
        """q1(1/eps) + 1 >= (1 + eps)(1 + m(u)), or None when q1(1/eps) is undefined."""
        if self.q1_truncated is None:
            return None
        return self.q1_truncated + 1.0 >= (1.0 + eps) * (1.0 + self.potential)


def construct_lower_shift(
    spectrum: SymmetricSpectrum,
    x: RankOneVector | np.ndarray,
    u: float,
    params: LowerShiftParams,
) -> LowerShift:
    """
    Feasible lower shift

        delta = (1 - eps) 1{q1(1/eps) <= (1 + eps) m + eps} / ((1 + eps)(1 + m))
                * sum_i w_i 1{w_i <= 1/eps} (lambda_i - u)^{-2} / sum_i (lambda_i - u)^{-2}

    with w_i = <x, x_i>^2 and m = m(u). Below the gap requirement the
    shift falls back to zero.

    Raises:
        BarrierViolationError: If u >= lambda_min
    """
    eps = params.eps
    vector = as_rank_one(x, spectrum)
    potential = stieltjes_lower(spectrum, u)
    gap = spectrum.lambda_min - u

    q1_truncated = q1(spectrum, vector, u, params.truncation) if gap > params.truncation else None

    # rounding slack: eps = 1/sqrt(2) gives 2/eps^2 = 4 + 1ulp
    if gap < params.gap_requirement * (1.0 - 1e-12):
        return LowerShift(0.0, potential, False, False, q1_truncated, None)

    indicator = q1_truncated is not None and q1_truncated <= (1.0 + eps) * potential + eps
    delta = 0.0
    if indicator:
        weights = vector.weights
        inverse_sq = 1.0 / (spectrum.eigenvalues - u) ** 2
        truncated = np.where(weights <= params.truncation, weights, 0.0)
        share = float(np.sum(truncated * inverse_sq) / np.sum(inverse_sq))
        delta = (1.0 - eps) / ((1.0 + eps) * (1.0 + potential)) * share

    certificate = q2(spectrum, vector, u, delta) - delta * (1.0 + q1(spectrum, vector, u, delta))
    return LowerShift(delta, potential, True, indicator, q1_truncated, certificate)


def feasible_lower_shift(
    spectrum: SymmetricSpectrum,
    x: RankOneVector | np.ndarray,
    u: float,
    params: LowerShiftParams,
) -> float:
    """
    The shift delta of construct_lower_shift.

    Raises:
        BarrierViolationError: If u >= lambda_min
        InvariantViolationError: If a shift computed under the gap condition
            fails delta <= 1/eps or q2(delta) >= delta (1 + q1(delta))
    """
    shift = construct_lower_shift(spectrum, x, u, params)
    if not shift.gap_ok:
        logger.warning(
            "gap lambda_min - u = %.4g below 2/eps^2 = %.4g, lower shift falls back to 0",
            spectrum.lambda_min - u,
            params.gap_requirement,
        )
        return 0.0
    if shift.delta > params.truncation:
        raise InvariantViolationError(f"delta = {shift.delta} exceeds 1/eps")
    if shift.certificate is not None and shift.certificate < -CERTIFICATE_SLACK:
        raise InvariantViolationError(f"q2(delta) - delta (1 + q1(delta)) = {shift.certificate:.3e}")
    return shift.delta


def regularity_shift_lower(spectrum: SymmetricSpectrum, v: float, eps: float, n: int) -> int:
    """
    Smallest l >= 0 with m(v - l) - m(v - l - 1) <= 1 / (eps n).

    Raises:
        BarrierViolationError: If v >= lambda_min
    """
    if v >= spectrum.lambda_min:
        raise BarrierViolationError(
            f"v = {v} is not below lambda_min = {spectrum.lambda_min}",
            barrier=v,
            edge=spectrum.lambda_min,
        )
    threshold = 1.0 / (eps * n)
    gaps = spectrum.eigenvalues - v
    shift = 0
    # m(v - l) - m(v - l - 1) = sum_i 1 / ((g_i + l)(g_i + l + 1))
    while np.sum(1.0 / ((gaps + shift) * (gaps + shift + 1.0))) > threshold:
        shift += 1
    return shift


def expected_shift_floor(potential: float, eps: float, r: float) -> float:
    """
    Lower bound (1 - eps) r / ((1 + eps)(1 + m)) - 4 eps on the expected
    shift for an isotropic update, r being the truncated mass
    E(<X, x_i>^2 1{<X, x_i>^2 <= 1/eps}).
    """
    return (1.0 - eps) * r / ((1.0 + eps) * (1.0 + potential)) - 4.0 * eps


@dataclass(frozen=True, slots=True)
class LowerWalkState:
    """
    The walk after step k.

    ``spectrum`` is only kept when the walk runs with keep_spectra.
    """

    k: int
    u: float
    lambda_min: float
    potential: float
    cumulative_shift: int
    delta: float = 0.0
    delta_r: int = 0
    gap_ok: bool = False
    concentration: bool | None = None
    violations: tuple[Violation, ...] = ()
    spectrum: SymmetricSpectrum | None = field(default=None, repr=False)


@dataclass(slots=True)
class LowerWalkResult:
    n: int
    m: int
    params: LowerShiftParams
    u_final: float
    lambda_min: float
    initial_potential: float
    trajectory: list[LowerWalkState]
    violations: list[Violation]
    shift_floor: float

    @property
    def ratio(self) -> float:
        """u_m / (sqrt(m) - sqrt(n))^2."""
        return self.u_final / (math.sqrt(self.m) - math.sqrt(self.n)) ** 2

    @property
    def shift_budget(self) -> float:
        """eps n^2 / (sqrt(mn) - n)."""
        return self.params.eps * self.n**2 / (math.sqrt(self.m * self.n) - self.n)

    @property
    def cumulative_shift(self) -> int:
        return self.trajectory[-1].cumulative_shift if self.trajectory else 0

    @property
    def hard_violations(self) -> list[Violation]:
        return [v for v in self.violations if v.is_hard]

    @property
    def mean_delta(self) -> float:
        steps = self.trajectory[1:]
        return float(np.mean([s.delta for s in steps])) if steps else 0.0

    def concentration_frequency(self) -> tuple[float, float, int]:
        """
        Frequency of q1(1/eps) + 1 >= (1 + eps)(1 + m(u)) over the steps
        where it is defined, with its binomial standard error and the
        number of such steps.
        """
        events = [s.concentration for s in self.trajectory if s.concentration is not None]
        if not events:
            return math.nan, math.nan, 0
        p = float(np.mean(events))
        return p, math.sqrt(p * (1.0 - p) / len(events)), len(events)

    def to_frame(self) -> pd.DataFrame:
        """Trajectory table: k, u_k, lambda_min, potential, delta, delta_R, violation."""
        return pd.DataFrame(
            {
                "k": [s.k for s in self.trajectory],
                "u_k": [s.u for s in self.trajectory],
                "lambda_min": [s.lambda_min for s in self.trajectory],
                "potential": [s.potential for s in self.trajectory],
                "delta": [s.delta for s in self.trajectory],
                "delta_R": [s.delta_r for s in self.trajectory],
                "violation": [";".join(v.kind.value for v in s.violations) for s in self.trajectory],
            }
        )

    def summary(self) -> dict[str, float | int | str]:
        frequency, stderr, steps = self.concentration_frequency()
        return {
            "walk": "lower",
            "n": self.n,
            "m": self.m,
            "eps": self.params.eps,
            "u_final": self.u_final,
            "lambda_min": self.lambda_min,
            "ratio": self.ratio,
            "cumulative_shift": self.cumulative_shift,
            "shift_budget": self.shift_budget,
            "mean_delta": self.mean_delta,
            "shift_floor": self.shift_floor,
            "concentration_frequency": frequency,
            "concentration_stderr": stderr,
            "concentration_steps": steps,
            "hard_violations": len(self.hard_violations),
            "soft_violations": len(self.violations) - len(self.hard_violations),
        }


def run_lower_walk(
    source: SampleBatch | SamplerModel,
    params: LowerShiftParams | None = None,
    *,
    m: int | None = None,
    mode: UpdateMode | None = None,
    tails: TailFunctions | None = None,
    keep_spectra: bool = False,
    stream: tuple[int, ...] = (),
) -> LowerWalkResult:
    """
    Walk the lower barrier through the rows of a batch.

    Args:
        source: A batch, or a sampler model together with ``m``
        params: Shift parameters, eps = 0.2 by default
        m: Number of rows to draw when ``source`` is a model
        mode: Rank-one update path, the library setting by default
        tails: Rate functions, h gives the truncated mass 1 - h(1/eps)
        keep_spectra: Store every intermediate spectrum in the trajectory
        stream: Sampler stream when drawing from a model

    Raises:
        InvalidParameterError: If m <= n
        InvariantViolationError: If the barrier crosses lambda_min
    """
    params = params or LowerShiftParams()
    mode = UpdateMode(mode or settings.update_mode)
    tails = tails or TailFunctions()
    batch = resolve_batch(source, m, stream)
    n, m = batch.n, batch.m
    if m <= n:
        raise InvalidParameterError(f"the lower walk needs m > n, got m={m}, n={n}")

    eps = params.eps
    spectrum = SymmetricSpectrum.zero(n)
    u = n - math.sqrt(m * n)
    potential = stieltjes_lower(spectrum, u)
    initial_potential = potential
    truncated_mass = 1.0 - tails.h(params.truncation)

    violations: list[Violation] = []
    trajectory = [
        LowerWalkState(0, u, spectrum.lambda_min, potential, 0, spectrum=spectrum if keep_spectra else None)
    ]
    cumulative = 0
    floors: list[float] = []

    logger.info("lower walk: n=%d m=%d eps=%g mode=%s", n, m, eps, mode.value)

    for k, row in enumerate(batch.rows, start=1):
        step_violations: list[Violation] = []
        vector = RankOneVector.from_vector(row, spectrum)
        shift = construct_lower_shift(spectrum, vector, u, params)
        floors.append(expected_shift_floor(shift.potential, eps, truncated_mass))

        if not shift.gap_ok:
            step_violations.append(
                Violation(k, ViolationKind.GAP_FALLBACK, f"gap {spectrum.lambda_min - u:.4g} < 2/eps^2")
            )
        elif shift.delta > params.truncation or (
            shift.certificate is not None and shift.certificate < -CERTIFICATE_SLACK
        ):
            step_violations.append(
                Violation(k, ViolationKind.CERTIFICATE, f"delta={shift.delta:.4g} certificate={shift.certificate:.3e}")
            )

        spectrum = rank_one_update(spectrum, vector, mode)
        v = u + shift.delta
        if v >= spectrum.lambda_min:
            step_violations.append(
                Violation(k, ViolationKind.BARRIER, f"u={v} >= lambda_min={spectrum.lambda_min}")
            )
            violations.extend(step_violations)
            raise InvariantViolationError(f"lower barrier crossed the spectrum at step {k}", violations)

        delta_r = regularity_shift_lower(spectrum, v, eps, n)
        u = v - delta_r
        cumulative += delta_r
        previous = potential
        potential = stieltjes_lower(spectrum, u)

        if exceeds(potential, previous) or exceeds(potential, initial_potential):
            step_violations.append(
                Violation(k, ViolationKind.POTENTIAL, f"potential {potential:.12g} > {previous:.12g}")
            )

        violations.extend(step_violations)
        trajectory.append(
            LowerWalkState(
                k=k,
                u=u,
                lambda_min=spectrum.lambda_min,
                potential=potential,
                cumulative_shift=cumulative,
                delta=shift.delta,
                delta_r=delta_r,
                gap_ok=shift.gap_ok,
                concentration=shift.concentration_event(eps),
                violations=tuple(step_violations),
                spectrum=spectrum if keep_spectra else None,
            )
        )
        logger.debug("k=%d u=%.6g delta=%.4g delta_R=%d m=%.6g", k, u, shift.delta, delta_r, potential)

    result = LowerWalkResult(
        n=n,
        m=m,
        params=params,
        u_final=u,
        lambda_min=spectrum.lambda_min,
        initial_potential=initial_potential,
        trajectory=trajectory,
        violations=violations,
        shift_floor=float(np.mean(floors)) if floors else 0.0,
    )

    if cumulative > result.shift_budget:
        violations.append(
            Violation(m, ViolationKind.BUDGET, f"sum delta_R = {cumulative} > {result.shift_budget:.6g}")
        )

    frequency, stderr, steps = result.concentration_frequency()
    if steps >= CONCENTRATION_MIN_STEPS and frequency > 4.0 * eps**2 + 3.0 * stderr:
        logger.warning(
            "concentration event frequency %.4f exceeds 4 eps^2 + 3 stderr = %.4f over %d steps",
            frequency,
            4.0 * eps**2 + 3.0 * stderr,
            steps,
        )
        violations.append(
            Violation(m, ViolationKind.CONCENTRATION, f"frequency {frequency:.4f} > 4 eps^2 = {4.0 * eps**2:.4f}")
        )

    fallbacks = sum(1 for v in violations if v.kind is ViolationKind.GAP_FALLBACK)
    if fallbacks:
        logger.warning("lower walk used the zero-shift fallback on %d of %d steps", fallbacks, m)
    logger.info("lower walk done: u_m=%.6g lambda_min=%.6g ratio=%.4f", u, result.lambda_min, result.ratio)
    return result
