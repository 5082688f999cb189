"""
Empirical testers for the weak and strong tail-projection properties.

(STP)    P(|P X|^2 - rank P >= t) <= g(r) r / t^2        for t >= f(r) r
(WTP-a)  sup_y E(<X, y>^2 1{<X, y>^2 >= M}) -> 0        as M -> infinity
(WTP-b)  P(|P X|^2 - rank P >= f(r) r) <= g(r)

Population bounds are compared against Monte Carlo frequencies with a
three standard-error margin. A finite run fixes an n grid, so uniformity
of the (WTP) terms over all n is not something these reports can show.
"""

import logging
import math
from dataclasses import dataclass, field
from io import StringIO
from pathlib import Path
from typing import Callable, Iterator, NamedTuple, Sequence

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from edgelab.config import settings
from edgelab.errors import InvalidParameterError
from edgelab.samplers import SamplerModel, generator, sample_rows
from edgelab.tails.projections import ProjectionSpec, random_projection

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

MIN_TRIALS = 100
SLACK_SIGMAS = 3.0

TAIL_COLUMNS = ["model", "n", "r", "t", "p_hat", "stderr", "bound", "pass"]


def _default_f(r: int) -> float:
    return r ** -0.25


def _default_g(r: int) -> float:
    return 10.0 / math.sqrt(r)


def _default_h(_m: float) -> float:
    return 0.0


@dataclass(frozen=True, slots=True)
class TailFunctions:
    """
    The rate functions of the tail-projection properties.

    Attributes:
        f: rank -> [0, 1], lower end of the admissible t range is f(r) r
        g: rank -> [0, inf), scale of the tail bound
        h: M -> [0, inf), uniform-integrability envelope; 1 - h(1/eps)
           is the truncated mass used by the lower walk's expected shift
    """

    f: Callable[[int], float] = _default_f
    g: Callable[[int], float] = _default_g
    h: Callable[[float], float] = _default_h

    def check(self, ranks: Sequence[int]) -> None:
        """Raise InvalidParameterError unless f, g are non-increasing and f <= 1 on ranks."""
        ordered = sorted(ranks)
        f_values = [self.f(r) for r in ordered]
        g_values = [self.g(r) for r in ordered]
        if any(value > 1.0 or value < 0.0 for value in f_values):
            raise InvalidParameterError("f must map ranks into [0, 1]")
        if any(b > a for a, b in zip(f_values, f_values[1:])) or any(
            b > a for a, b in zip(g_values, g_values[1:])
        ):
            raise InvalidParameterError("f and g must be non-increasing")


class TailEstimate(NamedTuple):
    probability: float
    stderr: float
    trials: int


@dataclass(slots=True)
class TailReport:
    """
    Per-cell tail estimates with their bounds.

    ``frame`` has the columns model, n, r, t, p_hat, stderr, bound, pass.
    """

    frame: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=TAIL_COLUMNS))

    @property
    def passed(self) -> bool:
        return bool(self.frame["pass"].all())

    def failures(self) -> pd.DataFrame:
        return self.frame[~self.frame["pass"]]

    def to_csv(self, path: Path | None = None) -> str:
        """Write the table to ``path`` and return the CSV text."""
        buffer = StringIO()
        self.frame.to_csv(buffer, index=False)
        text = buffer.getvalue()
        if path is not None:
            path.write_text(text)
        return text


@dataclass(slots=True)
class TruncatedMomentReport:
    """
    Truncated second moments E(<X, y>^2 1{<X, y>^2 >= M}) per direction.

    ``frame`` has the columns model, n, M, direction, estimate, stderr.
    """

    frame: pd.DataFrame

    def sup(self) -> pd.DataFrame:
        """Maximum over directions for every (n, M)."""
        idx = self.frame.groupby(["n", "M"])["estimate"].idxmax()
        return self.frame.loc[idx].reset_index(drop=True)

    def is_non_increasing(self, sigmas: float = SLACK_SIGMAS) -> bool:
        """Whether the sup estimate decreases in M for every n, up to ``sigmas`` stderr."""
        for _, group in self.sup().groupby("n"):
            group = group.sort_values("M")
            estimate = group["estimate"].to_numpy()
            slack = sigmas * group["stderr"].to_numpy()
            if np.any(estimate[1:] > estimate[:-1] + slack[:-1] + slack[1:]):
                return False
        return True

    def to_csv(self, path: Path | None = None) -> str:
        buffer = StringIO()
        self.frame.to_csv(buffer, index=False)
        text = buffer.getvalue()
        if path is not None:
            path.write_text(text)
        return text


@dataclass(frozen=True, slots=True)
class DecouplingReport:
    """Moment facts for the decoupled quadratic form <X, P_0 X>."""

    model: str
    n: int
    r: int
    trials: int
    second_moment: float
    second_moment_stderr: float
    tail_frequency: float
    tail_stderr: float

    @property
    def second_moment_bound(self) -> float:
        return 64.0 * self.r

    @property
    def tail_bound(self) -> float:
        return 64.0 / math.sqrt(self.r)

    @property
    def second_moment_pass(self) -> bool:
        return self.second_moment <= self.second_moment_bound + SLACK_SIGMAS * self.second_moment_stderr

    @property
    def tail_pass(self) -> bool:
        return self.tail_frequency <= self.tail_bound + SLACK_SIGMAS * self.tail_stderr

    @property
    def passed(self) -> bool:
        return self.second_moment_pass and self.tail_pass

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "model": self.model,
                    "n": self.n,
                    "r": self.r,
                    "quantity": "second_moment",
                    "estimate": self.second_moment,
                    "stderr": self.second_moment_stderr,
                    "bound": self.second_moment_bound,
                    "pass": self.second_moment_pass,
                },
                {
                    "model": self.model,
                    "n": self.n,
                    "r": self.r,
                    "quantity": "tail_frequency",
                    "estimate": self.tail_frequency,
                    "stderr": self.tail_stderr,
                    "bound": self.tail_bound,
                    "pass": self.tail_pass,
                },
            ]
        )


def _check_trials(trials: int) -> None:
    if trials < MIN_TRIALS:
        raise InvalidParameterError(f"at least {MIN_TRIALS} trials are required, got {trials}")


def _chunks(model: SamplerModel, trials: int, stream: tuple[int, ...]) -> Iterator[FloatArray]:
    """Draw ``trials`` rows in chunks, chunk c on stream (*stream, c)."""
    size = settings.chunk_size
    for index, start in enumerate(range(0, trials, size)):
        rows = min(size, trials - start)
        yield sample_rows(model, rows, generator(model.seed, *stream, index))


def _binomial_stderr(p: float, trials: int) -> float:
    return math.sqrt(p * (1.0 - p) / trials)


def projection_excess(
    model: SamplerModel,
    projection: ProjectionSpec,
    trials: int,
    *,
    stream: tuple[int, ...] = (),
) -> FloatArray:
    """Samples of |P X|^2 - rank P."""
    _check_trials(trials)
    parts = [projection.norms_sq(rows) for rows in _chunks(model, trials, stream)]
    return np.concatenate(parts) - projection.rank


def _tail_frequency(excess: FloatArray, t: float, two_sided: bool) -> TailEstimate:
    hits = np.abs(excess) >= t if two_sided else excess >= t
    p = float(np.mean(hits))
    return TailEstimate(p, _binomial_stderr(p, excess.size), int(excess.size))


def estimate_projection_tail(
    model: SamplerModel,
    projection: ProjectionSpec,
    t: float,
    trials: int,
    *,
    two_sided: bool = False,
    stream: tuple[int, ...] = (),
) -> TailEstimate:
    """
    Empirical P(|P X|^2 - rank P >= t) with its binomial standard error.

    With ``two_sided`` the event is |(|P X|^2 - rank P)| >= t.
    """
    if t <= 0:
        raise InvalidParameterError(f"t must be positive, got {t}")
    excess = projection_excess(model, projection, trials, stream=stream)
    return _tail_frequency(excess, t, two_sided)


def _projection_for(model: SamplerModel, r: int, index: int) -> ProjectionSpec:
    return random_projection(model.dim, r, model.seed, stream=(1, index))


def check_stp(
    model: SamplerModel,
    rank_grid: Sequence[int],
    t_grid: Sequence[float],
    trials: int,
    tails: TailFunctions | None = None,
    *,
    relative: bool = False,
    two_sided: bool = False,
) -> TailReport:
    """
    Strong tail projection check on a (rank, t) grid.

    One Haar-random projection is drawn per rank and its samples are
    reused for every t. With ``relative`` the grid holds multiples of r.

    Raises:
        InvalidParameterError: If a grid is empty or some t lies below f(r) r
    """
    tails = tails or TailFunctions()
    if not rank_grid or not t_grid:
        raise InvalidParameterError("rank and t grids must be non-empty")
    tails.check(rank_grid)

    cells: list[tuple[int, list[float]]] = []
    for r in rank_grid:
        ts = [float(t) * r if relative else float(t) for t in t_grid]
        floor = tails.f(r) * r
        if min(ts) < floor:
            raise InvalidParameterError(f"t={min(ts):g} is below f(r) r = {floor:g} for r={r}")
        cells.append((r, ts))

    rows = []
    for index, (r, ts) in enumerate(cells):
        projection = _projection_for(model, r, index)
        excess = projection_excess(model, projection, trials, stream=(2, index))
        for t in ts:
            estimate = _tail_frequency(excess, t, two_sided)
            bound = tails.g(r) * r / t**2
            rows.append(
                {
                    "model": model.label,
                    "n": model.dim,
                    "r": r,
                    "t": t,
                    "p_hat": estimate.probability,
                    "stderr": estimate.stderr,
                    "bound": bound,
                    "pass": estimate.probability <= bound + SLACK_SIGMAS * estimate.stderr,
                }
            )
        logger.debug("STP cell r=%d done for %s", r, model.label)

    report = TailReport(pd.DataFrame(rows, columns=TAIL_COLUMNS))
    if not report.passed:
        logger.info("STP check for %s failed %d cell(s)", model.label, len(report.failures()))
    return report


def check_wtp_b(
    model: SamplerModel,
    rank_grid: Sequence[int],
    trials: int,
    tails: TailFunctions | None = None,
) -> TailReport:
    """
    Weak tail projection, part b: P(|P X|^2 - r >= f(r) r) against g(r).
    """
    tails = tails or TailFunctions()
    if not rank_grid:
        raise InvalidParameterError("rank grid must be non-empty")
    tails.check(rank_grid)

    rows = []
    for index, r in enumerate(rank_grid):
        projection = _projection_for(model, r, index)
        excess = projection_excess(model, projection, trials, stream=(3, index))
        t = tails.f(r) * r
        estimate = _tail_frequency(excess, t, two_sided=False)
        bound = tails.g(r)
        rows.append(
            {
                "model": model.label,
                "n": model.dim,
                "r": r,
                "t": t,
                "p_hat": estimate.probability,
                "stderr": estimate.stderr,
                "bound": bound,
                "pass": estimate.probability <= bound + SLACK_SIGMAS * estimate.stderr,
            }
        )
    return TailReport(pd.DataFrame(rows, columns=TAIL_COLUMNS))


def _directions(n: int, count: int, seed: int, stream: tuple[int, ...]) -> list[tuple[str, FloatArray]]:
    directions = [("coordinate", np.eye(n)[0]), ("diagonal", np.full(n, 1.0 / math.sqrt(n)))]
    if count > 0:
        frame = generator(seed, *stream).standard_normal((count, n))
        frame /= np.linalg.norm(frame, axis=1, keepdims=True)
        directions.extend((f"random_{i}", frame[i]) for i in range(count))
    return directions


def check_wtp_a(
    model: SamplerModel,
    n_grid: Sequence[int],
    m_grid: Sequence[float],
    directions_per_n: int,
    trials: int,
) -> TruncatedMomentReport:
    """
    Truncated second moments E(<X, y>^2 1{<X, y>^2 >= M}) over the
    coordinate, diagonal and ``directions_per_n`` random directions.

    Raises:
        InvalidParameterError: If m_grid is not increasing
    """
    if not n_grid or not m_grid:
        raise InvalidParameterError("n and M grids must be non-empty")
    if any(b <= a for a, b in zip(m_grid, m_grid[1:])):
        raise InvalidParameterError("M grid must be increasing")
    _check_trials(trials)

    rows = []
    for n_index, n in enumerate(n_grid):
        sized = model.with_dim(int(n))
        directions = _directions(int(n), directions_per_n, model.seed, (4, n_index))
        basis = np.stack([vector for _, vector in directions], axis=1)
        squares = np.concatenate(
            [(chunk @ basis) ** 2 for chunk in _chunks(sized, trials, (5, n_index))]
        )
        for m_level in m_grid:
            truncated = squares * (squares >= m_level)
            means = truncated.mean(axis=0)
            stderrs = truncated.std(axis=0, ddof=1) / math.sqrt(trials)
            for (name, _), mean, stderr in zip(directions, means, stderrs):
                rows.append(
                    {
                        "model": model.label,
                        "n": int(n),
                        "M": float(m_level),
                        "direction": name,
                        "estimate": float(mean),
                        "stderr": float(stderr),
                    }
                )
    return TruncatedMomentReport(pd.DataFrame(rows))


def decoupled_moment_check(
    model: SamplerModel,
    projection: ProjectionSpec,
    trials: int,
    *,
    stream: tuple[int, ...] = (),
) -> DecouplingReport:
    """
    Estimate E<X, P_0 X>^2 and P(|<X, P_0 X>| > r^{3/4}) where P_0 is the
    projection with zeroed diagonal, against the bounds 64 r and 64 / sqrt(r).

    Raises:
        InvalidParameterError: If the model's coordinates are not i.i.d.
    """
    if not model.is_iid:
        raise InvalidParameterError(
            f"decoupling bounds need i.i.d. coordinates, {model.label} does not have them"
        )
    _check_trials(trials)
    r = projection.rank
    diagonal = np.einsum("ij,ij->i", projection.basis, projection.basis)

    forms = []
    for rows in _chunks(model, trials, stream):
        forms.append(projection.norms_sq(rows) - (rows * rows) @ diagonal)
    form = np.concatenate(forms)

    squares = form * form
    hits = np.abs(form) > r**0.75
    tail = float(np.mean(hits))
    return DecouplingReport(
        model=model.label,
        n=projection.dim,
        r=r,
        trials=trials,
        second_moment=float(squares.mean()),
        second_moment_stderr=float(squares.std(ddof=1) / math.sqrt(trials)),
        tail_frequency=tail,
        tail_stderr=_binomial_stderr(tail, trials),
    )
