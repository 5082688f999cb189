"""
Experiment runners and the run_experiment entry point.

Every trial draws from its own stream (seed, trial), so results do not
depend on the number of workers; joblib returns them in trial order.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy import linalg

from edgelab.barrier import (
    LowerShiftParams,
    LowerWalkResult,
    UpperShiftParams,
    UpperWalkResult,
    run_lower_walk,
    run_upper_walk,
)
from edgelab.config import settings
from edgelab.errors import InvalidParameterError, InvariantViolationError
from edgelab.harness.config import ExperimentConfig, ExperimentKind
from edgelab.harness.convergence import convergence_table
from edgelab.harness.results import EdgeResult, ExperimentOutput, write_outputs
from edgelab.mp import ESD, MPParams, ks_distance, mp_table
from edgelab.samplers import empirical_covariance, sample_batch
from edgelab.tails import check_stp, check_wtp_a, decoupled_moment_check, random_projection

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VIOLATION = 2


def _parallel(config: ExperimentConfig) -> Parallel:
    return Parallel(n_jobs=config.n_jobs or settings.n_jobs)


def _edge_trial(config: ExperimentConfig, trial: int) -> tuple[float, float]:
    batch = sample_batch(config.sampler(), config.m, stream=(trial,))
    values = linalg.eigvalsh(empirical_covariance(batch))
    return float(values[0]), float(values[-1])


def edges_mc(config: ExperimentConfig) -> ExperimentOutput:
    """Extreme eigenvalues of Sigma_hat over independent trials."""
    trials = config.resolved_trials
    pairs = _parallel(config)(delayed(_edge_trial)(config, t) for t in range(trials))
    values = np.array(pairs)
    edges = EdgeResult(config.n, config.m, values[:, 0], values[:, 1])
    return ExperimentOutput(tables={"trials": edges.to_frame()}, summary=edges.summary())


def _lower_trial(config: ExperimentConfig, trial: int) -> LowerWalkResult:
    return run_lower_walk(
        config.sampler(),
        LowerShiftParams(config.resolved_eps),
        m=config.m,
        mode=config.mode,
        stream=(trial,),
    )


def _upper_trial(config: ExperimentConfig, trial: int) -> UpperWalkResult:
    params = UpperShiftParams.select(config.resolved_eps, config.m / config.n)
    return run_upper_walk(config.sampler(), params, m=config.m, mode=config.mode, stream=(trial,))


def _walk(config: ExperimentConfig, runner: Callable[[ExperimentConfig, int], LowerWalkResult | UpperWalkResult]) -> ExperimentOutput:
    trials = config.resolved_trials
    results = _parallel(config)(delayed(runner)(config, t) for t in range(trials))

    summaries = pd.DataFrame([{"trial": t, **r.summary()} for t, r in enumerate(results)])
    tables = {"summary": summaries}
    for t, result in enumerate(results):
        tables[f"trajectory_{t}"] = result.to_frame()

    violations = [f"trial {t}: {v}" for t, r in enumerate(results) for v in r.hard_violations]
    summary = {
        "trials": trials,
        "mean_ratio": float(summaries["ratio"].mean()),
        "hard_violations": len(violations),
        "soft_violations": int(summaries["soft_violations"].sum()),
    }
    return ExperimentOutput(tables=tables, summary=summary, violations=violations)


def walk_lower(config: ExperimentConfig) -> ExperimentOutput:
    if config.m <= config.n:
        raise InvalidParameterError(f"walk-lower needs m > n, got m={config.m}, n={config.n}")
    return _walk(config, _lower_trial)


def walk_upper(config: ExperimentConfig) -> ExperimentOutput:
    return _walk(config, _upper_trial)


def tail_stp(config: ExperimentConfig) -> ExperimentOutput:
    report = check_stp(
        config.sampler(),
        config.resolved_ranks,
        config.t_factors,
        config.resolved_trials,
        relative=True,
        two_sided=config.two_sided,
    )
    failed = len(report.failures())
    return ExperimentOutput(
        tables={"report": report.frame},
        summary={"cells": len(report.frame), "failed_cells": failed, "passed": report.passed},
        failed_cells=failed,
    )


def tail_wtpa(config: ExperimentConfig) -> ExperimentOutput:
    report = check_wtp_a(
        config.sampler(),
        config.n_grid or [config.n],
        config.m_grid,
        config.directions,
        config.resolved_trials,
    )
    decreasing = report.is_non_increasing()
    return ExperimentOutput(
        tables={"report": report.frame, "sup": report.sup()},
        summary={"non_increasing": decreasing},
        failed_cells=0 if decreasing else 1,
    )


def decoupling(config: ExperimentConfig) -> ExperimentOutput:
    rank = config.rank or max(1, config.n // 4)
    projection = random_projection(config.n, rank, config.seed)
    report = decoupled_moment_check(config.sampler(), projection, config.resolved_trials)
    return ExperimentOutput(
        tables={"report": report.to_frame()},
        summary={"passed": report.passed},
        failed_cells=0 if report.passed else 1,
    )


def _ks_trial(config: ExperimentConfig, trial: int) -> dict[str, float]:
    esd = ESD.from_batch(sample_batch(config.sampler(), config.m, stream=(trial,)))
    mp = MPParams(esd.rho)
    return {
        "trial": trial,
        "ks": ks_distance(esd, mp),
        "ks_continuous": ks_distance(esd, mp, continuous_part=True),
        "lambda_min": float(esd.eigenvalues[0]),
        "lambda_max": float(esd.eigenvalues[-1]),
    }


def mp_compare(config: ExperimentConfig) -> ExperimentOutput:
    trials = config.resolved_trials
    rows = _parallel(config)(delayed(_ks_trial)(config, t) for t in range(trials))
    frame = pd.DataFrame(rows)
    return ExperimentOutput(
        tables={"ks": frame, "law": mp_table(config.n / config.m)},
        summary={
            "rho": config.n / config.m,
            "mean_ks": float(frame["ks"].mean()),
            "mean_ks_continuous": float(frame["ks_continuous"].mean()),
        },
    )


def convergence(config: ExperimentConfig) -> ExperimentOutput:
    n_grid = config.n_grid or [config.n]
    table = convergence_table(
        config.sampler(), config.rho, n_grid, config.resolved_trials, n_jobs=config.n_jobs
    )
    return ExperimentOutput(tables={"table": table}, summary={"rho": config.rho, "rows": len(table)})


RUNNERS: dict[ExperimentKind, Callable[[ExperimentConfig], ExperimentOutput]] = {
    ExperimentKind.EDGES_MC: edges_mc,
    ExperimentKind.WALK_LOWER: walk_lower,
    ExperimentKind.WALK_UPPER: walk_upper,
    ExperimentKind.TAIL_STP: tail_stp,
    ExperimentKind.TAIL_WTPA: tail_wtpa,
    ExperimentKind.DECOUPLING: decoupling,
    ExperimentKind.MP_COMPARE: mp_compare,
    ExperimentKind.CONVERGENCE: convergence,
}


@dataclass(slots=True)
class ExperimentRun:
    exit_code: int
    output: ExperimentOutput
    files: list[Path] = field(default_factory=list)


def run_experiment(config: ExperimentConfig, *, write: bool = True) -> ExperimentRun:
    """
    Run one experiment and write its outputs.

    Exit codes: 0 success, 2 when a hard invariant failed (or, with
    ``strict``, a tail cell failed). Configuration problems raise
    ConfigError / InvalidParameterError for the caller to map to 1.
    """
    logger.info("running %s (seed=%d, hash=%s)", config.kind.value, config.seed, config.config_hash()[:12])
    try:
        output = RUNNERS[config.kind](config)
    except InvariantViolationError as e:
        logger.error("invariant violation: %s", e)
        output = ExperimentOutput(
            tables={},
            summary={"error": str(e)},
            violations=[str(v) for v in e.violations] or [str(e)],
        )

    exit_code = EXIT_OK
    if output.hard_violations or (config.strict and output.failed_cells):
        exit_code = EXIT_VIOLATION
    if output.failed_cells and not config.strict:
        logger.warning("%d tail cell(s) failed (report-only)", output.failed_cells)

    files = write_outputs(config, output, exit_code) if write else []
    return ExperimentRun(exit_code, output, files)
