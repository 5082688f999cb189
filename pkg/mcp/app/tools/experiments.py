"""
Experiment and barrier-walk tools.
"""

from typing import Any, Literal, override

from fastmcp import FastMCP
from fastmcp.exceptions import ToolError
from fastmcp.utilities.logging import get_logger
from mcp.types import ToolAnnotations

from edgelab.barrier import LowerShiftParams, UpperShiftParams, run_lower_walk, run_upper_walk
from edgelab.errors import ConfigError, InvalidParameterError, InvariantViolationError
from edgelab.harness import load_config, run_experiment, to_jsonable
from edgelab.samplers import Family, SamplerModel

from app.icons import code
from app.tools.base import BaseToolProvider

logger = get_logger(__name__)

MAX_REPORTED_VIOLATIONS = 20


class ExperimentToolProvider(BaseToolProvider):
    """
    Provider for tools that run edgelab experiments.

    Nothing is written to disk; every tool returns the summary of its run.
    """

    def __init__(self, mcp: FastMCP):
        super().__init__(mcp)

    @override
    def register_tools(self):
        self.mcp.tool(
            name="run_experiment",
            title="Run Experiment",
            description=(
                "Run one seeded edgelab experiment (edges-mc, walk-lower, walk-upper, tail-stp, "
                "tail-wtpa, decoupling, mp-compare, convergence) and return its summary."
            ),
            tags={"experiments"},
            icons=[code],
            annotations=ToolAnnotations(
                title="Run Experiment",
                readOnlyHint=True,
                destructiveHint=False,
                idempotentHint=True,
                openWorldHint=False,
            ),
        )(self.run_experiment)

        self.mcp.tool(
            name="barrier_walk_summary",
            title="Barrier Walk Summary",
            description="Run one lower or upper barrier walk on fresh samples and summarise its trajectory.",
            tags={"experiments"},
            icons=[code],
            annotations=ToolAnnotations(
                title="Barrier Walk Summary",
                readOnlyHint=True,
                destructiveHint=False,
                idempotentHint=True,
                openWorldHint=False,
            ),
        )(self.barrier_walk_summary)

    def run_experiment(
        self,
        kind: str,
        n: int,
        m: int | None = None,
        rho: float | None = None,
        model: str = "gaussian",
        eps: float | None = None,
        trials: int | None = None,
        seed: int = 0,
        options: dict[str, Any] | None = None,  # pyright: ignore[reportExplicitAny]
    ) -> dict[str, Any]:  # pyright: ignore[reportExplicitAny]
        """
        Run an experiment and return its exit code, summary and violations.

        Args:
            kind: Experiment kind, e.g. "edges-mc"
            n: Dimension
            m: Sample count (or give rho)
            rho: Aspect ratio n / m
            model: Sampler family
            eps: Walk accuracy parameter
            trials: Trials, or Monte Carlo draws for tail kinds
            seed: Master seed
            options: Further config keys such as ranks, t_factors or strict
        """
        values = {
            "kind": kind,
            "n": n,
            "m": m,
            "rho": rho,
            "model": model,
            "eps": eps,
            "trials": trials,
            "seed": seed,
            **(options or {}),
        }
        for key in ("out", "format", "n_jobs"):
            values.pop(key, None)

        try:
            config = load_config(overrides=values)
        except ConfigError as e:
            raise ToolError(str(e)) from e
        self.check_limits(config.n, config.m, config.trials, n_grid=config.n_grid or (), rho=config.rho)

        try:
            run = run_experiment(config, write=False)
        except InvalidParameterError as e:
            raise ToolError(str(e)) from e

        logger.info("tool run of %s finished with exit code %d", config.kind.value, run.exit_code)
        return {
            "kind": config.kind.value,
            "config_hash": config.config_hash(),
            "exit_code": run.exit_code,
            "summary": to_jsonable(run.output.summary),
            "failed_cells": run.output.failed_cells,
            "violations": run.output.violations[:MAX_REPORTED_VIOLATIONS],
            "tables": sorted(run.output.tables),
        }

    def barrier_walk_summary(
        self,
        walk: Literal["lower", "upper"],
        n: int,
        m: int,
        eps: float | None = None,
        model: str = "gaussian",
        seed: int = 0,
    ) -> dict[str, Any]:  # pyright: ignore[reportExplicitAny]
        """
        Walk a barrier through m samples in dimension n.

        Args:
            walk: "lower" tracks lambda_min, "upper" tracks lambda_max
            n: Dimension
            m: Number of rank-one updates
            eps: Accuracy parameter, 0.2 for the lower and 0.1 for the upper walk by default
            model: Sampler family
            seed: Sampler seed

        Returns:
            The walk summary plus the first violations it logged
        """
        self.check_limits(n, m)
        try:
            sampler = SamplerModel(family=Family(model), dim=n, seed=seed)
            if walk == "lower":
                result = run_lower_walk(sampler, LowerShiftParams(eps or 0.2), m=m)
            else:
                result = run_upper_walk(sampler, UpperShiftParams.select(eps or 0.1, m / n), m=m)
        except (ValueError, InvalidParameterError) as e:
            raise ToolError(str(e)) from e
        except InvariantViolationError as e:
            return {
                "walk": walk,
                "failed": True,
                "error": str(e),
                "violations": [str(v) for v in e.violations[-MAX_REPORTED_VIOLATIONS:]],
            }

        return {
            **to_jsonable(result.summary()),
            "failed": False,
            "violations": [str(v) for v in result.violations[:MAX_REPORTED_VIOLATIONS]],
        }

