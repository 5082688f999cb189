"""
Command-line entry point.

    edgelab edges-mc --model gaussian --n 256 --rho 0.111 --trials 20 --seed 7
    edgelab walk-upper --config runs/upper.env --eps 0.05

Every flag overrides the matching key of ``--config``.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from edgelab import __version__
from edgelab.config import LogLevel, UpdateMode, settings
from edgelab.errors import ConfigError, InvalidParameterError
from edgelab.harness import EXIT_CONFIG, ExperimentKind, OutputFormat, load_config, run_experiment
from edgelab.log import configure_logging
from edgelab.samplers import Family

logger = logging.getLogger(__name__)

HELP = {
    ExperimentKind.EDGES_MC: "Monte Carlo extreme eigenvalues of the sample covariance",
    ExperimentKind.WALK_LOWER: "Lower barrier walk tracking lambda_min",
    ExperimentKind.WALK_UPPER: "Upper barrier walk tracking lambda_max",
    ExperimentKind.TAIL_STP: "Strong tail projection check",
    ExperimentKind.TAIL_WTPA: "Truncated second moments along directions",
    ExperimentKind.DECOUPLING: "Decoupled fourth-moment bounds for a projection",
    ExperimentKind.MP_COMPARE: "Kolmogorov distance of the ESD to Marchenko-Pastur",
    ExperimentKind.CONVERGENCE: "Normalised edge errors over a grid of n at fixed rho",
}


def _common_options() -> argparse.ArgumentParser:
    # defaults stay None so that only flags actually given override the config file
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", type=Path, help="Key-value config file")
    parser.add_argument("--model", choices=[f.value for f in Family], help="Sampler family")
    parser.add_argument("--nu", type=float, help="Student-t degrees of freedom")
    parser.add_argument("--tail-index", type=float, help="Symmetric Pareto tail index")
    parser.add_argument("--n", type=int, help="Dimension")

    size = parser.add_mutually_exclusive_group()
    size.add_argument("--m", type=int, help="Number of samples")
    size.add_argument("--rho", type=float, help="Aspect ratio n / m")

    parser.add_argument("--eps", type=float, help="Walk accuracy parameter")
    parser.add_argument("--trials", type=int, help="Independent trials or Monte Carlo draws")
    parser.add_argument("--seed", type=int, help="Master seed")
    parser.add_argument("--out", type=Path, help="Output stem or directory")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], help="Output format")
    parser.add_argument("--n-jobs", type=int, help="Parallel worker processes")
    parser.add_argument("--mode", choices=[m.value for m in UpdateMode], help="Rank-one update path")
    parser.add_argument("--ranks", help="Comma-separated projection ranks")
    parser.add_argument("--t-factors", help="Comma-separated t / r factors")
    parser.add_argument("--m-grid", help="Comma-separated truncation levels")
    parser.add_argument("--n-grid", help="Comma-separated dimensions")
    parser.add_argument("--rank", type=int, help="Projection rank for decoupling")
    parser.add_argument("--directions", type=int, help="Random directions per dimension")
    parser.add_argument("--two-sided", action="store_true", default=None, help="Two-sided tail events")
    parser.add_argument("--strict", action="store_true", default=None, help="Exit 2 on failed tail cells")
    parser.add_argument("--log-level", choices=[level.value for level in LogLevel], help="Logging level")
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgelab",
        description="Barrier walks and Monte Carlo checks of sample covariance edges.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="kind", required=True, metavar="EXPERIMENT")

    common = _common_options()
    for kind in ExperimentKind:
        subparsers.add_parser(kind.value, parents=[common], help=HELP[kind], description=HELP[kind])
    return parser


def overrides_from_args(args: argparse.Namespace) -> dict[str, Any]:
    """Flags that were given, keyed the way ExperimentConfig names them."""
    skip = {"config", "log_level"}
    return {key: value for key, value in vars(args).items() if key not in skip and value is not None}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(LogLevel(args.log_level) if args.log_level else settings.log_level)

    try:
        config = load_config(args.config, overrides_from_args(args))
        run = run_experiment(config)
    except (ConfigError, InvalidParameterError) as e:
        logger.error("%s", e)
        return EXIT_CONFIG

    logger.info("%s finished with exit code %d", config.kind.value, run.exit_code)
    return run.exit_code


if __name__ == "__main__":
    sys.exit(main())
