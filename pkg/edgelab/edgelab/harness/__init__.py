"""
Experiment orchestration: configs, trial fan-out and result files.
"""

from edgelab.harness.config import ExperimentConfig, ExperimentKind, OutputFormat, load_config
from edgelab.harness.convergence import convergence_table
from edgelab.harness.experiments import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_VIOLATION,
    ExperimentRun,
    run_experiment,
)
from edgelab.harness.results import EdgeResult, ExperimentOutput, RunMetadata, to_jsonable, write_outputs

__all__ = [
    "EXIT_CONFIG",
    "EXIT_OK",
    "EXIT_VIOLATION",
    "EdgeResult",
    "ExperimentConfig",
    "ExperimentKind",
    "ExperimentOutput",
    "ExperimentRun",
    "OutputFormat",
    "RunMetadata",
    "convergence_table",
    "load_config",
    "run_experiment",
    "to_jsonable",
    "write_outputs",
]
