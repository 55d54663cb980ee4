"""Reproducible experiments over the library, with a command-line front end."""

from .config import (
    EXPERIMENTS,
    VERIFY_SUITES,
    ExperimentConfig,
    default_config,
    emit_config,
    load_config,
    parse_config,
)
from .runner import (
    CheckResult,
    RunReport,
    cmd_energy,
    cmd_report,
    cmd_scan,
    cmd_verify,
    cmd_witness,
    run,
)

__all__ = [
    "EXPERIMENTS",
    "VERIFY_SUITES",
    "CheckResult",
    "ExperimentConfig",
    "RunReport",
    "cmd_energy",
    "cmd_report",
    "cmd_scan",
    "cmd_verify",
    "cmd_witness",
    "default_config",
    "emit_config",
    "load_config",
    "parse_config",
    "run",
]
