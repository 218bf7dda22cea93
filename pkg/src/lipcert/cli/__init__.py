"""Benchmark registry, batch sweeps, and the command-line front end."""

from .main import build_parser, main
from .registry import LABELS, default_algorithm, get_function, registry
from .sweep import (
    CSV_COLUMNS,
    SweepConfig,
    SweepResult,
    parse_sweep_config,
    run_sweep,
)

__all__ = [
    "CSV_COLUMNS",
    "LABELS",
    "SweepConfig",
    "SweepResult",
    "build_parser",
    "default_algorithm",
    "get_function",
    "main",
    "parse_sweep_config",
    "registry",
    "run_sweep",
]
