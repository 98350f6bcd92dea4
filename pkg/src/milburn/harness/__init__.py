"""Configuration-driven experiment runner and output writers."""

from .config import ExperimentConfig, Sweep, load_config, parse_config
from .experiment import ExperimentResult, ValidationReport, run_experiment
from .figures import figure_configs
from .output import emit_csv, emit_plot_script, emit_report

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "Sweep",
    "ValidationReport",
    "emit_csv",
    "emit_plot_script",
    "emit_report",
    "figure_configs",
    "load_config",
    "parse_config",
    "run_experiment",
]
