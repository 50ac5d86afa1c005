from .config import PRESETS, ConfigError, ExperimentConfig, load_config, make_config
from .output import emit_csv, emit_plot, read_csv, read_curves, write_outputs
from .runner import ExperimentResult, ResultRow, run_experiment, run_trial, timing_report

__all__ = [
    "PRESETS", "ConfigError", "ExperimentConfig", "load_config", "make_config",
    "emit_csv", "emit_plot", "read_csv", "read_curves", "write_outputs",
    "ExperimentResult", "ResultRow", "run_experiment", "run_trial", "timing_report",
]
