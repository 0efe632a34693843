from .config import ConfigError, ExperimentConfig, build_config, load_config_file
from .experiments import TRANSFER_TAGS, TransferTag, run_experiment
from .plots import emit_boxplot
from .stats import SummaryStats, summarize

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "SummaryStats",
    "TRANSFER_TAGS",
    "TransferTag",
    "build_config",
    "emit_boxplot",
    "load_config_file",
    "run_experiment",
    "summarize",
]
