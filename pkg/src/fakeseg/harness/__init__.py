"""Experiment harness: config schema, pipeline stages, reports, CLI."""

from .config import ConfigError, DatasetConfig, EvalConfig, ExperimentConfig, load_experiment_config
from .experiment import (
    EvalReport,
    StageError,
    VideoEval,
    evaluate_maps,
    run_experiment,
    sweep_segment_lengths,
    sweep_window_grid,
)
