"""Validated experiment configuration models."""
from .experiment import (
    ExperimentConfig,
    DataSection,
    GraphSection,
    ModelSection,
    CompressorSection,
    AugmentSection,
    TrainSection,
    config_hash,
    check_references,
    load_experiment_config,
    parse_experiment_config,
    render_experiment_toml,
)

__all__ = [
    "ExperimentConfig",
    "DataSection",
    "GraphSection",
    "ModelSection",
    "CompressorSection",
    "AugmentSection",
    "TrainSection",
    "config_hash",
    "check_references",
    "load_experiment_config",
    "parse_experiment_config",
    "render_experiment_toml",
]
