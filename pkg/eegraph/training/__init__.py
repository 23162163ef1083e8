"""Loss, training loop, evaluation and run reports.

Experiment orchestration lives in ``eegraph.training.runs`` and is imported
explicitly, since it depends on the config schemas built on this package.
"""
from .loss import RegSpec, cross_entropy, penalty, loss
from .trainer import (
    TrainConfig,
    RunReport,
    EvalResult,
    CheckpointTracker,
    learning_rate_at,
    train,
    evaluate,
    count_params,
)

__all__ = [
    "RegSpec",
    "cross_entropy",
    "penalty",
    "loss",
    "TrainConfig",
    "RunReport",
    "EvalResult",
    "CheckpointTracker",
    "learning_rate_at",
    "train",
    "evaluate",
    "count_params",
]
