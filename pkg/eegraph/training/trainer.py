"""Minibatch training with Adam, step-halving learning rate and checkpoint-on-improvement."""
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from .loss import RegSpec, loss
from .report import write_epochs_csv
from ..core.checkpoint import save_checkpoint
from ..core.nn import Module
from ..core.optim import Adam
from ..core.tensor import Tensor
from ..pipeline.trialset import TrialSet
from ..utils.error_handler import ClassCountMismatchError, TrainingDivergenceError, UsageError
from ..utils.logger import attach_run_log, detach_run_log, get_logger
from ..utils.state_manager import ensure_run_dir, get_state_path, save_state

logger = get_logger("trainer")


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 256
    epochs: int = 400
    lr: float = 0.001
    lr_halving_period: int = 50
    seed: int = 0
    reg: RegSpec = field(default_factory=RegSpec)

    def __post_init__(self):
        for name in ("batch_size", "epochs", "lr_halving_period"):
            if getattr(self, name) < 1:
                raise UsageError(f"train.{name} must be positive")
        if not self.lr > 0:
            raise UsageError("train.lr must be positive")


def learning_rate_at(epoch_index: int, cfg: TrainConfig) -> float:
    """Rate for the 0-based ``epoch_index``: halved once per completed period."""
    return cfg.lr * 0.5 ** (epoch_index // cfg.lr_halving_period)


class CheckpointTracker:
    """Signals a checkpoint only when validation accuracy strictly improves."""

    def __init__(self):
        self.best = -math.inf
        self.best_epoch = 0
        self.saved_epochs: List[int] = []

    def update(self, epoch: int, accuracy: float) -> bool:
        if accuracy > self.best:
            self.best = accuracy
            self.best_epoch = epoch
            self.saved_epochs.append(epoch)
            return True
        return False


@dataclass
class EvalResult:
    accuracy: float
    confusion: np.ndarray
    n: int


@dataclass
class RunReport:
    """Per-epoch history plus the numbers a results table needs."""
    train_loss: List[float] = field(default_factory=list)
    val_acc: List[float] = field(default_factory=list)
    lr: List[float] = field(default_factory=list)
    best_val_acc: float = 0.0
    best_epoch: int = 0
    n_params: int = 0
    wall_time_s: float = 0.0
    seed: int = 0
    config_hash: str = ""
    labels: Dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunReport":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)


def count_params(model: Module) -> int:
    return model.count_params()


def evaluate(model: Module, data: TrialSet, batch_size: int = 256) -> EvalResult:
    """
    Accuracy and confusion matrix (rows = true class) in eval mode.

    Raises:
        ClassCountMismatchError: model and data disagree on the number of classes
    """
    n_classes = model.spec.n_classes
    if n_classes != data.n_classes:
        raise ClassCountMismatchError(f"model predicts {n_classes} classes, data has {data.n_classes}")

    was_training = model.training
    model.eval()
    try:
        predictions = [
            np.argmax(model(Tensor(data.trials[start:start + batch_size])).data, axis=-1)
            for start in range(0, data.n_trials, batch_size)
        ]
    finally:
        model.train(was_training)

    predicted = np.concatenate(predictions) if predictions else np.zeros(0, dtype=np.int64)
    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(confusion, (data.labels, predicted), 1)
    accuracy = float(np.trace(confusion) / data.n_trials) if data.n_trials else 0.0
    return EvalResult(accuracy=accuracy, confusion=confusion, n=data.n_trials)


def train(
    model: Module,
    train_set: TrialSet,
    val_set: TrialSet,
    cfg: TrainConfig,
    run_dir: Optional[Union[str, Path]] = None,
    config: Optional[Dict[str, Any]] = None,
    config_hash: str = "",
    labels: Optional[Dict[str, str]] = None,
) -> RunReport:
    """
    Train ``model`` and keep the best validation checkpoint.

    With ``run_dir`` set, writes config.json, report.json, epochs.csv, best.ckpt
    and train_log.txt there. Minibatch order depends only on ``cfg.seed``.

    Raises:
        TrainingDivergenceError: the loss became NaN or infinite
    """
    report = RunReport(n_params=count_params(model), seed=cfg.seed, config_hash=config_hash, labels=labels or {})
    handler = None
    if run_dir is not None:
        run_dir = ensure_run_dir(run_dir)
        handler = attach_run_log(logger, run_dir)
        if config is not None:
            save_state(run_dir, "config", config)

    rng = np.random.default_rng(cfg.seed)
    optimizer = Adam(model.parameters(), lr=cfg.lr)
    penalized = model.regularized_parameters()
    tracker = CheckpointTracker()
    started = time.perf_counter()
    logger.info(
        f"Training {report.n_params} parameters on {train_set.n_trials} trials "
        f"({val_set.n_trials} validation), {cfg.epochs} epochs, batch {cfg.batch_size}"
    )

    try:
        model.train()
        for epoch_index in range(cfg.epochs):
            epoch = epoch_index + 1
            optimizer.lr = learning_rate_at(epoch_index, cfg)
            order = rng.permutation(train_set.n_trials)
            total, seen = 0.0, 0
            for step, start in enumerate(range(0, train_set.n_trials, cfg.batch_size), start=1):
                idx = order[start:start + cfg.batch_size]
                logits = model(Tensor(train_set.trials[idx]))
                value = loss(logits, train_set.labels[idx], penalized, cfg.reg)
                if not math.isfinite(value.item()):
                    raise TrainingDivergenceError(epoch, step, value.item())
                optimizer.zero_grad()
                value.backward()
                optimizer.step()
                total += value.item() * len(idx)
                seen += len(idx)

            result = evaluate(model, val_set)
            report.train_loss.append(total / max(seen, 1))
            report.val_acc.append(result.accuracy)
            report.lr.append(optimizer.lr)
            improved = tracker.update(epoch, result.accuracy)
            logger.info(
                f"epoch {epoch}/{cfg.epochs} loss={report.train_loss[-1]:.6f} "
                f"val_acc={result.accuracy:.4f} lr={optimizer.lr:g}"
            )
            if improved and run_dir is not None:
                save_checkpoint(get_state_path(run_dir, "checkpoint"), model.state_dict())
                logger.debug(f"checkpoint written at epoch {epoch}")
    finally:
        report.best_val_acc = max(report.val_acc) if report.val_acc else 0.0
        report.best_epoch = tracker.best_epoch
        report.wall_time_s = time.perf_counter() - started
        if run_dir is not None:
            write_epochs_csv(get_state_path(run_dir, "epochs"), report)
            save_state(run_dir, "report", report.to_dict())
            detach_run_log(logger, handler)

    logger.info(f"Best validation accuracy {report.best_val_acc:.4f} at epoch {report.best_epoch}")
    return report
