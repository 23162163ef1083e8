"""Cross-entropy with L1 / L2 (elastic-net) weight penalties."""
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core import tensor as T
from ..core.nn import Parameter
from ..core.tensor import Tensor
from ..utils.error_handler import DataError, UsageError


@dataclass(frozen=True)
class RegSpec:
    """``alpha`` scales the L1 term, ``beta`` the L2 term; both zero means unregularized."""
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise UsageError(f"regularization coefficients must be non-negative (alpha={self.alpha}, beta={self.beta})")

    @property
    def kind(self) -> str:
        if self.alpha and self.beta:
            return "elastic-net"
        if self.alpha:
            return "l1"
        if self.beta:
            return "l2"
        return "none"


def cross_entropy(logits: Tensor, labels: np.ndarray) -> Tensor:
    """Mean negative log-likelihood of ``labels`` under ``softmax(logits)``."""
    labels = np.asarray(labels, dtype=np.int64)
    if logits.ndim != 2 or labels.shape != (logits.shape[0],):
        raise DataError(f"logits {logits.shape} do not match {labels.shape[0]} labels")
    n_classes = logits.shape[1]
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        raise DataError(f"label outside [0, {n_classes})")
    picked = T.index(T.log_softmax(logits), (np.arange(labels.size), labels))
    return -T.reduce_mean(picked)


def penalty(params: Sequence[Parameter], reg: RegSpec) -> Tensor:
    """``alpha * sum|w| + beta * sum w^2``; ``abs`` has subgradient 0 at 0."""
    total = Tensor(0.0)
    for p in params:
        if reg.alpha:
            total = total + T.reduce_sum(T.absolute(p)) * reg.alpha
        if reg.beta:
            total = total + T.reduce_sum(T.square(p)) * reg.beta
    return total


def loss(logits: Tensor, labels: np.ndarray, params: Sequence[Parameter], reg: RegSpec) -> Tensor:
    """
    Data term plus penalties over ``params``.

    Callers pass only weights meant for regularization (``Module.regularized_parameters``).
    """
    data_term = cross_entropy(logits, labels)
    if not reg.alpha and not reg.beta:
        return data_term
    return data_term + penalty(params, reg)
