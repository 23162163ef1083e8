"""Adam optimizer.

Update rule:
    m_t = b1 * m_{t-1} + (1 - b1) * g_t
    v_t = b2 * v_{t-1} + (1 - b2) * g_t^2
    p  -= lr * m_hat / (sqrt(v_hat) + eps), with bias-corrected m_hat, v_hat

The learning rate lives on ``AdamState`` so a schedule can rescale it between steps.
"""
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from .nn import Parameter
from ..utils.error_handler import MissingGradientError, ShapeError


@dataclass
class AdamState:
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: List[np.ndarray] = field(default_factory=list)
    v: List[np.ndarray] = field(default_factory=list)


def adam_step(params: Sequence[Parameter], state: AdamState) -> None:
    """
    Apply one Adam update in place.

    Raises:
        MissingGradientError: a parameter has no populated grad
    """
    for i, p in enumerate(params):
        if p.grad is None:
            raise MissingGradientError(f"parameter {i} with shape {p.shape} has no gradient")

    if not state.m:
        state.m = [np.zeros_like(p.data) for p in params]
        state.v = [np.zeros_like(p.data) for p in params]
    if len(state.m) != len(params):
        raise ShapeError("adam_step", (len(state.m),), (len(params),), detail="parameter count changed")

    state.step += 1
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step
    for p, m, v in zip(params, state.m, state.v):
        if m.shape != p.shape:
            raise ShapeError("adam_step", m.shape, p.shape)
        g = p.grad
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        p.data -= state.lr * m_hat / (np.sqrt(v_hat) + state.eps)


class Adam:
    """Thin optimizer object over ``AdamState`` + ``adam_step``."""

    def __init__(self, params: Sequence[Parameter], lr: float = 0.001,
                 betas: tuple = (0.9, 0.999), eps: float = 1e-8):
        if lr <= 0:
            raise ValueError(f"Invalid learning rate: {lr}")
        self.params = list(params)
        self.state = AdamState(lr=lr, beta1=betas[0], beta2=betas[1], eps=eps)

    @property
    def lr(self) -> float:
        return self.state.lr

    @lr.setter
    def lr(self, value: float) -> None:
        self.state.lr = value

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def step(self) -> None:
        adam_step(self.params, self.state)
