"""Central finite-difference gradient checking."""
from typing import Callable, Sequence

import numpy as np

from .tensor import Tensor


def numerical_gradient(fn: Callable[[], Tensor], tensor: Tensor, h: float = 1e-5) -> np.ndarray:
    """Central differences of the scalar ``fn()`` with respect to every entry of ``tensor``."""
    grad = np.zeros_like(tensor.data)
    flat = tensor.data.reshape(-1)
    out = grad.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + h
        plus = fn().item()
        flat[i] = original - h
        minus = fn().item()
        flat[i] = original
        out[i] = (plus - minus) / (2.0 * h)
    return grad


ZERO_GRADIENT_NORM = 1e-8


def check_gradients(fn: Callable[[], Tensor], tensors: Sequence[Tensor], h: float = 1e-5) -> float:
    """
    Compare analytic gradients against central finite differences.

    Tensors whose analytic and numerical gradients are both below
    ``ZERO_GRADIENT_NORM`` (e.g. a bias feeding a softmax) count as matching.

    Args:
        fn: Zero-argument callable rebuilding the scalar output from ``tensors``
        tensors: Tensors (requires_grad=True) to check
        h: Perturbation

    Returns:
        Largest relative error ``|a - n| / (|a| + |n|)`` (vector norms) over ``tensors``
    """
    for t in tensors:
        t.zero_grad()
    fn().backward()
    analytic = [t.grad.copy() if t.grad is not None else np.zeros_like(t.data) for t in tensors]

    worst = 0.0
    for t, a in zip(tensors, analytic):
        n = numerical_gradient(fn, t, h)
        denom = np.linalg.norm(a) + np.linalg.norm(n)
        if denom < ZERO_GRADIENT_NORM:
            continue
        worst = max(worst, float(np.linalg.norm(a - n) / denom))
    return worst
