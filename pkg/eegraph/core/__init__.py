"""Tensor arithmetic, reverse-mode differentiation, building blocks and Adam."""
from .tensor import Tensor, Function
from .nn import Parameter, Module, ModuleList, Linear, MLP, Conv1d, BatchNorm, LSTMCell
from .optim import Adam, AdamState, adam_step
from .checkpoint import save_checkpoint, load_checkpoint
from .gradcheck import check_gradients

__all__ = [
    "Tensor",
    "Function",
    "Parameter",
    "Module",
    "ModuleList",
    "Linear",
    "MLP",
    "Conv1d",
    "BatchNorm",
    "LSTMCell",
    "Adam",
    "AdamState",
    "adam_step",
    "save_checkpoint",
    "load_checkpoint",
    "check_gradients",
]
