"""Parameter containers and the reusable building blocks of every network."""
from collections import OrderedDict
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np

from . import tensor as T
from .tensor import Tensor
from ..utils.error_handler import CheckpointError


class Parameter(Tensor):
    """A learnable tensor; ``regularize`` marks it for the L1/L2 penalties."""

    def __init__(self, data: Any, regularize: bool = True):
        super().__init__(np.array(data, dtype=T.DTYPE, copy=True), requires_grad=True)
        self.regularize = regularize

    def __repr__(self) -> str:
        return f"Parameter(shape={self.shape}, regularize={self.regularize})"


def glorot_uniform(rng: np.random.Generator, shape: Tuple[int, ...], fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class Module:
    """Base class: registers parameters, sub-modules and non-learnable buffers."""

    def __init__(self):
        object.__setattr__(self, "_parameters", OrderedDict())
        object.__setattr__(self, "_modules", OrderedDict())
        object.__setattr__(self, "_buffers", OrderedDict())
        object.__setattr__(self, "training", True)

    def __setattr__(self, name: str, value: Any) -> None:
        if isinstance(value, Parameter):
            self._parameters[name] = value
        elif isinstance(value, Module):
            self._modules[name] = value
        object.__setattr__(self, name, value)

    def register_buffer(self, name: str, value: np.ndarray) -> None:
        self._buffers[name] = value
        object.__setattr__(self, name, value)

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def forward(self, *args, **kwargs):
        raise NotImplementedError

    # ---- traversal ----

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Parameter]]:
        for name, param in self._parameters.items():
            yield prefix + name, param
        for name, module in self._modules.items():
            yield from module.named_parameters(prefix + name + ".")

    def parameters(self) -> List[Parameter]:
        return [p for _, p in self.named_parameters()]

    def regularized_parameters(self) -> List[Parameter]:
        return [p for p in self.parameters() if p.regularize]

    def named_buffers(self, prefix: str = "") -> Iterator[Tuple[str, np.ndarray]]:
        for name, buf in self._buffers.items():
            yield prefix + name, buf
        for name, module in self._modules.items():
            yield from module.named_buffers(prefix + name + ".")

    def count_params(self) -> int:
        """Total number of scalar learnable parameters."""
        return int(sum(p.size for p in self.parameters()))

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    def train(self, mode: bool = True) -> "Module":
        object.__setattr__(self, "training", mode)
        for module in self._modules.values():
            module.train(mode)
        return self

    def eval(self) -> "Module":
        return self.train(False)

    # ---- persistence ----

    def state_dict(self) -> "OrderedDict[str, np.ndarray]":
        state: "OrderedDict[str, np.ndarray]" = OrderedDict()
        for name, param in self.named_parameters():
            state[name] = param.data.copy()
        for name, buf in self.named_buffers():
            state[name] = buf.copy()
        return state

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        """Copy arrays in place; names and shapes must match exactly."""
        targets: Dict[str, np.ndarray] = {n: p.data for n, p in self.named_parameters()}
        targets.update(dict(self.named_buffers()))
        missing = sorted(set(targets) - set(state))
        unexpected = sorted(set(state) - set(targets))
        if missing or unexpected:
            raise CheckpointError(f"state mismatch: missing={missing} unexpected={unexpected}")
        for name, target in targets.items():
            value = np.asarray(state[name], dtype=T.DTYPE)
            if value.shape != target.shape:
                raise CheckpointError(f"{name}: expected shape {target.shape}, found {value.shape}")
            target[...] = value


class ModuleList(Module):
    def __init__(self, modules: Optional[List[Module]] = None):
        super().__init__()
        self._items: List[Module] = []
        for module in modules or []:
            self.append(module)

    def append(self, module: Module) -> None:
        setattr(self, str(len(self._items)), module)
        self._items.append(module)

    def __iter__(self) -> Iterator[Module]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __getitem__(self, i: int) -> Module:
        return self._items[i]


class Linear(Module):
    """Dense layer ``x @ W + b`` applied to the last axis."""

    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator, bias: bool = True):
        super().__init__()
        self.in_features = in_features
        self.out_features = out_features
        self.weight = Parameter(glorot_uniform(rng, (in_features, out_features), in_features, out_features))
        self.bias = Parameter(np.zeros(out_features), regularize=False) if bias else None

    def forward(self, x: Tensor) -> Tensor:
        out = x @ self.weight
        return out + self.bias if self.bias is not None else out


class MLP(Module):
    """One hidden layer with ReLU: ``Linear -> ReLU -> Linear``."""

    def __init__(self, in_features: int, hidden: int, out_features: int, rng: np.random.Generator):
        super().__init__()
        if hidden < 1:
            raise ValueError("MLP hidden width must be at least 1")
        self.fc1 = Linear(in_features, hidden, rng)
        self.fc2 = Linear(hidden, out_features, rng)

    def forward(self, x: Tensor) -> Tensor:
        return self.fc2(T.relu(self.fc1(x)))


class Conv1d(Module):
    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel: int,
        rng: np.random.Generator,
        stride: int = 1,
        groups: int = 1,
        bias: bool = True,
    ):
        super().__init__()
        self.kernel, self.stride, self.groups = kernel, stride, groups
        fan_in = in_channels // groups * kernel
        fan_out = out_channels // groups * kernel
        self.weight = Parameter(glorot_uniform(rng, (out_channels, in_channels // groups, kernel), fan_in, fan_out))
        self.bias = Parameter(np.zeros(out_channels), regularize=False) if bias else None

    def forward(self, x: Tensor) -> Tensor:
        return T.conv1d(x, self.weight, self.bias, stride=self.stride, groups=self.groups)


class BatchNorm(Module):
    """Batch normalization over every axis except axis 1."""

    def __init__(self, num_features: int, eps: float = 1e-5, momentum: float = 0.1):
        super().__init__()
        self.eps, self.momentum = eps, momentum
        self.gamma = Parameter(np.ones(num_features), regularize=False)
        self.beta = Parameter(np.zeros(num_features), regularize=False)
        self.register_buffer("running_mean", np.zeros(num_features))
        self.register_buffer("running_var", np.ones(num_features))

    def forward(self, x: Tensor) -> Tensor:
        return T.batch_norm(
            x, self.gamma, self.beta, self.running_mean, self.running_var,
            training=self.training, momentum=self.momentum, eps=self.eps,
        )


class LSTMCell(Module):
    def __init__(self, input_size: int, hidden_size: int, rng: np.random.Generator):
        super().__init__()
        self.hidden_size = hidden_size
        self.w_ih = Parameter(glorot_uniform(rng, (input_size, 4 * hidden_size), input_size, hidden_size))
        self.w_hh = Parameter(glorot_uniform(rng, (hidden_size, 4 * hidden_size), hidden_size, hidden_size))
        self.bias = Parameter(np.zeros(4 * hidden_size), regularize=False)

    def forward(self, x: Tensor, h: Tensor, c: Tensor) -> Tuple[Tensor, Tensor]:
        return T.lstm_cell(x, h, c, self.w_ih, self.w_hh, self.bias)
