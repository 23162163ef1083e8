"""Dense float64 tensors with reverse-mode differentiation.

Every learnable operation in the library is composed from the primitives in
this module. A primitive is a ``Function`` subclass with a ``forward`` over
numpy arrays and a ``backward`` returning one gradient per parent. The
computation graph is recorded only when at least one input requires grad.

Broadcasting is deliberately narrow: a 1-D bias may be added onto the last
axis of a tensor, and ``matmul`` follows numpy batching when one operand is
shared across the batch. Every other shape mismatch raises ``ShapeError``.
"""
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..utils.error_handler import ShapeError

DTYPE = np.float64

ArrayLike = Union["Tensor", np.ndarray, float, int, Sequence[float]]


class Function:
    """Base class for differentiable primitives."""

    def __init__(self, *parents: "Tensor"):
        self.parents = parents

    def forward(self, *args: np.ndarray, **kwargs: Any) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        raise NotImplementedError

    @classmethod
    def apply(cls, *parents: "Tensor", **kwargs: Any) -> "Tensor":
        """
        Run the forward pass and wrap the result.

        Args:
            *parents: Input tensors
            **kwargs: Non-differentiable options for the primitive

        Returns:
            Output tensor, linked to this function when any input requires grad
        """
        func = cls(*parents)
        out = func.forward(*(p.data for p in parents), **kwargs)
        requires_grad = any(p.requires_grad for p in parents)
        return Tensor(out, requires_grad=requires_grad, _creator=func if requires_grad else None)


class Tensor:
    """A dense n-dimensional float64 array taking part in reverse-mode differentiation."""

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        _creator: Optional[Function] = None,
    ):
        if isinstance(data, Tensor):
            data = data.data
        self.data = np.asarray(data, dtype=DTYPE)
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self._creator = _creator

    # ---- basic properties -------------------------------------------------

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float(self.data)

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy())

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    @staticmethod
    def zeros(shape: Sequence[int]) -> "Tensor":
        return Tensor(np.zeros(shape, dtype=DTYPE))

    # ---- differentiation --------------------------------------------------

    def backward(self) -> None:
        """
        Backpropagate from this scalar tensor.

        Gradients accumulate additively into ``grad`` of every reachable tensor
        that requires grad; calling twice without zeroing doubles leaf grads.
        """
        if self.data.size != 1:
            raise ShapeError("backward", self.shape, detail="loss must be a scalar")
        if not self.requires_grad:
            return

        topo = self._topological_order()
        grads = {id(self): np.ones_like(self.data)}
        for node in reversed(topo):
            grad = grads.pop(id(node), None)
            if grad is None:
                continue
            node.grad = grad if node.grad is None else node.grad + grad
            if node._creator is None:
                continue
            parent_grads = node._creator.backward(grad)
            for parent, parent_grad in zip(node._creator.parents, parent_grads):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in grads:
                    grads[key] = grads[key] + parent_grad
                else:
                    grads[key] = parent_grad

    def _topological_order(self) -> List["Tensor"]:
        order: List[Tensor] = []
        visited = set()
        stack: List[Tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            if node._creator is not None:
                for parent in node._creator.parents:
                    if parent.requires_grad and id(parent) not in visited:
                        stack.append((parent, False))
        return order

    # ---- operators --------------------------------------------------------

    def __add__(self, other: ArrayLike) -> "Tensor":
        if isinstance(other, (int, float)):
            return AddScalar.apply(self, value=float(other))
        return add(self, as_tensor(other))

    def __radd__(self, other: ArrayLike) -> "Tensor":
        return self.__add__(other)

    def __sub__(self, other: ArrayLike) -> "Tensor":
        if isinstance(other, (int, float)):
            return AddScalar.apply(self, value=-float(other))
        return sub(self, as_tensor(other))

    def __rsub__(self, other: ArrayLike) -> "Tensor":
        return neg(self) + other

    def __mul__(self, other: ArrayLike) -> "Tensor":
        if isinstance(other, (int, float)):
            return MulScalar.apply(self, value=float(other))
        return mul(self, as_tensor(other))

    def __rmul__(self, other: ArrayLike) -> "Tensor":
        return self.__mul__(other)

    def __truediv__(self, other: float) -> "Tensor":
        if not isinstance(other, (int, float)):
            raise TypeError("only division by a python number is supported")
        return MulScalar.apply(self, value=1.0 / float(other))

    def __neg__(self) -> "Tensor":
        return neg(self)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        return matmul(self, other)

    def __getitem__(self, idx: Any) -> "Tensor":
        return index(self, idx)

    def sum(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        return reduce_sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        return reduce_mean(self, axis=axis, keepdims=keepdims)

    def max(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        return reduce_max(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape: int) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return Reshape.apply(self, shape=shape)

    def transpose(self, *axes: int) -> "Tensor":
        return Transpose.apply(self, axes=axes or None)

    @property
    def T(self) -> "Tensor":
        return self.transpose()


def as_tensor(value: ArrayLike) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _sum_to_shape(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum leading batch axes (and a bias-row broadcast) back down to ``shape``."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    return grad.reshape(shape)


def _is_basic_index(idx: Any) -> bool:
    items = idx if isinstance(idx, tuple) else (idx,)
    return all(isinstance(i, (slice, int, type(Ellipsis), type(None))) for i in items)


# ---- elementwise arithmetic ---------------------------------------------------


def _check_elementwise(name: str, a: np.ndarray, b: np.ndarray, allow_bias: bool) -> None:
    if a.shape == b.shape:
        return
    if allow_bias:
        if b.ndim == 1 and a.ndim >= 1 and a.shape[-1] == b.shape[0]:
            return
        if a.ndim == 1 and b.ndim >= 1 and b.shape[-1] == a.shape[0]:
            return
    raise ShapeError(name, a.shape, b.shape)


class Add(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        _check_elementwise("add", a, b, allow_bias=True)
        self.shapes = (a.shape, b.shape)
        return a + b

    def backward(self, grad):
        sa, sb = self.shapes
        return _sum_to_shape(grad, sa), _sum_to_shape(grad, sb)


class Sub(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        _check_elementwise("sub", a, b, allow_bias=True)
        self.shapes = (a.shape, b.shape)
        return a - b

    def backward(self, grad):
        sa, sb = self.shapes
        return _sum_to_shape(grad, sa), _sum_to_shape(-grad, sb)


class Mul(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        _check_elementwise("mul", a, b, allow_bias=False)
        self.a, self.b = a, b
        return a * b

    def backward(self, grad):
        return grad * self.b, grad * self.a


class Neg(Function):
    def forward(self, a):
        return -a

    def backward(self, grad):
        return (-grad,)


class AddScalar(Function):
    def forward(self, a, value: float):
        return a + value

    def backward(self, grad):
        return (grad,)


class MulScalar(Function):
    def forward(self, a, value: float):
        self.value = value
        return a * value

    def backward(self, grad):
        return (grad * self.value,)


class Scale(Function):
    """Multiply a tensor by a one-element tensor (e.g. a learnable scalar)."""

    def forward(self, x, s):
        if s.size != 1:
            raise ShapeError("scale", x.shape, s.shape, detail="scale factor must have one element")
        self.x, self.s = x, s
        return x * s.reshape(())

    def backward(self, grad):
        return grad * self.s.reshape(()), np.sum(grad * self.x).reshape(self.s.shape)


class RowScale(Function):
    """Scale each row ``x[..., i, :]`` by ``z[..., i]``."""

    def forward(self, x, z):
        if x.ndim < 2 or x.shape[:-1] != z.shape:
            raise ShapeError("row_scale", x.shape, z.shape)
        self.x, self.z = x, z
        return x * z[..., None]

    def backward(self, grad):
        return grad * self.z[..., None], np.sum(grad * self.x, axis=-1)


def add(a: Tensor, b: Tensor) -> Tensor:
    return Add.apply(a, b)


def sub(a: Tensor, b: Tensor) -> Tensor:
    return Sub.apply(a, b)


def mul(a: Tensor, b: Tensor) -> Tensor:
    return Mul.apply(a, b)


def neg(a: Tensor) -> Tensor:
    return Neg.apply(a)


def scale(x: Tensor, s: Tensor) -> Tensor:
    return Scale.apply(x, s)


def row_scale(x: Tensor, z: Tensor) -> Tensor:
    return RowScale.apply(x, z)


# ---- matrix product -----------------------------------------------------------


class MatMul(Function):
    def forward(self, a, b):
        if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
            raise ShapeError("matmul", a.shape, b.shape)
        batch_a, batch_b = a.shape[:-2], b.shape[:-2]
        if batch_a and batch_b and batch_a != batch_b:
            raise ShapeError("matmul", a.shape, b.shape, detail="batch dimensions differ")
        self.a, self.b = a, b
        return np.matmul(a, b)

    def backward(self, grad):
        ga = np.matmul(grad, np.swapaxes(self.b, -1, -2))
        gb = np.matmul(np.swapaxes(self.a, -1, -2), grad)
        return _sum_to_shape(ga, self.a.shape), _sum_to_shape(gb, self.b.shape)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    return MatMul.apply(a, b)


# ---- pointwise nonlinearities -------------------------------------------------


class Relu(Function):
    def forward(self, x):
        self.mask = x > 0
        # propagates NaN
        return np.maximum(x, 0.0)

    def backward(self, grad):
        return (grad * self.mask,)


class Sigmoid(Function):
    def forward(self, x):
        self.out = np.exp(-np.logaddexp(0.0, -x))
        return self.out

    def backward(self, grad):
        return (grad * self.out * (1.0 - self.out),)


class Tanh(Function):
    def forward(self, x):
        self.out = np.tanh(x)
        return self.out

    def backward(self, grad):
        return (grad * (1.0 - self.out ** 2),)


class Exp(Function):
    def forward(self, x):
        self.out = np.exp(x)
        return self.out

    def backward(self, grad):
        return (grad * self.out,)


class Log(Function):
    def forward(self, x):
        self.x = x
        return np.log(x)

    def backward(self, grad):
        return (grad / self.x,)


class Sqrt(Function):
    def forward(self, x):
        self.out = np.sqrt(x)
        return self.out

    def backward(self, grad):
        return (grad / (2.0 * self.out),)


class Abs(Function):
    # subgradient 0 at 0 (np.sign(0) == 0)
    def forward(self, x):
        self.sign = np.sign(x)
        return np.abs(x)

    def backward(self, grad):
        return (grad * self.sign,)


class Square(Function):
    def forward(self, x):
        self.x = x
        return x * x

    def backward(self, grad):
        return (2.0 * self.x * grad,)


class Softmax(Function):
    def forward(self, x):
        shifted = x - np.max(x, axis=-1, keepdims=True)
        e = np.exp(shifted)
        self.out = e / np.sum(e, axis=-1, keepdims=True)
        return self.out

    def backward(self, grad):
        dot = np.sum(grad * self.out, axis=-1, keepdims=True)
        return (self.out * (grad - dot),)


class LogSoftmax(Function):
    def forward(self, x):
        shifted = x - np.max(x, axis=-1, keepdims=True)
        log_norm = np.log(np.sum(np.exp(shifted), axis=-1, keepdims=True))
        out = shifted - log_norm
        self.softmax = np.exp(out)
        return out

    def backward(self, grad):
        return (grad - self.softmax * np.sum(grad, axis=-1, keepdims=True),)


class L2Normalize(Function):
    """Row-wise L2 normalization over the last axis; all-zero rows stay zero."""

    def forward(self, x):
        norm = np.sqrt(np.sum(x * x, axis=-1, keepdims=True))
        self.nonzero = norm > 0
        self.norm = np.where(self.nonzero, norm, 1.0)
        self.out = np.where(self.nonzero, x / self.norm, 0.0)
        return self.out

    def backward(self, grad):
        dot = np.sum(grad * self.out, axis=-1, keepdims=True)
        gx = (grad - self.out * dot) / self.norm
        return (np.where(self.nonzero, gx, 0.0),)


def relu(x: Tensor) -> Tensor:
    return Relu.apply(x)


def sigmoid(x: Tensor) -> Tensor:
    return Sigmoid.apply(x)


def tanh(x: Tensor) -> Tensor:
    return Tanh.apply(x)


def exp(x: Tensor) -> Tensor:
    return Exp.apply(x)


def log(x: Tensor) -> Tensor:
    return Log.apply(x)


def sqrt(x: Tensor) -> Tensor:
    return Sqrt.apply(x)


def absolute(x: Tensor) -> Tensor:
    return Abs.apply(x)


def square(x: Tensor) -> Tensor:
    return Square.apply(x)


def softmax(x: Tensor) -> Tensor:
    return Softmax.apply(x)


def log_softmax(x: Tensor) -> Tensor:
    return LogSoftmax.apply(x)


def l2_normalize(x: Tensor) -> Tensor:
    return L2Normalize.apply(x)


# ---- structure: concat, stack, reshape, transpose, indexing ------------------


class Concat(Function):
    def forward(self, *arrays, axis: int):
        first = arrays[0]
        ax = axis % first.ndim
        for other in arrays[1:]:
            if other.ndim != first.ndim or any(
                d1 != d2 for i, (d1, d2) in enumerate(zip(first.shape, other.shape)) if i != ax
            ):
                raise ShapeError("concat", first.shape, other.shape, detail=f"axis {axis}")
        self.axis = ax
        self.splits = np.cumsum([a.shape[ax] for a in arrays])[:-1]
        return np.concatenate(arrays, axis=ax)

    def backward(self, grad):
        return tuple(np.split(grad, self.splits, axis=self.axis))


class Stack(Function):
    def forward(self, *arrays, axis: int):
        for other in arrays[1:]:
            if other.shape != arrays[0].shape:
                raise ShapeError("stack", arrays[0].shape, other.shape)
        self.axis = axis
        return np.stack(arrays, axis=axis)

    def backward(self, grad):
        return tuple(np.moveaxis(grad, self.axis, 0))


class Reshape(Function):
    def forward(self, x, shape):
        self.in_shape = x.shape
        try:
            return x.reshape(shape)
        except ValueError:
            raise ShapeError("reshape", x.shape, shape) from None

    def backward(self, grad):
        return (grad.reshape(self.in_shape),)


class Transpose(Function):
    def forward(self, x, axes):
        self.axes = tuple(axes) if axes else tuple(reversed(range(x.ndim)))
        return np.transpose(x, self.axes)

    def backward(self, grad):
        return (np.transpose(grad, np.argsort(self.axes)),)


class Index(Function):
    def forward(self, x, idx):
        self.in_shape = x.shape
        self.idx = idx
        try:
            return np.array(x[idx], dtype=DTYPE)
        except IndexError as e:
            raise ShapeError("index", x.shape, detail=str(e)) from None

    def backward(self, grad):
        gx = np.zeros(self.in_shape, dtype=DTYPE)
        if _is_basic_index(self.idx):
            gx[self.idx] += grad
        else:
            np.add.at(gx, self.idx, grad)
        return (gx,)


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    return Concat.apply(*tensors, axis=axis)


def stack(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    return Stack.apply(*tensors, axis=axis)


def index(x: Tensor, idx: Any) -> Tensor:
    return Index.apply(x, idx=idx)


def gather_rows(x: Tensor, rows: np.ndarray) -> Tensor:
    """
    Gather rows of a node-feature matrix.

    Args:
        x: ``(n, F)`` or batched ``(B, n, F)`` tensor
        rows: ``(k,)`` indices, or ``(B, k)`` per-sample indices for batched input

    Returns:
        ``(k, F)`` or ``(B, k, F)`` tensor
    """
    rows = np.asarray(rows, dtype=np.int64)
    if x.ndim == 2 and rows.ndim == 1:
        return index(x, rows)
    if x.ndim == 3 and rows.ndim == 2 and rows.shape[0] == x.shape[0]:
        return index(x, (np.arange(x.shape[0])[:, None], rows))
    raise ShapeError("gather_rows", x.shape, rows.shape)


# ---- reductions ---------------------------------------------------------------


class Sum(Function):
    def forward(self, x, axis, keepdims):
        self.in_shape, self.axis, self.keepdims = x.shape, axis, keepdims
        return np.sum(x, axis=axis, keepdims=keepdims)

    def backward(self, grad):
        if self.axis is not None and not self.keepdims:
            grad = np.expand_dims(grad, self.axis)
        return (np.broadcast_to(grad, self.in_shape).copy(),)


class Mean(Function):
    def forward(self, x, axis, keepdims):
        self.in_shape, self.axis, self.keepdims = x.shape, axis, keepdims
        self.count = x.size if axis is None else x.shape[axis]
        return np.mean(x, axis=axis, keepdims=keepdims)

    def backward(self, grad):
        if self.axis is not None and not self.keepdims:
            grad = np.expand_dims(grad, self.axis)
        return (np.broadcast_to(grad / self.count, self.in_shape).copy(),)


class Max(Function):
    """Max reduction; ties resolve to the lowest index so backward is deterministic."""

    def forward(self, x, axis, keepdims):
        self.in_shape, self.axis, self.keepdims = x.shape, axis, keepdims
        if axis is None:
            self.indices = np.argmax(x.reshape(-1))
            out = x.reshape(-1)[self.indices]
            return np.full((1,) * x.ndim, out) if keepdims else np.asarray(out)
        self.indices = np.argmax(x, axis=axis)
        out = np.take_along_axis(x, np.expand_dims(self.indices, axis), axis=axis)
        return out if keepdims else np.squeeze(out, axis=axis)

    def backward(self, grad):
        gx = np.zeros(self.in_shape, dtype=DTYPE)
        if self.axis is None:
            gx.reshape(-1)[self.indices] = np.asarray(grad).reshape(-1)[0]
            return (gx,)
        if not self.keepdims:
            grad = np.expand_dims(grad, self.axis)
        np.put_along_axis(gx, np.expand_dims(self.indices, self.axis), grad, axis=self.axis)
        return (gx,)


def reduce_sum(x: Tensor, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    return Sum.apply(x, axis=axis, keepdims=keepdims)


def reduce_mean(x: Tensor, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    return Mean.apply(x, axis=axis, keepdims=keepdims)


def reduce_max(x: Tensor, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    return Max.apply(x, axis=axis, keepdims=keepdims)


def max_with_indices(x: Tensor, axis: int) -> Tuple[Tensor, np.ndarray]:
    """Max reduction that also returns the retained argmax indices."""
    out = Max.apply(x, axis=axis, keepdims=False)
    creator = out._creator
    if creator is None:
        return out, np.argmax(x.data, axis=axis)
    return out, creator.indices


# ---- convolution and normalization -------------------------------------------


def conv_output_length(length: int, kernel: int, stride: int) -> int:
    """Output length of a valid (unpadded) 1-D convolution."""
    return (length - kernel) // stride + 1


class Conv1d(Function):
    """Grouped 1-D convolution over ``(N, C_in, L)`` inputs, no padding."""

    def forward(self, x, w, *bias, stride: int, groups: int):
        if x.ndim != 3 or w.ndim != 3:
            raise ShapeError("conv1d", x.shape, w.shape, detail="expected (N, C, L) input and (C_out, C_in/groups, K) weight")
        n, c_in, length = x.shape
        c_out, c_per_group, kernel = w.shape
        if c_in % groups or c_out % groups or c_in // groups != c_per_group:
            raise ShapeError("conv1d", x.shape, w.shape, detail=f"groups={groups}")
        if length < kernel:
            raise ShapeError("conv1d", x.shape, w.shape, detail="signal shorter than kernel")
        if bias and bias[0].shape != (c_out,):
            raise ShapeError("conv1d", w.shape, bias[0].shape, detail="bias")

        l_out = conv_output_length(length, kernel, stride)
        windows = sliding_window_view(x, kernel, axis=2)[:, :, ::stride, :][:, :, :l_out, :]
        self.windows = windows.reshape(n, groups, c_per_group, l_out, kernel)
        self.w = w.reshape(groups, c_out // groups, c_per_group, kernel)
        self.x_shape, self.w_shape = x.shape, w.shape
        self.stride, self.kernel, self.l_out = stride, kernel, l_out
        self.has_bias = bool(bias)

        out = np.einsum("ngclk,gock->ngol", self.windows, self.w).reshape(n, c_out, l_out)
        if bias:
            out = out + bias[0][None, :, None]
        return out

    def backward(self, grad):
        n, c_in, length = self.x_shape
        groups = self.w.shape[0]
        g = grad.reshape(n, groups, -1, self.l_out)
        gw = np.einsum("ngol,ngclk->gock", g, self.windows).reshape(self.w_shape)
        gwin = np.einsum("ngol,gock->ngclk", g, self.w).reshape(n, c_in, self.l_out, self.kernel)
        gx = np.zeros(self.x_shape, dtype=DTYPE)
        span = self.stride * (self.l_out - 1) + 1
        for k in range(self.kernel):
            gx[:, :, k:k + span:self.stride] += gwin[..., k]
        if self.has_bias:
            return gx, gw, grad.sum(axis=(0, 2))
        return gx, gw


def conv1d(x: Tensor, w: Tensor, b: Optional[Tensor] = None, stride: int = 1, groups: int = 1) -> Tensor:
    parents = (x, w) if b is None else (x, w, b)
    return Conv1d.apply(*parents, stride=stride, groups=groups)


class BatchNormFn(Function):
    """Normalize over every axis except axis 1, then apply per-feature scale and shift."""

    def forward(self, x, gamma, beta, running_mean, running_var, training, momentum, eps):
        if x.ndim < 2 or gamma.shape != (x.shape[1],) or beta.shape != (x.shape[1],):
            raise ShapeError("batch_norm", x.shape, gamma.shape)
        axes = tuple(i for i in range(x.ndim) if i != 1)
        shape = [1] * x.ndim
        shape[1] = x.shape[1]
        if training:
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)
            count = x.size // x.shape[1]
            unbiased = var * count / (count - 1) if count > 1 else var
            running_mean *= (1.0 - momentum)
            running_mean += momentum * mean
            running_var *= (1.0 - momentum)
            running_var += momentum * unbiased
        else:
            mean, var = running_mean, running_var
        self.inv_std = (1.0 / np.sqrt(var + eps)).reshape(shape)
        self.x_hat = (x - mean.reshape(shape)) * self.inv_std
        self.gamma = gamma.reshape(shape)
        self.axes, self.training = axes, training
        return self.gamma * self.x_hat + beta.reshape(shape)

    def backward(self, grad):
        g_gamma = np.sum(grad * self.x_hat, axis=self.axes)
        g_beta = np.sum(grad, axis=self.axes)
        g_xhat = grad * self.gamma
        if not self.training:
            return g_xhat * self.inv_std, g_gamma, g_beta
        m = grad.size // grad.shape[1]
        sum_g = np.sum(g_xhat, axis=self.axes, keepdims=True)
        sum_gx = np.sum(g_xhat * self.x_hat, axis=self.axes, keepdims=True)
        gx = self.inv_std / m * (m * g_xhat - sum_g - self.x_hat * sum_gx)
        return gx, g_gamma, g_beta


def batch_norm(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    running_mean: np.ndarray,
    running_var: np.ndarray,
    training: bool,
    momentum: float = 0.1,
    eps: float = 1e-5,
) -> Tensor:
    """Batch normalization; train mode updates the running statistics in place."""
    return BatchNormFn.apply(
        x, gamma, beta,
        running_mean=running_mean, running_var=running_var,
        training=training, momentum=momentum, eps=eps,
    )


# ---- recurrent cell -----------------------------------------------------------


def lstm_cell(
    x: Tensor, h: Tensor, c: Tensor, w_ih: Tensor, w_hh: Tensor, b: Tensor
) -> Tuple[Tensor, Tensor]:
    """
    One step of the standard 4-gate LSTM (input, forget, cell, output).

    Args:
        x: ``(B, D)`` input
        h, c: ``(B, H)`` hidden and cell state
        w_ih: ``(D, 4H)``; w_hh: ``(H, 4H)``; b: ``(4H,)``

    Returns:
        New ``(h, c)``
    """
    hidden = h.shape[-1]
    if w_ih.shape != (x.shape[-1], 4 * hidden) or w_hh.shape != (hidden, 4 * hidden):
        raise ShapeError("lstm_cell", x.shape, w_ih.shape, w_hh.shape)
    gates = x @ w_ih + h @ w_hh + b
    i = sigmoid(gates[..., 0:hidden])
    f = sigmoid(gates[..., hidden:2 * hidden])
    g = tanh(gates[..., 2 * hidden:3 * hidden])
    o = sigmoid(gates[..., 3 * hidden:4 * hidden])
    c_next = f * c + i * g
    h_next = o * tanh(c_next)
    return h_next, c_next
