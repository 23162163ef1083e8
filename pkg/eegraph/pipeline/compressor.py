"""Temporal compression front-end: per-channel strided convolutions, then a closing projection."""
from dataclasses import dataclass
from typing import List

import numpy as np

from ..core import tensor as T
from ..core.nn import BatchNorm, Conv1d, Linear, Module, ModuleList
from ..core.tensor import Tensor, conv_output_length
from ..utils.error_handler import ShapeError


@dataclass(frozen=True)
class CompressorSpec:
    out_features: int = 32
    kernel: int = 3
    stride: int = 2
    batch_norm: bool = True
    bn_eps: float = 1e-5

    def conv_lengths(self, n_samples: int) -> List[int]:
        """
        Signal length after each conv block; empty when the input is already short enough.

        Raises:
            ShapeError: fewer samples than the kernel
        """
        if n_samples < self.kernel:
            raise ShapeError("compressor", (n_samples,), detail=f"need at least {self.kernel} samples")
        lengths: List[int] = []
        length = n_samples
        while length > self.out_features:
            length = conv_output_length(length, self.kernel, self.stride)
            lengths.append(length)
        return lengths


class _ConvBlock(Module):
    def __init__(self, channels: int, spec: CompressorSpec, rng: np.random.Generator):
        super().__init__()
        # depthwise: every electrode keeps its own temporal filter
        self.conv = Conv1d(channels, channels, spec.kernel, rng, stride=spec.stride, groups=channels)
        self.norm = BatchNorm(channels, eps=spec.bn_eps) if spec.batch_norm else None

    def forward(self, x: Tensor) -> Tensor:
        out = self.conv(x)
        if self.norm is not None:
            out = self.norm(out)
        return T.relu(out)


class Compressor(Module):
    """Maps ``(batch, channels, samples)`` trials to ``(batch, channels, out_features)`` node features."""

    def __init__(self, n_channels: int, n_samples: int, spec: CompressorSpec, rng: np.random.Generator):
        super().__init__()
        self.spec = spec
        self.n_channels = n_channels
        self.n_samples = n_samples
        self.lengths = spec.conv_lengths(n_samples)
        self.blocks = ModuleList([_ConvBlock(n_channels, spec, rng) for _ in self.lengths])
        final = self.lengths[-1] if self.lengths else n_samples
        self.projection = Linear(final, spec.out_features, rng)

    def forward(self, x: Tensor) -> Tensor:
        return compress_forward(x, self)


def compress_forward(x: Tensor, compressor: Compressor) -> Tensor:
    """
    Compress one ``(channels, samples)`` trial or a ``(batch, channels, samples)`` stack.
    """
    single = x.ndim == 2
    if single:
        x = x.reshape(1, *x.shape)
    if x.ndim != 3 or x.shape[1:] != (compressor.n_channels, compressor.n_samples):
        raise ShapeError("compressor", x.shape, (compressor.n_channels, compressor.n_samples))
    out = x
    for block in compressor.blocks:
        out = block(out)
    out = compressor.projection(out)
    return out.reshape(*out.shape[1:]) if single else out
