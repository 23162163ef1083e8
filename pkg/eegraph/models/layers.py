"""Graph convolution layers (polynomial filter, GraphSAGE, GIN) and readouts.

Every forward accepts node features shaped ``(n, F)`` or ``(batch, n, F)``;
graph operators are ``(n, n)`` and shared across the batch.
"""
from typing import Callable, List, Optional, Sequence

import numpy as np

from ..core import tensor as T
from ..core.nn import MLP, Module, ModuleList, Parameter, glorot_uniform
from ..core.tensor import Tensor
from ..graphs.graph import Graph
from ..utils.error_handler import ShapeError

READOUT_KINDS = ("sum", "mean", "max")


def _identity(x: Tensor) -> Tensor:
    return x


def _check_rows(name: str, operator_n: int, x: Tensor) -> None:
    if x.ndim not in (2, 3) or x.shape[-2] != operator_n:
        raise ShapeError(name, (operator_n, operator_n), x.shape, detail="feature rows must equal node count")


class PolyFilterBank(Module):
    """Per-tap filters ``W_0 .. W_{K-1}`` of a polynomial graph convolution."""

    def __init__(self, in_features: int, out_features: int, taps: int, rng: np.random.Generator):
        super().__init__()
        if taps < 1:
            raise ValueError("polynomial filter needs at least one tap")
        self.taps = taps
        self.weights = ModuleList([_Tap(in_features, out_features, rng) for _ in range(taps)])

    def forward(self, s: Tensor, x: Tensor, sigma: Optional[Callable[[Tensor], Tensor]] = None) -> Tensor:
        return poly_filter_forward(s, x, self, sigma)


class _Tap(Module):
    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator):
        super().__init__()
        self.weight = Parameter(glorot_uniform(rng, (in_features, out_features), in_features, out_features))


def poly_filter_forward(
    s: Tensor, x: Tensor, bank: PolyFilterBank, sigma: Optional[Callable[[Tensor], Tensor]] = None
) -> Tensor:
    """
    Sum over taps of ``sigma(S^k X W_k)``; ``S^k X`` is built by repeated left-multiplication.

    Args:
        s: ``(n, n)`` shift operator
        x: ``(n, F)`` or ``(batch, n, F)`` node features
        bank: Filter taps
        sigma: Nonlinearity applied per tap (identity when omitted)
    """
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ShapeError("poly_filter", s.shape, detail="shift operator must be square")
    _check_rows("poly_filter", s.shape[0], x)
    sigma = sigma or _identity

    out = None
    propagated = x
    for k, tap in enumerate(bank.weights):
        if k > 0:
            propagated = s @ propagated
        term = sigma(propagated @ tap.weight)
        out = term if out is None else out + term
    return out


class GraphSageLayer(Module):
    """
    GraphSAGE with an element-wise mean-pooling aggregator.

    ``W_pool`` (F_in -> F_in) and ``b`` project neighbors before averaging,
    ``W_k`` (2 F_in -> F_out) updates from ``concat(h_v, aggregate)``.
    """

    def __init__(
        self,
        in_features: int,
        out_features: int,
        rng: np.random.Generator,
        neighbor_sample_size: Optional[int] = None,
        sample_seed: int = 0,
    ):
        super().__init__()
        if neighbor_sample_size is not None and neighbor_sample_size < 1:
            raise ValueError("neighbor_sample_size must be positive")
        self.w_pool = Parameter(glorot_uniform(rng, (in_features, in_features), in_features, in_features))
        self.b = Parameter(np.zeros(in_features), regularize=False)
        self.w_k = Parameter(glorot_uniform(rng, (2 * in_features, out_features), 2 * in_features, out_features))
        self.neighbor_sample_size = neighbor_sample_size
        self._sampler = np.random.default_rng(sample_seed)

    def aggregator(self, g: Graph) -> np.ndarray:
        """Mean-aggregation matrix; a fresh neighbor sample per call in train mode when sampling is enabled."""
        if self.neighbor_sample_size is None or not self.training:
            return g.mean_aggregator()
        m = np.zeros((g.n, g.n))
        for v in range(g.n):
            neighbors = g.neighbors(v)
            if not neighbors:
                continue
            if len(neighbors) > self.neighbor_sample_size:
                neighbors = sorted(self._sampler.choice(neighbors, size=self.neighbor_sample_size, replace=False))
            m[v, neighbors] = 1.0 / len(neighbors)
        return m

    def forward(self, g: Graph, h: Tensor) -> Tensor:
        return sage_forward(g, h, self)


def sage_forward(g: Graph, h: Tensor, layer: GraphSageLayer) -> Tensor:
    """
    One GraphSAGE round; nodes without neighbors get a zero aggregate.

    Output rows have unit L2 norm (all-zero rows stay zero).
    """
    _check_rows("sage_forward", g.n, h)
    pooled = T.relu(h @ layer.w_pool + layer.b)
    aggregate = Tensor(layer.aggregator(g)) @ pooled
    updated = T.relu(T.concat([h, aggregate], axis=-1) @ layer.w_k)
    return T.l2_normalize(updated)


class GinLayer(Module):
    """GIN update ``MLP((1 + lambda) h_v + sum of neighbor h_u)`` with a learnable scalar lambda."""

    def __init__(self, in_features: int, hidden: int, out_features: int, rng: np.random.Generator):
        super().__init__()
        self.mlp = MLP(in_features, hidden, out_features, rng)
        # starts at 0 (GIN-0); excluded from weight penalties
        self.lam = Parameter(np.zeros(1), regularize=False)

    def forward(self, g: Graph, h: Tensor) -> Tensor:
        return gin_forward(g, h, self)


def gin_aggregate(g: Graph, h: Tensor, lam: Tensor) -> Tensor:
    """Pre-MLP value ``(1 + lambda) h_v + sum_{u in N(v)} h_u``."""
    _check_rows("gin_forward", g.n, h)
    a = Tensor(g.operator_array("adjacency"))
    return h + T.scale(h, lam) + a @ h


def gin_forward(g: Graph, h: Tensor, layer: GinLayer) -> Tensor:
    return layer.mlp(gin_aggregate(g, h, layer.lam))


def readout(h: Tensor, kind: str = "sum") -> Tensor:
    """Column-wise sum, mean or max over the node axis."""
    if h.ndim not in (2, 3):
        raise ShapeError("readout", h.shape, detail="expected (n, F) or (batch, n, F)")
    if h.shape[-2] == 0:
        raise ShapeError("readout", h.shape, detail="graph has no nodes")
    if kind == "sum":
        return T.reduce_sum(h, axis=-2)
    if kind == "mean":
        return T.reduce_mean(h, axis=-2)
    if kind == "max":
        return T.reduce_max(h, axis=-2)
    raise ValueError(f"unknown readout '{kind}' (choose from {', '.join(READOUT_KINDS)})")


def gin_graph_embedding(per_round_h: Sequence[Tensor]) -> Tensor:
    """Concatenate the sum readouts of every round, round 0 included."""
    if not per_round_h:
        raise ValueError("gin_graph_embedding needs at least one round")
    sums: List[Tensor] = [readout(h, "sum") for h in per_round_h]
    return sums[0] if len(sums) == 1 else T.concat(sums, axis=-1)
