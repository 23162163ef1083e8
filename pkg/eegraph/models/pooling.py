"""Graph pooling operators: SortPool, EdgePool, SagPool and Set2Set."""
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core import tensor as T
from ..core.nn import Conv1d, Linear, LSTMCell, Module, Parameter, glorot_uniform
from ..core.tensor import Tensor
from ..graphs.graph import Graph
from ..utils.error_handler import ShapeError

SORTPOOL_ORDERS = ("features", "wl")


# ---- SortPool ----


@dataclass(frozen=True)
class SortPoolConfig:
    """
    Args:
        rho: Nodes kept after sorting (zero rows pad smaller graphs)
        block_width: Width F of one conv round's embedding inside the concatenated rows
    """
    rho: int
    block_width: int

    def __post_init__(self):
        if self.rho < 1:
            raise ValueError("SortPool rho must be at least 1")
        if self.block_width < 1:
            raise ValueError("SortPool block width must be at least 1")


def sort_order(rows: np.ndarray, block_width: int, colors: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Descending lexicographic node order.

    The last block decides first, earlier blocks break ties, then the lower node
    index wins. ``colors`` (structural WL colors, descending) outranks features.
    """
    n, width = rows.shape
    if width % block_width:
        raise ShapeError("sortpool", rows.shape, detail=f"width not a multiple of block width {block_width}")
    blocks = width // block_width
    significance: List[int] = []
    for b in reversed(range(blocks)):
        significance.extend(range(b * block_width, (b + 1) * block_width))

    # np.lexsort treats the last key as primary
    keys = [np.arange(n)]
    keys.extend(-rows[:, c] for c in reversed(significance))
    if colors is not None:
        keys.append(-np.asarray(colors, dtype=np.float64))
    return np.lexsort(keys)


def sortpool(h_concat: Tensor, cfg: SortPoolConfig, colors: Optional[np.ndarray] = None) -> Tensor:
    """
    Sort, truncate or zero-pad to ``rho`` rows and flatten row-major.

    Args:
        h_concat: ``(n, K*F)`` or ``(batch, n, K*F)`` node embeddings of every conv round
        cfg: SortPool configuration
        colors: Optional structural colors ordering nodes before features

    Returns:
        ``(rho*K*F,)`` or ``(batch, rho*K*F)``
    """
    batched = h_concat.ndim == 3
    x = h_concat if batched else h_concat.reshape(1, *h_concat.shape)
    batch, n, width = x.shape
    keep = min(n, cfg.rho)

    orders = np.stack([sort_order(x.data[i], cfg.block_width, colors)[:keep] for i in range(batch)])
    selected = T.gather_rows(x, orders)
    if keep < cfg.rho:
        selected = T.concat([selected, Tensor.zeros((batch, cfg.rho - keep, width))], axis=-2)
    flat = selected.reshape(batch, cfg.rho * width)
    return flat if batched else flat.reshape(cfg.rho * width)


class SortPoolHead(Module):
    """Conv1d with kernel and stride spanning one node row, ReLU, max-pool of window 2, flatten."""

    def __init__(self, cfg: SortPoolConfig, row_width: int, channels: int, rng: np.random.Generator):
        super().__init__()
        self.cfg = cfg
        self.row_width = row_width
        self.channels = channels
        self.conv = Conv1d(1, channels, row_width, rng, stride=row_width)

    @property
    def output_dim(self) -> int:
        return self.channels * (self.cfg.rho // 2 if self.cfg.rho >= 2 else 1)

    def forward(self, flat: Tensor) -> Tensor:
        batch = flat.shape[0]
        out = T.relu(self.conv(flat.reshape(batch, 1, flat.shape[-1])))
        rho = self.cfg.rho
        if rho >= 2:
            pairs = rho // 2
            out = out[:, :, :2 * pairs].reshape(batch, self.channels, pairs, 2)
            out = T.reduce_max(out, axis=-1)
        return out.reshape(batch, self.output_dim)


# ---- EdgePool ----


class EdgeScoreNet(Module):
    """Raw edge score ``w . concat(h_i, h_j) + b``."""

    def __init__(self, in_features: int, rng: np.random.Generator):
        super().__init__()
        self.linear = Linear(2 * in_features, 1, rng)

    def forward(self, h_i: Tensor, h_j: Tensor) -> Tensor:
        raw = self.linear(T.concat([h_i, h_j], axis=-1))
        return raw.reshape(raw.shape[0])


@dataclass
class EdgePoolResult:
    graph: Graph
    features: Tensor
    partition: List[Tuple[int, ...]]
    scores: Optional[Tensor] = None


def undirected_edges(g: Graph) -> List[Tuple[int, int]]:
    """Each undirected edge once as ``(i, j)`` with ``i < j``, in index order."""
    return [(i, j) for i, j, _ in g.edges if i < j]


def edgepool(g: Graph, h: Tensor, net: EdgeScoreNet) -> EdgePoolResult:
    """
    Contract a greedy maximal matching of edges by descending softmax score.

    Merged supernodes come first in contraction order with feature
    ``s_ij * (h_i + h_j)``; untouched nodes follow as singletons in index order.
    A graph with no edge between distinct nodes (none at all, or only
    self-loops) is returned as is, with the identity partition and no scores.

    Args:
        g: Symmetric graph
        h: ``(n, F)`` node features
        net: Learnable edge scorer
    """
    if not g.symmetric:
        raise ShapeError("edgepool", (g.n, g.n), detail="graph must be symmetric")
    if h.ndim != 2 or h.shape[0] != g.n:
        raise ShapeError("edgepool", (g.n,), h.shape)
    pairs = undirected_edges(g)
    # self-loops never enter the matching
    if not pairs:
        return EdgePoolResult(g, h, [(v,) for v in range(g.n)])

    left = np.array([i for i, _ in pairs])
    right = np.array([j for _, j in pairs])
    scores = T.softmax(net(T.gather_rows(h, left), T.gather_rows(h, right)))

    # ties go to the lower edge index
    visit = sorted(range(len(pairs)), key=lambda e: (-scores.data[e], e))
    taken = np.zeros(g.n, dtype=bool)
    contracted: List[int] = []
    for e in visit:
        i, j = pairs[e]
        if not taken[i] and not taken[j]:
            taken[i] = taken[j] = True
            contracted.append(e)
    singles = [v for v in range(g.n) if not taken[v]]

    partition = [pairs[e] for e in contracted] + [(v,) for v in singles]
    pair_sum = np.zeros((len(contracted), g.n))
    for row, e in enumerate(contracted):
        pair_sum[row, list(pairs[e])] = 1.0
    merged = T.row_scale(Tensor(pair_sum) @ h, T.index(scores, np.array(contracted)))
    features = merged if not singles else T.concat([merged, T.gather_rows(h, np.array(singles))], axis=0)

    return EdgePoolResult(_coarsen(g, partition), features, partition, scores)


def _coarsen(g: Graph, partition: Sequence[Tuple[int, ...]]) -> Graph:
    cluster = np.empty(g.n, dtype=np.int64)
    for c, members in enumerate(partition):
        cluster[list(members)] = c
    edges = set()
    for i, j, _ in g.edges:
        ci, cj = int(cluster[i]), int(cluster[j])
        if ci != cj:
            edges.add((ci, cj))
    if g.has_self_loops:
        edges.update((c, c) for c in range(len(partition)))
    return Graph(len(partition), [(i, j, 1.0) for i, j in sorted(edges)], symmetric=True)


# ---- SagPool ----


@dataclass(frozen=True)
class SagPoolConfig:
    rho: float = 0.5

    def __post_init__(self):
        if not (0.0 < self.rho <= 1.0):
            raise ValueError("SagPool ratio must lie in (0, 1]")

    def keep_count(self, n: int) -> int:
        # round before ceil: 0.3 * 10 must keep 3 nodes
        return max(1, math.ceil(round(self.rho * n, 9)))


class SagAttention(Module):
    def __init__(self, in_features: int, rng: np.random.Generator):
        super().__init__()
        self.w_att = Parameter(glorot_uniform(rng, (in_features, 1), in_features, 1))


def sagpool(s: Tensor, x: Tensor, w_att: Tensor, cfg: SagPoolConfig) -> Tuple[np.ndarray, Tensor]:
    """
    Keep the ``ceil(rho * n)`` highest ``tanh(S X W_att)`` scores and scale kept rows by them.

    Returns:
        Kept indices in score order (``(k,)`` or ``(batch, k)``) and the scaled rows
    """
    n = s.shape[0]
    if x.ndim not in (2, 3) or x.shape[-2] != n:
        raise ShapeError("sagpool", s.shape, x.shape)
    z = T.tanh(s @ x @ w_att)
    z = z.reshape(*z.shape[:-1])
    k = cfg.keep_count(n)

    if x.ndim == 2:
        idx = np.argsort(-z.data, kind="stable")[:k]
        return idx, T.row_scale(T.gather_rows(x, idx), T.index(z, idx))

    idx = np.argsort(-z.data, axis=-1, kind="stable")[:, :k]
    batch_rows = np.arange(x.shape[0])[:, None]
    return idx, T.row_scale(T.gather_rows(x, idx), T.index(z, (batch_rows, idx)))


# ---- Set2Set ----


class Set2Set(Module):
    """
    LSTM-driven attention readout.

    Starting from zero query and zero LSTM state, each step feeds ``q*`` to the
    LSTM, attends with ``softmax(h_i . q)``, and sets ``q* = [q, r]``.
    The embedding is ``relu(dense(q*))`` after the last step.
    """

    def __init__(self, in_features: int, rng: np.random.Generator, steps: int = 3,
                 out_features: Optional[int] = None):
        super().__init__()
        if steps < 1:
            raise ValueError("Set2Set needs at least one processing step")
        self.in_features = in_features
        self.steps = steps
        self.lstm = LSTMCell(2 * in_features, in_features, rng)
        self.dense = Linear(2 * in_features, out_features or in_features, rng)

    def forward(self, h: Tensor) -> Tensor:
        return set2set(h, self)


def set2set(h: Tensor, state: Set2Set) -> Tensor:
    batched = h.ndim == 3
    x = h if batched else h.reshape(1, *h.shape)
    batch, n, f = x.shape
    if n == 0:
        raise ShapeError("set2set", h.shape, detail="graph has no nodes")
    if f != state.in_features:
        raise ShapeError("set2set", h.shape, (state.in_features,))

    q_star = Tensor.zeros((batch, 2 * f))
    hidden = Tensor.zeros((batch, f))
    cell = Tensor.zeros((batch, f))
    for _ in range(state.steps):
        hidden, cell = state.lstm(q_star, hidden, cell)
        q = hidden
        energy = (x @ q.reshape(batch, f, 1)).reshape(batch, n)
        alpha = T.softmax(energy)
        r = (alpha.reshape(batch, 1, n) @ x).reshape(batch, f)
        q_star = T.concat([q, r], axis=-1)

    out = T.relu(state.dense(q_star))
    return out if batched else out.reshape(out.shape[-1])
