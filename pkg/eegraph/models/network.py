"""EEG graph network assembled from a declarative ``ModelSpec``."""
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .layers import GinLayer, GraphSageLayer, PolyFilterBank, READOUT_KINDS, gin_graph_embedding, readout
from .layers import gin_forward, poly_filter_forward, sage_forward
from .pooling import (
    SORTPOOL_ORDERS,
    EdgeScoreNet,
    SagAttention,
    SagPoolConfig,
    Set2Set,
    SortPoolConfig,
    SortPoolHead,
    edgepool,
    sagpool,
    sortpool,
)
from ..core import tensor as T
from ..core.nn import MLP, Module, ModuleList
from ..core.tensor import Tensor
from ..graphs.graph import Graph, ShiftOperatorKind, parse_shift_operator_kind
from ..graphs.wl import wl_refine
from ..pipeline.compressor import Compressor, CompressorSpec
from ..utils.error_handler import GraphError, UsageError

CONV_KINDS = ("sage", "gin", "poly")
POOL_KINDS = READOUT_KINDS + ("sortpool", "edgepool", "sagpool", "set2set")


@dataclass
class ModelSpec:
    conv: str = "gin"
    pool: str = "sum"
    n_classes: int = 2
    depth: int = 2
    hidden: int = 32
    gin_hidden: int = 32
    poly_taps: int = 2
    shift: ShiftOperatorKind = ShiftOperatorKind.ADJACENCY
    rho: Optional[float] = None
    steps: int = 3
    sortpool_order: str = "features"
    sortpool_channels: int = 16
    mlp_hidden: int = 32
    neighbor_sample_size: Optional[int] = None
    compressor: CompressorSpec = field(default_factory=CompressorSpec)

    def __post_init__(self):
        self.shift = parse_shift_operator_kind(self.shift)
        if self.conv not in CONV_KINDS:
            raise UsageError(f"unknown conv '{self.conv}' (choose from {', '.join(CONV_KINDS)})")
        if self.pool not in POOL_KINDS:
            raise UsageError(f"unknown pool '{self.pool}' (choose from {', '.join(POOL_KINDS)})")
        if self.sortpool_order not in SORTPOOL_ORDERS:
            raise UsageError(f"unknown sortpool order '{self.sortpool_order}'")
        for name in ("depth", "hidden", "gin_hidden", "poly_taps", "steps", "sortpool_channels", "mlp_hidden"):
            if getattr(self, name) < 1:
                raise UsageError(f"model.{name} must be positive")
        if self.n_classes < 2:
            raise UsageError("model.n_classes must be at least 2")

    @property
    def sortpool_rho(self) -> int:
        return int(self.rho) if self.rho is not None else 8

    @property
    def sagpool_rho(self) -> float:
        return float(self.rho) if self.rho is not None else 0.5

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["shift"] = self.shift.value
        return data


class EEGGraphNet(Module):
    """
    Compressor -> graph conv rounds -> pooling/readout -> MLP head producing logits.

    All trials share one electrode graph; input is ``(batch, channels, samples)``.
    """

    def __init__(self, spec: ModelSpec, graph: Graph, n_samples: int, rng: np.random.Generator):
        super().__init__()
        self.spec = spec
        self.graph = graph
        n = graph.n

        if spec.pool == "edgepool" and not any(i != j for i, j, _ in graph.edges):
            raise GraphError("edgepool needs a graph with at least one edge between distinct electrodes")

        self.compressor = Compressor(n, n_samples, spec.compressor, rng)
        self._shift = Tensor(graph.operator_array(spec.shift))

        widths = [spec.compressor.out_features] + [spec.hidden] * spec.depth
        convs: List[Module] = []
        for f_in, f_out in zip(widths[:-1], widths[1:]):
            if spec.conv == "sage":
                convs.append(GraphSageLayer(f_in, f_out, rng, spec.neighbor_sample_size,
                                            sample_seed=int(rng.integers(2**31))))
            elif spec.conv == "gin":
                convs.append(GinLayer(f_in, spec.gin_hidden, f_out, rng))
            else:
                convs.append(PolyFilterBank(f_in, f_out, spec.poly_taps, rng))
        self.convs = ModuleList(convs)

        self._colors = None
        if spec.pool == "sortpool":
            self.sortpool_cfg = SortPoolConfig(spec.sortpool_rho, spec.hidden)
            if spec.sortpool_order == "wl":
                self._colors = np.array(wl_refine(_unit_weights(graph)).final)
            self.sortpool_head = SortPoolHead(self.sortpool_cfg, spec.depth * spec.hidden,
                                              spec.sortpool_channels, rng)
            embed_dim = self.sortpool_head.output_dim
        elif spec.pool == "edgepool":
            self.edge_scorer = EdgeScoreNet(spec.hidden, rng)
            embed_dim = spec.hidden
        elif spec.pool == "sagpool":
            self.sag_cfg = SagPoolConfig(spec.sagpool_rho)
            self.attention = SagAttention(spec.hidden, rng)
            embed_dim = spec.hidden
        elif spec.pool == "set2set":
            self.set2set = Set2Set(spec.hidden, rng, steps=spec.steps)
            embed_dim = spec.hidden
        elif spec.conv == "gin" and spec.pool == "sum":
            embed_dim = sum(widths)
        else:
            embed_dim = spec.hidden
        self.head = MLP(embed_dim, spec.mlp_hidden, spec.n_classes, rng)

    # ---- forward ----

    def conv_rounds(self, x: Tensor) -> List[Tensor]:
        """Node features of every round: the compressed input first, then one entry per conv."""
        rounds = [self.compressor(x)]
        for conv in self.convs:
            h = rounds[-1]
            if self.spec.conv == "sage":
                h = sage_forward(self.graph, h, conv)
            elif self.spec.conv == "gin":
                h = T.relu(gin_forward(self.graph, h, conv))
            else:
                h = poly_filter_forward(self._shift, h, conv, T.relu)
            rounds.append(h)
        return rounds

    def embed(self, x: Tensor) -> Tensor:
        """Graph-level embedding ``(batch, embed_dim)``."""
        rounds = self.conv_rounds(x)
        final = rounds[-1]
        pool = self.spec.pool
        if pool == "sortpool":
            flat = sortpool(T.concat(rounds[1:], axis=-1), self.sortpool_cfg, self._colors)
            return self.sortpool_head(flat)
        if pool == "edgepool":
            pooled = []
            for b in range(final.shape[0]):
                result = edgepool(self.graph, final[b], self.edge_scorer)
                pooled.append(readout(result.features, "sum"))
            return T.stack(pooled, axis=0)
        if pool == "sagpool":
            _, kept = sagpool(self._shift, final, self.attention.w_att, self.sag_cfg)
            return readout(kept, "sum")
        if pool == "set2set":
            return self.set2set(final)
        if pool == "sum" and self.spec.conv == "gin":
            return gin_graph_embedding(rounds)
        return readout(final, pool)

    def forward(self, x: Tensor) -> Tensor:
        return self.head(self.embed(x))

    # ---- channel analysis ----

    def node_embeddings(self, trials: np.ndarray, batch_size: int = 256) -> np.ndarray:
        """Final-round node embeddings ``(trials, channels, hidden)`` in eval mode."""
        was_training = self.training
        self.eval()
        try:
            chunks = [
                self.conv_rounds(Tensor(trials[start:start + batch_size]))[-1].data
                for start in range(0, len(trials), batch_size)
            ]
        finally:
            self.train(was_training)
        return np.concatenate(chunks, axis=0)

    def channel_importance(self, trials: np.ndarray) -> List[Tuple[int, float]]:
        """Electrodes ranked by mean embedding norm over ``trials``; ties keep index order."""
        norms = np.linalg.norm(self.node_embeddings(trials), axis=-1).mean(axis=0)
        order = sorted(range(len(norms)), key=lambda v: (-norms[v], v))
        return [(v, float(norms[v])) for v in order]


def _unit_weights(g: Graph) -> Graph:
    if g.is_unweighted:
        return g
    return Graph(g.n, [(i, j, 1.0) for i, j, _ in g.edges], g.symmetric)
