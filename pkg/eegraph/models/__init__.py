"""Graph convolution layers, pooling operators and the assembled network."""
from .layers import (
    PolyFilterBank,
    GraphSageLayer,
    GinLayer,
    poly_filter_forward,
    sage_forward,
    gin_forward,
    gin_aggregate,
    readout,
    gin_graph_embedding,
)
from .pooling import (
    SortPoolConfig,
    SortPoolHead,
    sortpool,
    EdgeScoreNet,
    EdgePoolResult,
    edgepool,
    SagPoolConfig,
    sagpool,
    Set2Set,
    set2set,
)
from .network import ModelSpec, EEGGraphNet

__all__ = [
    "PolyFilterBank",
    "GraphSageLayer",
    "GinLayer",
    "poly_filter_forward",
    "sage_forward",
    "gin_forward",
    "gin_aggregate",
    "readout",
    "gin_graph_embedding",
    "SortPoolConfig",
    "SortPoolHead",
    "sortpool",
    "EdgeScoreNet",
    "EdgePoolResult",
    "edgepool",
    "SagPoolConfig",
    "sagpool",
    "Set2Set",
    "set2set",
    "ModelSpec",
    "EEGGraphNet",
]
