import itertools

import numpy as np
import pytest

from eegraph.core.tensor import Tensor
from eegraph.graphs.graph import Graph
from eegraph.graphs.montage import build_graph, load_montage, parse_edge_policy
from eegraph.models.network import CONV_KINDS, POOL_KINDS, EEGGraphNet, ModelSpec
from eegraph.pipeline.compressor import CompressorSpec
from eegraph.utils.error_handler import GraphError, UsageError

SAMPLES = 40


def _graph(policy="knng:k=2"):
    return build_graph(load_montage("rsvp16"), parse_edge_policy(policy))


def _spec(**overrides):
    base = dict(hidden=4, gin_hidden=4, mlp_hidden=4, sortpool_channels=3, compressor=CompressorSpec(out_features=8))
    base.update(overrides)
    return ModelSpec(**base)


@pytest.mark.parametrize("conv, pool", list(itertools.product(CONV_KINDS, POOL_KINDS)))
def test_every_conv_and_pool_produces_logits(rng, conv, pool):
    model = EEGGraphNet(_spec(conv=conv, pool=pool, n_classes=3), _graph(), SAMPLES, rng)
    logits = model(Tensor(rng.standard_normal((2, 16, SAMPLES))))
    assert logits.shape == (2, 3)
    assert np.all(np.isfinite(logits.data))


def test_gin_sum_embedding_concatenates_rounds(rng):
    model = EEGGraphNet(_spec(conv="gin", pool="sum", depth=3), _graph(), SAMPLES, rng)
    assert model.embed(Tensor(rng.standard_normal((2, 16, SAMPLES)))).shape == (2, 8 + 3 * 4)


def test_sortpool_orders(rng):
    for order in ("features", "wl"):
        model = EEGGraphNet(_spec(pool="sortpool", rho=5, sortpool_order=order), _graph(), SAMPLES, rng)
        assert model.embed(Tensor(rng.standard_normal((2, 16, SAMPLES)))).shape == (2, 3 * 2)


def test_edgepool_needs_an_edge(rng):
    empty = build_graph(load_montage("rsvp16"), parse_edge_policy("dist:d=0,self-loops"))
    with pytest.raises(GraphError):
        EEGGraphNet(_spec(pool="edgepool"), empty, SAMPLES, rng)


def test_laplacian_shift_rejects_self_loops(rng):
    with pytest.raises(GraphError):
        EEGGraphNet(_spec(conv="poly", shift="laplacian"), _graph("knng:k=2,self-loops"), SAMPLES, rng)


@pytest.mark.parametrize("overrides", [
    dict(conv="gcn"),
    dict(pool="attention"),
    dict(depth=0),
    dict(n_classes=1),
    dict(sortpool_order="random"),
    dict(shift="walk"),
])
def test_spec_validation(overrides):
    with pytest.raises(UsageError):
        _spec(**overrides)


def test_spec_defaults_and_dict():
    spec = ModelSpec()
    assert (spec.conv, spec.pool, spec.depth, spec.hidden) == ("gin", "sum", 2, 32)
    assert spec.sortpool_rho == 8
    assert spec.sagpool_rho == 0.5
    data = spec.to_dict()
    assert data["shift"] == "adjacency"
    assert data["compressor"]["out_features"] == 32


def test_same_seed_same_network():
    a = EEGGraphNet(_spec(), _graph(), SAMPLES, np.random.default_rng(9))
    b = EEGGraphNet(_spec(), _graph(), SAMPLES, np.random.default_rng(9))
    for (name, x), (_, y) in zip(a.state_dict().items(), b.state_dict().items()):
        assert np.array_equal(x, y), name


def test_channel_importance_ranks_every_electrode(rng):
    model = EEGGraphNet(_spec(), _graph(), SAMPLES, rng)
    trials = rng.standard_normal((5, 16, SAMPLES))
    ranking = model.channel_importance(trials)
    assert sorted(v for v, _ in ranking) == list(range(16))
    scores = [s for _, s in ranking]
    assert scores == sorted(scores, reverse=True)
    assert model.training


def test_node_embeddings_are_batch_independent(rng):
    model = EEGGraphNet(_spec(conv="sage", pool="mean"), _graph(), SAMPLES, rng)
    trials = rng.standard_normal((5, 16, SAMPLES))
    whole = model.node_embeddings(trials)
    chunked = model.node_embeddings(trials, batch_size=2)
    assert whole.shape == (5, 16, 4)
    assert np.allclose(whole, chunked)


def test_isolated_electrodes_are_supported(rng):
    graph = Graph.undirected(16, [(0, 1), (2, 3)])
    for conv in CONV_KINDS:
        model = EEGGraphNet(_spec(conv=conv, pool="max"), graph, SAMPLES, rng)
        assert np.all(np.isfinite(model(Tensor(rng.standard_normal((2, 16, SAMPLES)))).data))
