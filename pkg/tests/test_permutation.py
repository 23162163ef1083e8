"""Graph-level outputs must not depend on how electrodes are numbered."""
import numpy as np
import pytest

from eegraph.core import tensor as T
from eegraph.core.tensor import Tensor
from eegraph.graphs.graph import adjacency
from eegraph.models.layers import GinLayer, GraphSageLayer, gin_forward, gin_graph_embedding, readout, sage_forward
from eegraph.models.pooling import EdgeScoreNet, SagPoolConfig, Set2Set, edgepool, sagpool, set2set

from .helpers import permute_rows, random_graph, random_permutation

CASES = 100
FEATURES = 3


def _cases():
    rng = np.random.default_rng(2024)
    for _ in range(CASES):
        g = random_graph(int(rng.integers(2, 9)), rng, p=float(rng.uniform(0.2, 0.8)))
        perm = random_permutation(g.n, rng)
        x = rng.standard_normal((g.n, FEATURES))
        yield g, perm, x


def _gin_embedding(g, x, layers):
    rounds = [Tensor(x)]
    for layer in layers:
        rounds.append(T.relu(gin_forward(g, rounds[-1], layer)))
    return gin_graph_embedding(rounds).data


def test_gin_sum_embedding_is_invariant():
    rng = np.random.default_rng(1)
    layers = [GinLayer(FEATURES, 8, 4, rng), GinLayer(4, 8, 4, rng)]
    layers[0].lam.data[...] = 0.25
    for g, perm, x in _cases():
        original = _gin_embedding(g, x, layers)
        permuted = _gin_embedding(g.permute(perm), permute_rows(x, perm), layers)
        assert np.max(np.abs(original - permuted)) < 1e-9


@pytest.mark.parametrize("kind", ["mean", "sum", "max"])
def test_sage_readouts_are_invariant(kind):
    layer = GraphSageLayer(FEATURES, 4, np.random.default_rng(2))
    for g, perm, x in _cases():
        original = readout(sage_forward(g, Tensor(x), layer), kind).data
        permuted = readout(sage_forward(g.permute(perm), Tensor(permute_rows(x, perm)), layer), kind).data
        assert np.max(np.abs(original - permuted)) < 1e-9


def test_set2set_is_invariant():
    state = Set2Set(FEATURES, np.random.default_rng(3), steps=3)
    for _, perm, x in _cases():
        original = set2set(Tensor(x), state).data
        permuted = set2set(Tensor(permute_rows(x, perm)), state).data
        assert np.max(np.abs(original - permuted)) < 1e-9


def test_sagpool_selection_follows_the_permutation():
    w = Tensor(np.random.default_rng(4).standard_normal((FEATURES, 1)))
    cfg = SagPoolConfig(0.5)
    for g, perm, x in _cases():
        idx, kept = sagpool(adjacency(g), Tensor(x), w, cfg)
        idx_p, kept_p = sagpool(adjacency(g.permute(perm)), Tensor(permute_rows(x, perm)), w, cfg)
        z = np.tanh(adjacency(g).data @ x @ w.data)[:, 0]
        if len(np.unique(np.round(z, 12))) < len(z):
            continue
        assert [perm[v] for v in idx] == list(idx_p)
        assert np.allclose(kept.data, kept_p.data, atol=1e-12)


def test_edgepool_partition_follows_the_permutation():
    net = EdgeScoreNet(FEATURES, np.random.default_rng(5))
    # equal halves make the raw score independent of endpoint order
    net.linear.weight.data[FEATURES:] = net.linear.weight.data[:FEATURES]
    for g, perm, x in _cases():
        if g.num_edges == 0:
            continue
        result = edgepool(g, Tensor(x), net)
        if len(np.unique(np.round(result.scores.data, 12))) < len(result.scores.data):
            continue
        result_p = edgepool(g.permute(perm), Tensor(permute_rows(x, perm)), net)

        mapped = {frozenset(perm[v] for v in part) for part in result.partition}
        assert mapped == {frozenset(part) for part in result_p.partition}
        assert np.allclose(readout(result.features, "sum").data, readout(result_p.features, "sum").data, atol=1e-12)
