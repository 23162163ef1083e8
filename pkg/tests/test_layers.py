import numpy as np
import pytest

from eegraph.core import tensor as T
from eegraph.core.gradcheck import check_gradients
from eegraph.core.nn import Linear
from eegraph.core.tensor import Tensor
from eegraph.graphs.graph import Graph, adjacency
from eegraph.models.layers import (
    GinLayer,
    GraphSageLayer,
    PolyFilterBank,
    gin_aggregate,
    gin_forward,
    gin_graph_embedding,
    poly_filter_forward,
    readout,
    sage_forward,
)
from eegraph.utils.error_handler import ShapeError

from .helpers import complete_graph, path_graph, projected, random_graph

TOLERANCE = 1e-4


def _gradient_graph(seed=5, n=5):
    rng = np.random.default_rng(seed)
    g = random_graph(n, rng, p=0.6)
    return g, rng


# ---- polynomial filter ----


def test_poly_filter_second_tap_spreads_to_neighbours(rng):
    g = path_graph(3)
    bank = PolyFilterBank(1, 1, 2, rng)
    for tap in bank.weights:
        tap.weight.data[...] = 1.0
    x = Tensor([[0.0], [1.0], [0.0]])
    out = poly_filter_forward(adjacency(g), x, bank)
    assert np.array_equal(out.data[:, 0], [1.0, 1.0, 1.0])


def test_poly_filter_single_tap_is_dense_layer(rng):
    bank = PolyFilterBank(3, 2, 1, rng)
    x = rng.standard_normal((4, 3))
    out = poly_filter_forward(adjacency(path_graph(4)), Tensor(x), bank)
    assert np.allclose(out.data, x @ bank.weights[0].weight.data)


def test_poly_filter_batched_matches_single(rng):
    g = random_graph(5, rng)
    bank = PolyFilterBank(3, 4, 3, rng)
    s = adjacency(g)
    x = rng.standard_normal((2, 5, 3))
    batched = poly_filter_forward(s, Tensor(x), bank, T.relu).data
    for b in range(2):
        assert np.allclose(batched[b], poly_filter_forward(s, Tensor(x[b]), bank, T.relu).data)


def test_poly_filter_gradients():
    g, rng = _gradient_graph()
    bank = PolyFilterBank(3, 4, 3, rng)
    x = Tensor(rng.standard_normal((5, 3)), requires_grad=True)
    s = Tensor(g.operator_array("normalized_adjacency"))
    fn = projected(lambda: poly_filter_forward(s, x, bank, T.relu))
    assert check_gradients(fn, [x] + bank.parameters()) < TOLERANCE


def test_poly_filter_rejects_row_mismatch(rng):
    with pytest.raises(ShapeError):
        poly_filter_forward(adjacency(path_graph(3)), Tensor(np.ones((4, 2))), PolyFilterBank(2, 2, 2, rng))


# ---- GraphSAGE ----


def test_sage_hand_evaluation(rng):
    layer = GraphSageLayer(2, 2, rng)
    layer.w_pool.data[...] = np.eye(2)
    layer.b.data[...] = 0.0
    layer.w_k.data[...] = np.vstack([np.eye(2), np.eye(2)])
    h = Tensor([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    out = sage_forward(path_graph(3), h, layer).data

    middle = np.array([0.0, 1.0]) + np.array([1.0, 0.5])
    assert np.allclose(out[1], middle / np.linalg.norm(middle))


def test_sage_rows_are_unit_or_zero(rng):
    g = Graph.undirected(4, [(0, 1), (1, 2)])
    layer = GraphSageLayer(3, 5, rng)
    norms = np.linalg.norm(sage_forward(g, Tensor(rng.standard_normal((4, 3))), layer).data, axis=-1)
    assert np.all(np.isclose(norms, 1.0) | np.isclose(norms, 0.0))


def test_sage_isolated_node_uses_only_itself(rng):
    g = Graph.undirected(3, [(0, 1)])
    layer = GraphSageLayer(2, 3, rng)
    h = rng.standard_normal((3, 2))
    out = sage_forward(g, Tensor(h), layer).data
    own = np.maximum(h[2] @ layer.w_k.data[:2], 0.0)
    expected = own / np.linalg.norm(own) if np.linalg.norm(own) > 0 else own
    assert np.allclose(out[2], expected)


def test_sage_neighbour_sampling_only_in_train_mode(rng):
    g = complete_graph(5)
    layer = GraphSageLayer(2, 2, rng, neighbor_sample_size=2, sample_seed=4)
    sampled = layer.aggregator(g)
    assert np.all((sampled > 0).sum(axis=1) == 2)
    assert np.allclose(sampled.sum(axis=1), 1.0)
    layer.eval()
    assert np.array_equal(layer.aggregator(g), g.mean_aggregator())


def test_sage_gradients():
    g, rng = _gradient_graph()
    layer = GraphSageLayer(3, 4, rng)
    x = Tensor(rng.standard_normal((5, 3)), requires_grad=True)
    fn = projected(lambda: sage_forward(g, x, layer))
    assert check_gradients(fn, [x] + layer.parameters()) < TOLERANCE


# ---- GIN ----


def test_gin_aggregate_on_triangle_with_equal_features():
    x = np.array([[0.5, -1.0]] * 3)
    out = gin_aggregate(complete_graph(3), Tensor(x), Tensor(np.zeros(1))).data
    assert np.allclose(out, 3 * x)


def test_gin_aggregate_scales_own_feature_by_one_plus_lambda():
    x = np.array([[1.0], [2.0], [4.0]])
    out = gin_aggregate(path_graph(3), Tensor(x), Tensor([0.5])).data[:, 0]
    assert np.allclose(out, [1.5 + 2.0, 3.0 + 5.0, 6.0 + 2.0])


def test_parameter_counts(rng):
    assert Linear(4, 3, rng).count_params() == 15
    # fc1 8*16 + 16, fc2 16*8 + 8, lambda 1
    assert GinLayer(8, 16, 8, rng).count_params() == 8 * 16 + 16 + 16 * 8 + 8 + 1 == 281


def test_gin_lambda_is_not_regularized(rng):
    layer = GinLayer(2, 3, 2, rng)
    assert layer.lam not in layer.regularized_parameters()
    assert layer.lam.data[0] == 0.0


def test_gin_gradients():
    g, rng = _gradient_graph()
    layer = GinLayer(3, 6, 4, rng)
    layer.lam.data[...] = 0.3
    x = Tensor(rng.standard_normal((5, 3)), requires_grad=True)
    fn = projected(lambda: gin_forward(g, x, layer))
    assert check_gradients(fn, [x] + layer.parameters()) < TOLERANCE


# ---- readouts ----


def test_readouts():
    h = Tensor([[1.0, -2.0], [3.0, 0.0]])
    assert np.array_equal(readout(h, "sum").data, [4.0, -2.0])
    assert np.array_equal(readout(h, "mean").data, [2.0, -1.0])
    assert np.array_equal(readout(h, "max").data, [3.0, 0.0])
    assert readout(Tensor(np.ones((3, 4, 2))), "sum").shape == (3, 2)


def test_readout_errors():
    with pytest.raises(ValueError):
        readout(Tensor(np.ones((2, 2))), "median")
    with pytest.raises(ShapeError):
        readout(Tensor(np.ones((0, 2))), "sum")


def test_gin_graph_embedding_concatenates_every_round(rng):
    rounds = [Tensor(rng.standard_normal((2, 5, width))) for width in (3, 4, 4)]
    out = gin_graph_embedding(rounds)
    assert out.shape == (2, 11)
    assert np.allclose(out.data[:, :3], rounds[0].data.sum(axis=1))


def test_readout_gradients(rng):
    h = Tensor(rng.standard_normal((4, 3)), requires_grad=True)
    for kind in ("sum", "mean", "max"):
        assert check_gradients(projected(lambda: readout(h, kind)), [h]) < TOLERANCE
