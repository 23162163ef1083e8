import numpy as np
import pytest

from eegraph.graphs.montage import (
    EdgePolicy,
    Montage,
    build_graph,
    load_montage,
    pairwise_distances,
    parse_edge_policy,
    save_montage,
)
from eegraph.utils.error_handler import GraphError, MontageError, UsageError

SQUARE = Montage([
    ("A", 1.0, 0.0, 0.0),
    ("B", 0.0, 1.0, 0.0),
    ("C", 0.0, -1.0, 0.0),
    ("D", -1.0, 0.0, 0.0),
])


def _is_symmetric(g):
    edges = {(i, j) for i, j, _ in g.edges}
    return all((j, i) in edges for i, j in edges)


def test_builtin_montages_load():
    assert len(load_montage("rsvp16")) == 16
    assert len(load_montage("errp56")) == 56


def test_complete_edge_counts():
    assert build_graph(load_montage("rsvp16"), parse_edge_policy("complete")).num_edges == 240
    errp = load_montage("errp56")
    assert build_graph(errp, parse_edge_policy("complete")).num_edges == 3080
    with_loops = build_graph(errp, parse_edge_policy("complete,self-loops"))
    assert with_loops.num_edges == 3136
    assert with_loops.has_self_loops


def test_knng_with_all_neighbours_is_complete():
    m = load_montage("rsvp16")
    knng = build_graph(m, EdgePolicy("knng", k=len(m) - 1))
    assert knng.edges == build_graph(m, EdgePolicy("complete")).edges


def test_one_nearest_neighbour_graph_is_sparse_and_symmetric():
    g = build_graph(load_montage("rsvp16"), parse_edge_policy("knng:k=1"))
    assert g.num_edges <= 32
    assert _is_symmetric(g)
    assert min(g.degree_histogram()) >= 1


def test_knng_ties_prefer_lower_index():
    g = build_graph(SQUARE, EdgePolicy("knng", k=1))
    pairs = {(i, j) for i, j, _ in g.edges if i < j}
    assert pairs == {(0, 1), (0, 2), (1, 3)}


def test_knng_needs_k_below_node_count():
    with pytest.raises(GraphError):
        build_graph(SQUARE, EdgePolicy("knng", k=4))


def test_distance_threshold_policy():
    m = load_montage("rsvp16")
    assert build_graph(m, parse_edge_policy("dist:d=0")).num_edges == 0
    # every chord on the unit sphere is at most 2
    assert build_graph(m, parse_edge_policy("dist:d=2.5")).num_edges == 240
    square = build_graph(SQUARE, EdgePolicy("dist", d=1.5))
    assert {(i, j) for i, j, _ in square.edges if i < j} == {(0, 1), (0, 2), (1, 3), (2, 3)}


@pytest.mark.parametrize("policy", ["complete", "knng:k=3", "dist:d=0.8", "knng:k=2,self-loops"])
def test_every_policy_is_symmetric(policy):
    g = build_graph(load_montage("errp56"), parse_edge_policy(policy))
    assert g.symmetric
    assert _is_symmetric(g)


def test_pairwise_distances():
    d = pairwise_distances(SQUARE).data
    assert np.array_equal(d, d.T)
    assert np.all(np.diag(d) == 0.0)
    assert d[0, 3] == pytest.approx(2.0)
    assert d[0, 1] == pytest.approx(np.sqrt(2.0))


def test_parse_edge_policy():
    policy = parse_edge_policy(" KNNG:k=3,self-loops ")
    assert policy == EdgePolicy("knng", k=3, self_loops=True)
    assert policy.describe() == "knng:k=3,self-loops"
    assert parse_edge_policy("dist:d=0.5").d == 0.5


@pytest.mark.parametrize("text", ["complete", "knng:k=3", "dist:d=0.5", "complete,self-loops", "dist:d=1.2,self-loops"])
def test_describe_renders_parseable_policy(text):
    policy = parse_edge_policy(text)
    assert policy.describe() == text
    assert parse_edge_policy(policy.describe()) == policy


@pytest.mark.parametrize("text", ["", "star", "knng", "knng:k=0", "knng:k=x", "dist:d=-1", "complete,loopy"])
def test_bad_edge_policies(text):
    with pytest.raises(UsageError):
        parse_edge_policy(text)


def test_hemispheres_exclude_midline():
    m = load_montage("rsvp16")
    left, right = m.hemisphere("left"), m.hemisphere("right")
    assert [m.names[i] for i in left] == ["Fp1", "F7", "F3", "C3", "P7", "P3"]
    assert len(right) == 6
    assert not set(left) & set(right)


def test_montage_validation(tmp_path):
    with pytest.raises(MontageError, match="duplicate"):
        Montage([("A", 1.0, 0.0, 0.0), ("A", 0.0, 1.0, 0.0)])
    with pytest.raises(MontageError, match="unit sphere"):
        Montage([("A", 2.0, 0.0, 0.0)])
    with pytest.raises(MontageError, match="not found"):
        load_montage(tmp_path / "missing.txt")

    bad = tmp_path / "bad.txt"
    bad.write_text("A 1.0 0.0\n")
    with pytest.raises(MontageError, match="bad.txt:1"):
        load_montage(bad)


def test_montage_file_round_trip(tmp_path):
    path = save_montage(SQUARE, tmp_path / "square.txt")
    loaded = load_montage(path)
    assert loaded.names == SQUARE.names
    assert np.allclose(loaded.coords, SQUARE.coords, atol=1e-9)
