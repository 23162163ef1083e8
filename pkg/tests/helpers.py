"""Shared builders for the test suite."""
from typing import Callable, List, Sequence, Tuple

import numpy as np

from eegraph.core import tensor as T
from eegraph.core.tensor import Tensor
from eegraph.graphs.graph import Graph


def random_graph(n: int, rng: np.random.Generator, p: float = 0.4, self_loops: bool = False) -> Graph:
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    if self_loops:
        pairs.extend((i, i) for i in range(n))
    return Graph.undirected(n, pairs)


def path_graph(n: int) -> Graph:
    return Graph.undirected(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.undirected(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.undirected(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_permutation(n: int, rng: np.random.Generator) -> List[int]:
    return [int(v) for v in rng.permutation(n)]


def permute_rows(x: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    """Rows moved so that old row ``v`` sits at ``perm[v]`` (node axis -2)."""
    out = np.empty_like(x)
    out[..., list(perm), :] = x
    return out


def leaves(rng: np.random.Generator, *shapes: Tuple[int, ...]) -> List[Tensor]:
    return [Tensor(rng.standard_normal(shape), requires_grad=True) for shape in shapes]


def projected(build: Callable[[], Tensor], seed: int = 99) -> Callable[[], Tensor]:
    """
    Scalar ``sum(build() * P)`` with a fixed random ``P``.

    A random projection keeps every output entry visible to the gradient check.
    """
    shape = build().shape
    weights = Tensor(np.random.default_rng(seed).standard_normal(shape))

    def fn() -> Tensor:
        return T.reduce_sum(build() * weights)

    return fn
