"""Graph representation and the four graph shift operators."""
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from ..core.tensor import Tensor
from ..utils.error_handler import GraphError, UsageError

Edge = Tuple[int, int, float]


class ShiftOperatorKind(str, Enum):
    ADJACENCY = "adjacency"
    LAPLACIAN = "laplacian"
    NORMALIZED_ADJACENCY = "normalized_adjacency"
    NORMALIZED_LAPLACIAN = "normalized_laplacian"


def parse_shift_operator_kind(text: Union[str, ShiftOperatorKind]) -> ShiftOperatorKind:
    if isinstance(text, ShiftOperatorKind):
        return text
    try:
        return ShiftOperatorKind(text.strip().lower())
    except ValueError:
        choices = ", ".join(k.value for k in ShiftOperatorKind)
        raise UsageError(f"unknown shift operator '{text}' (choose from {choices})") from None


class Graph:
    """
    Weighted directed edge list over ``n`` nodes; the electrode topology.

    The edge list is canonical. Dense operator matrices are derived from it
    eagerly at construction and cached; graphs are immutable afterwards.
    """

    def __init__(self, n: int, edges: Iterable[Edge], symmetric: bool):
        if n < 0:
            raise GraphError(f"node count must be non-negative, got {n}")
        self.n = int(n)
        self.symmetric = bool(symmetric)

        seen: Dict[Tuple[int, int], float] = {}
        for i, j, w in edges:
            i, j, w = int(i), int(j), float(w)
            if not (0 <= i < n and 0 <= j < n):
                raise GraphError(f"edge ({i}, {j}) out of range for {n} nodes")
            if (i, j) in seen:
                raise GraphError(f"duplicate edge ({i}, {j})")
            seen[(i, j)] = w
        if self.symmetric:
            for (i, j), w in seen.items():
                if seen.get((j, i)) != w:
                    raise GraphError(f"graph flagged symmetric but edge ({j}, {i}, {w}) is missing")

        self.edges: Tuple[Edge, ...] = tuple((i, j, w) for (i, j), w in sorted(seen.items()))
        self._neighbors: List[List[int]] = [[] for _ in range(self.n)]
        for i, j, _ in self.edges:
            self._neighbors[i].append(j)

        self._cache: Dict[ShiftOperatorKind, np.ndarray] = {}
        self._populate_cache()

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge], symmetric: bool = True) -> "Graph":
        return cls(n, edges, symmetric)

    @classmethod
    def undirected(cls, n: int, pairs: Iterable[Tuple[int, int]], w: float = 1.0) -> "Graph":
        """Symmetric graph from unordered pairs, both directions added."""
        edges = set()
        for i, j in pairs:
            edges.add((i, j))
            edges.add((j, i))
        return cls(n, [(i, j, w) for i, j in sorted(edges)], symmetric=True)

    # ---- structure ----

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def has_self_loops(self) -> bool:
        return any(i == j for i, j, _ in self.edges)

    @property
    def is_unweighted(self) -> bool:
        return all(w == 1.0 for _, _, w in self.edges)

    def neighbors(self, v: int) -> List[int]:
        return list(self._neighbors[v])

    def degree_histogram(self) -> Dict[int, int]:
        """Count of nodes per out-degree (edge count, self-loops included)."""
        histogram: Dict[int, int] = {}
        for v in range(self.n):
            d = len(self._neighbors[v])
            histogram[d] = histogram.get(d, 0) + 1
        return dict(sorted(histogram.items()))

    def permute(self, perm: Sequence[int]) -> "Graph":
        """Relabel node ``v`` as ``perm[v]``."""
        perm = list(perm)
        if sorted(perm) != list(range(self.n)):
            raise GraphError("permutation must be a rearrangement of range(n)")
        return Graph(self.n, [(perm[i], perm[j], w) for i, j, w in self.edges], self.symmetric)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.num_edges}, symmetric={self.symmetric})"

    # ---- operators ----

    def _populate_cache(self) -> None:
        a = np.zeros((self.n, self.n))
        for i, j, w in self.edges:
            a[i, j] = w
        self._adjacency = a
        deg = a.sum(axis=1)
        self._degree = np.diag(deg)

        with np.errstate(divide="ignore"):
            inv_sqrt = np.where(deg > 0, 1.0 / np.sqrt(np.where(deg > 0, deg, 1.0)), 0.0)
        norm_adj = inv_sqrt[:, None] * a * inv_sqrt[None, :]

        self._cache[ShiftOperatorKind.ADJACENCY] = a
        self._cache[ShiftOperatorKind.NORMALIZED_ADJACENCY] = norm_adj
        self._cache[ShiftOperatorKind.NORMALIZED_LAPLACIAN] = np.eye(self.n) - norm_adj
        if not self.has_self_loops:
            self._cache[ShiftOperatorKind.LAPLACIAN] = self._degree - a

        with np.errstate(divide="ignore", invalid="ignore"):
            self._mean_aggregator = np.where(deg[:, None] > 0, a / np.where(deg > 0, deg, 1.0)[:, None], 0.0)

    def operator_array(self, kind: ShiftOperatorKind) -> np.ndarray:
        kind = parse_shift_operator_kind(kind)
        if kind not in self._cache:
            raise GraphError(
                "Laplacian is undefined for graphs with self-loops; "
                "use the adjacency or normalized_adjacency shift operator"
            )
        return self._cache[kind]

    def mean_aggregator(self) -> np.ndarray:
        """Row-normalized adjacency ``D^-1 A``; rows of isolated nodes are zero."""
        return self._mean_aggregator

    def degree_array(self) -> np.ndarray:
        return self._degree


def adjacency(g: Graph) -> Tensor:
    return Tensor(g.operator_array(ShiftOperatorKind.ADJACENCY).copy())


def degree_matrix(g: Graph) -> Tensor:
    return Tensor(g.degree_array().copy())


def laplacian(g: Graph) -> Tensor:
    return Tensor(g.operator_array(ShiftOperatorKind.LAPLACIAN).copy())


def normalized_adjacency(g: Graph) -> Tensor:
    """``D^-1/2 A D^-1/2`` with the convention ``0^-1/2 -> 0`` for isolated nodes."""
    return Tensor(g.operator_array(ShiftOperatorKind.NORMALIZED_ADJACENCY).copy())


def normalized_laplacian(g: Graph) -> Tensor:
    return Tensor(g.operator_array(ShiftOperatorKind.NORMALIZED_LAPLACIAN).copy())


def shift_operator(g: Graph, kind: Union[str, ShiftOperatorKind]) -> Tensor:
    return Tensor(g.operator_array(parse_shift_operator_kind(kind)).copy())


# ---- plain-text edge list ----


def save_edge_list(g: Graph, path: Union[str, Path]) -> str:
    lines = [f"n {g.n} symmetric {int(g.symmetric)}"]
    lines.extend(f"{i} {j} {w!r}" for i, j, w in g.edges)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


def load_edge_list(path: Union[str, Path]) -> Graph:
    lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines:
        raise GraphError(f"{path}: empty edge-list file")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "n" or header[2] != "symmetric":
        raise GraphError(f"{path}: bad header '{lines[0]}'")
    edges = []
    for number, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 3:
            raise GraphError(f"{path}:{number}: expected 'i j w'")
        edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
    return Graph(int(header[1]), edges, symmetric=header[3] == "1")
