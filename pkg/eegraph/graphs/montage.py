"""Electrode montages and the edge-formation policies that turn them into graphs."""
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .graph import Graph
from ..core.tensor import Tensor
from ..utils.error_handler import GraphError, MontageError, UsageError

MONTAGE_DIR = Path(__file__).parent.parent / "data" / "montages"
BUILTIN_MONTAGES = ("errp56", "rsvp16")

POLICY_KINDS = ("complete", "knng", "dist")


class Montage:
    """Ordered electrodes with coordinates on a unit-sphere head model."""

    def __init__(self, electrodes: Sequence[Tuple[str, float, float, float]], on_sphere: bool = True):
        if not electrodes:
            raise MontageError("montage has no electrodes")
        names = [str(e[0]) for e in electrodes]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise MontageError(f"duplicate electrode names: {', '.join(dupes)}")
        coords = np.array([[float(e[1]), float(e[2]), float(e[3])] for e in electrodes])
        if on_sphere:
            norms = np.linalg.norm(coords, axis=1)
            bad = [names[i] for i in np.flatnonzero(np.abs(norms - 1.0) > 1e-6)]
            if bad:
                raise MontageError(f"electrodes not on the unit sphere: {', '.join(bad)}")
        self.names: Tuple[str, ...] = tuple(names)
        self.coords = coords

    def __len__(self) -> int:
        return len(self.names)

    def __repr__(self) -> str:
        return f"Montage({len(self)} electrodes)"

    def hemisphere(self, side: str) -> List[int]:
        """Indices of left (x < 0) or right (x > 0) electrodes; midline excluded."""
        if side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        x = self.coords[:, 0]
        mask = x < -1e-9 if side == "left" else x > 1e-9
        return [int(i) for i in np.flatnonzero(mask)]

    def permute(self, perm: Sequence[int]) -> "Montage":
        """Electrode ``v`` moves to position ``perm[v]``."""
        order = np.argsort(perm)
        return Montage(
            [(self.names[i], *self.coords[i]) for i in order],
            on_sphere=False,
        )


@dataclass(frozen=True)
class EdgePolicy:
    kind: str
    k: Optional[int] = None
    d: Optional[float] = None
    self_loops: bool = False

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise UsageError(f"unknown edge policy kind '{self.kind}'")
        if self.kind == "knng" and (self.k is None or self.k < 1):
            raise UsageError("knng policy requires k >= 1")
        if self.kind == "dist" and (self.d is None or self.d < 0 or math.isnan(self.d)):
            raise UsageError("dist policy requires d >= 0")

    def describe(self) -> str:
        """Render back into the ``--edge-policy`` grammar."""
        if self.kind == "knng":
            text = f"knng:k={self.k}"
        elif self.kind == "dist":
            text = f"dist:d={self.d:g}"
        else:
            text = "complete"
        return text + (",self-loops" if self.self_loops else "")


def parse_edge_policy(text: str) -> EdgePolicy:
    """
    Parse ``complete``, ``knng:k=K`` or ``dist:d=D``, each with optional ``,self-loops``.
    """
    raw = text.strip().lower()
    parts = [p.strip() for p in raw.split(",")]
    self_loops = False
    if len(parts) == 2 and parts[1] in ("self-loops", "selfloops", "loops"):
        self_loops = True
    elif len(parts) != 1:
        raise UsageError(f"bad edge policy '{text}'")

    head = parts[0]
    try:
        if head == "complete":
            return EdgePolicy("complete", self_loops=self_loops)
        if head.startswith("knng:k="):
            return EdgePolicy("knng", k=int(head[len("knng:k="):]), self_loops=self_loops)
        if head.startswith("dist:d="):
            return EdgePolicy("dist", d=float(head[len("dist:d="):]), self_loops=self_loops)
    except ValueError:
        pass
    raise UsageError(f"bad edge policy '{text}' (expected complete, knng:k=K or dist:d=D, optional ,self-loops)")


def pairwise_distances(m: Montage) -> Tensor:
    """Euclidean chord distances, symmetric with a zero diagonal."""
    diff = m.coords[:, None, :] - m.coords[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    dist = 0.5 * (dist + dist.T)
    np.fill_diagonal(dist, 0.0)
    return Tensor(dist)


def build_graph(m: Montage, p: EdgePolicy) -> Graph:
    """
    Connect electrodes according to an edge-formation policy.

    All edges have weight 1 and every produced graph is symmetric.

    Raises:
        GraphError: k >= n for a k-NN policy
    """
    n = len(m)
    pairs = set()
    if p.kind == "complete":
        pairs = {(i, j) for i in range(n) for j in range(n) if i != j}
    elif p.kind == "knng":
        if p.k >= n:
            raise GraphError(f"knng needs k < n (k={p.k}, n={n})")
        dist = pairwise_distances(m).data
        for i in range(n):
            candidates = [j for j in range(n) if j != i]
            # stable sort keeps the lower index first among equal distances
            nearest = sorted(candidates, key=lambda j: dist[i, j])[:p.k]
            for j in nearest:
                pairs.add((i, j))
                pairs.add((j, i))
    else:
        dist = pairwise_distances(m).data
        pairs = {(i, j) for i in range(n) for j in range(n) if i != j and dist[i, j] < p.d}

    edges = [(i, j, 1.0) for i, j in sorted(pairs)]
    if p.self_loops:
        edges.extend((i, i, 1.0) for i in range(n))
    return Graph(n, edges, symmetric=True)


# ---- montage files ----


def resolve_montage_path(ref: Union[str, Path], base_dir: Optional[Path] = None) -> Path:
    """Resolve a built-in montage name or a path (relative to ``base_dir``)."""
    text = str(ref)
    if text in BUILTIN_MONTAGES:
        return MONTAGE_DIR / f"{text}.txt"
    path = Path(text)
    if not path.is_absolute() and base_dir is not None:
        path = base_dir / path
    return path


def load_montage(ref: Union[str, Path], base_dir: Optional[Path] = None) -> Montage:
    """
    Load a montage file (``name x y z`` lines, ``#`` comments) or a built-in layout.
    """
    path = resolve_montage_path(ref, base_dir)
    if not path.exists():
        raise MontageError(f"montage file not found: {path}")
    electrodes = []
    for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise MontageError(f"{path}:{number}: expected 'name x y z'")
        try:
            electrodes.append((parts[0], float(parts[1]), float(parts[2]), float(parts[3])))
        except ValueError:
            raise MontageError(f"{path}:{number}: non-numeric coordinate") from None
    return Montage(electrodes, on_sphere=True)


def save_montage(m: Montage, path: Union[str, Path]) -> str:
    lines = ["# name x y z"]
    lines.extend(f"{name} {x:.9f} {y:.9f} {z:.9f}" for name, (x, y, z) in zip(m.names, m.coords))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)
