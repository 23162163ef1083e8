"""Weisfeiler-Lehman color refinement."""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .graph import Graph
from ..utils.error_handler import GraphError


@dataclass(frozen=True)
class WlColoring:
    rounds: Tuple[Tuple[int, ...], ...]
    converged: bool

    @property
    def final(self) -> Tuple[int, ...]:
        return self.rounds[-1]

    def num_colors(self, round_index: int = -1) -> int:
        return len(set(self.rounds[round_index]))


def _partition(colors: Sequence[int]) -> frozenset:
    classes: Dict[int, List[int]] = {}
    for v, c in enumerate(colors):
        classes.setdefault(c, []).append(v)
    return frozenset(tuple(members) for members in classes.values())


def _signature(g: Graph, colors: Sequence[int], v: int) -> str:
    neighbor_colors = sorted(colors[u] for u in g.neighbors(v))
    return f"{colors[v]}|{','.join(str(c) for c in neighbor_colors)}"


def _refine_jointly(graphs: Sequence[Graph], max_rounds: int) -> Tuple[List[List[Tuple[int, ...]]], bool]:
    """
    Refine several graphs with one shared signature table per round.

    Sharing the table keeps color integers comparable across graphs.
    """
    for g in graphs:
        if not g.is_unweighted:
            raise GraphError("WL refinement expects an unweighted graph")

    history = [[tuple(0 for _ in range(g.n))] for g in graphs]
    converged = False
    for _ in range(max_rounds):
        signatures = [[_signature(g, hist[-1], v) for v in range(g.n)] for g, hist in zip(graphs, history)]
        table = {sig: color for color, sig in enumerate(sorted({s for sigs in signatures for s in sigs}))}
        new_colors = [tuple(table[s] for s in sigs) for sigs in signatures]

        stable = all(_partition(new) == _partition(hist[-1]) for new, hist in zip(new_colors, history))
        for hist, new in zip(history, new_colors):
            hist.append(new)
        if stable:
            converged = True
            break
    return history, converged


def wl_refine(g: Graph, max_rounds: Optional[int] = None) -> WlColoring:
    """
    Iterate (own color, sorted neighbor colors) signatures until the partition is stable.

    Signatures are compressed to integers in lexicographic order of their string form,
    so the colors themselves (not only the partition) are deterministic.

    Args:
        g: Unweighted graph
        max_rounds: Refinement rounds cap (default: n)
    """
    rounds = g.n if max_rounds is None else max_rounds
    if rounds < 1:
        rounds = 1
    history, converged = _refine_jointly([g], rounds)
    return WlColoring(rounds=tuple(history[0]), converged=converged)


def wl_equivalent(g1: Graph, g2: Graph, rounds: Optional[int] = None) -> bool:
    """
    True when sorted color multisets agree at every round.

    Necessary but not sufficient for isomorphism.
    """
    if g1.n != g2.n:
        return False
    max_rounds = rounds if rounds is not None else max(g1.n, 1)
    (h1, h2), _ = _refine_jointly([g1, g2], max_rounds)
    return all(sorted(a) == sorted(b) for a, b in zip(h1, h2))
