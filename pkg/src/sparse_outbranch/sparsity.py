"""Degeneracy and neighborhood-diversity tooling for sparse graphs.

Everything here works on the underlying undirected view of a digraph (or
a raw adjacency list). Degeneracy comes from the classic iterated
minimum-degree removal; the neighborhood classing buckets vertices outside
a modulator X by their exact trace N(v) & X, splitting off the vertices
whose trace is at least the chosen threshold as "heavy".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .digraph import RootedDigraph, underlying_adjacency

Adjacency = list  # list[set[int]]


def _as_adjacency(g: Union[RootedDigraph, Adjacency]) -> list:
    if isinstance(g, RootedDigraph):
        return underlying_adjacency(g)
    return g


@dataclass(frozen=True)
class DegeneracyOrdering:
    order: tuple[int, ...]
    d: int


def degeneracy(g: Union[RootedDigraph, Adjacency]) -> DegeneracyOrdering:
    """Exact degeneracy via repeatedly removing a minimum-degree vertex;
    the ordering lists vertices in removal order, so each has at most d
    neighbors later in the ordering."""
    adj = _as_adjacency(g)
    n = len(adj)
    deg = [len(a) for a in adj]
    buckets: list[list[int]] = [[] for _ in range(max(deg, default=0) + 1)]
    for v in range(n):
        buckets[deg[v]].append(v)
    removed = [False] * n
    order: list[int] = []
    d = 0
    cursor = 0
    while len(order) < n:
        while cursor < len(buckets) and not buckets[cursor]:
            cursor += 1
        if cursor >= len(buckets):
            raise RuntimeError("degeneracy bucket queue drained early")
        cand = buckets[cursor].pop()
        if removed[cand] or deg[cand] != cursor:
            continue  # stale entry; the live one sits at deg[cand]
        removed[cand] = True
        order.append(cand)
        d = max(d, cursor)
        for w in adj[cand]:
            if not removed[w]:
                deg[w] -= 1
                buckets[deg[w]].append(w)
                if deg[w] < cursor:
                    cursor = deg[w]
    return DegeneracyOrdering(tuple(order), d)


@dataclass
class NeighborhoodClassing:
    modulator: frozenset[int]
    threshold: int
    classes: dict[tuple[int, ...], list[int]]  # sorted trace -> members
    heavy: list[int]

    def class_count(self) -> int:
        return len(self.classes)

    def heavy_count(self) -> int:
        return len(self.heavy)


def classify_by_modulator(g: Union[RootedDigraph, Adjacency],
                          modulator: Iterable[int],
                          threshold: int) -> NeighborhoodClassing:
    """Bucket every vertex outside the modulator by its exact neighborhood
    trace in it. Members with |N(v) & X| >= threshold land in ``heavy``
    instead of a class. With threshold = 2p and p at least the depth-1
    grad, the counting bounds say |heavy| <= 2p|X| and the number of
    distinct classes is at most (4^p + 2p)|X|."""
    adj = _as_adjacency(g)
    X = frozenset(modulator)
    classes: dict[tuple[int, ...], list[int]] = {}
    heavy: list[int] = []
    for v in range(len(adj)):
        if v in X:
            continue
        trace = adj[v] & X if isinstance(adj[v], set) else set(adj[v]) & X
        if len(trace) >= threshold:
            heavy.append(v)
        else:
            classes.setdefault(tuple(sorted(trace)), []).append(v)
    return NeighborhoodClassing(X, threshold, classes, heavy)


def heavy_count_bound_ok(classing: NeighborhoodClassing) -> bool:
    """First counting bound:, with threshold 2p >= 2*grad_1, at most
    2p|X| vertices have heavy traces."""
    return classing.heavy_count() <= classing.threshold * len(classing.modulator)


def class_count_bound_ok(classing: NeighborhoodClassing, p: int) -> bool:
    """Second counting bound: at most (4^p + 2p)|X| distinct small traces."""
    return classing.class_count() <= (4 ** p + 2 * p) * len(classing.modulator)


def heavy_degree_sum_check(x_size: int, y_degrees: Sequence[int], d: int) -> bool:
    """In a bipartite graph (X, Y) of degeneracy at most d, the degrees on
    the Y side that exceed 2d sum to at most 2d|X|. A False return means
    the supplied d was below the true degeneracy (or a harness bug)."""
    total = sum(deg for deg in y_degrees if deg > 2 * d)
    return total <= 2 * d * x_size
