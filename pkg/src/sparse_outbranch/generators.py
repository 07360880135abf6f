"""Seeded instance generators.

Families are chosen to exercise specific machinery: bipath chains drive
the bipath contraction rule, planar triangulations feed the minor-closed
kernel bounds, bounded-degeneracy twin families feed the crown rule, and
plain random digraphs feed the oracle sweeps. Every generator is a pure
function of its parameters and an explicit random seed.
"""

from __future__ import annotations

import random
from typing import Optional

import numpy as np
from scipy.spatial import Delaunay

from .digraph import RootedDigraph, is_connected


def _spanning_overlay(rng: random.Random, n: int, arcs: set[tuple[int, int]],
                      undirected_adj: Optional[list[set[int]]] = None) -> None:
    """Add arcs of a random spanning out-tree from vertex 0 so every vertex
    is reachable. When an undirected adjacency is given the tree arcs are
    chosen inside it (keeps planarity: no new undirected edges appear)."""
    if undirected_adj is None:
        order = list(range(1, n))
        rng.shuffle(order)
        attached = [0]
        for v in order:
            p = rng.choice(attached)
            arcs.add((p, v))
            attached.append(v)
        return
    # randomized BFS tree over the given undirected graph
    seen = [False] * n
    seen[0] = True
    frontier = [0]
    while frontier:
        u = frontier.pop(rng.randrange(len(frontier)))
        nbrs = sorted(undirected_adj[u])
        rng.shuffle(nbrs)
        for w in nbrs:
            if not seen[w]:
                seen[w] = True
                arcs.add((u, w))
                frontier.append(w)
    if not all(seen):
        raise ValueError("underlying graph is disconnected")


def gen_path(n: int) -> RootedDigraph:
    return RootedDigraph(n, 0, [(i, i + 1) for i in range(n - 1)])


def gen_star(n: int) -> RootedDigraph:
    return RootedDigraph(n, 0, [(0, v) for v in range(1, n)])


def gen_bipath_chain(length: int) -> RootedDigraph:
    """Root feeding both ends of a bidirectional chain of ``length``
    vertices; the proper-bipath contraction fires repeatedly on it."""
    if length < 2:
        raise ValueError("chain needs at least two vertices")
    n = length + 1
    arcs = {(0, 1), (0, length)}
    for v in range(1, length):
        arcs.add((v, v + 1))
        arcs.add((v + 1, v))
    return RootedDigraph(n, 0, arcs)


def _triangulation_edges(rng: random.Random, n: int) -> list[set[int]]:
    """Planar undirected graph: Delaunay triangulation of a jittered grid."""
    if n < 3:
        return [set() for _ in range(n)] if n == 0 else \
            [{1} if n == 2 and v == 0 else ({0} if n == 2 else set()) for v in range(n)]
    side = int(np.ceil(np.sqrt(n)))
    pts = []
    for i in range(n):
        gx, gy = divmod(i, side)
        pts.append((gx + 0.42 * rng.random(), gy + 0.42 * rng.random()))
    tri = Delaunay(np.asarray(pts))
    adj: list[set[int]] = [set() for _ in range(n)]
    for simplex in tri.simplices:
        for a in range(3):
            u, v = int(simplex[a]), int(simplex[(a + 1) % 3])
            adj[u].add(v)
            adj[v].add(u)
    return adj


def gen_planar(n: int, seed: int, both_prob: float = 0.25,
               keep_prob: float = 1.0) -> RootedDigraph:
    """Random planar digraph: each triangulation edge is dropped with
    probability 1-keep_prob, else oriented one way or both ways; a
    spanning out-tree inside the triangulation guarantees connectivity,
    so the underlying graph stays a subgraph of the triangulation."""
    rng = random.Random(seed)
    adj = _triangulation_edges(rng, n)
    arcs: set[tuple[int, int]] = set()
    for u in range(n):
        for v in adj[u]:
            if u < v:
                if rng.random() > keep_prob:
                    continue
                if rng.random() < both_prob:
                    if v != 0:
                        arcs.add((u, v))
                    if u != 0:
                        arcs.add((v, u))
                elif rng.random() < 0.5:
                    if v != 0:
                        arcs.add((u, v))
                else:
                    if u != 0:
                        arcs.add((v, u))
    _spanning_overlay(rng, n, arcs, adj)
    return RootedDigraph(n, 0, arcs)


def gen_degenerate(n: int, d: int, seed: int, both_prob: float = 0.3) -> RootedDigraph:
    """d-degenerate by construction: vertex v attaches to at most d random
    earlier vertices, one of which becomes its tree parent."""
    rng = random.Random(seed)
    arcs: set[tuple[int, int]] = set()
    for v in range(1, n):
        pool = list(range(v))
        rng.shuffle(pool)
        picks = pool[:min(d, v)]
        arcs.add((picks[0], v))
        for w in picks[1:]:
            if rng.random() < both_prob:
                arcs.add((w, v))
                if w != 0:
                    arcs.add((v, w))
            elif rng.random() < 0.5:
                arcs.add((w, v))
            elif w != 0:
                arcs.add((v, w))
    return RootedDigraph(n, 0, arcs)


def gen_iob_twins(k: int, d: int, seed: int, twin_factor: int = 12) -> RootedDigraph:
    """No-instance family for the internal-out-branching kernel: a core
    path bounds the achievable internal count below k while twin_factor*k
    twin vertices share neighborhoods drawn from a small pool of core
    subsets of size <= d. Degeneracy stays <= d."""
    rng = random.Random(seed)
    core_len = max(1, (k - 2) // 2)  # max internal <= 2*|core U| + 1 < k
    n_core = core_len + 1            # path r = c0 -> c1 -> ... -> c_core_len
    arcs = {(i, i + 1) for i in range(core_len)}
    pool: list[tuple[int, ...]] = []
    for _ in range(max(3, k // 2)):
        size = rng.randint(1, d)
        subset = tuple(sorted(rng.sample(range(n_core), min(size, n_core))))
        pool.append(subset)
    nxt = n_core
    for _ in range(twin_factor * k):
        subset = pool[rng.randrange(len(pool))]
        w = nxt
        nxt += 1
        arcs.add((subset[0], w))
        for x in subset[1:]:
            r = rng.random()
            if r < 0.4:
                arcs.add((x, w))
            elif x != 0:
                arcs.add((w, x))
            else:
                arcs.add((x, w))
    return RootedDigraph(nxt, 0, arcs)


def gen_random(n: int, m: int, seed: int, bidi_prob: float = 0.0) -> RootedDigraph:
    """Random connected digraph with roughly m arcs (a spanning overlay may
    add a few); bidi_prob controls anti-parallel companions."""
    rng = random.Random(seed)
    arcs: set[tuple[int, int]] = set()
    attempts = 0
    while len(arcs) < m and attempts < 20 * m + 100:
        attempts += 1
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v or v == 0:
            continue
        arcs.add((u, v))
        if rng.random() < bidi_prob and u != 0:
            arcs.add((v, u))
    _spanning_overlay(rng, n, arcs)
    return RootedDigraph(n, 0, arcs)


FAMILIES = {
    "path": lambda n, k, seed, **kw: gen_path(n),
    "star": lambda n, k, seed, **kw: gen_star(n),
    "bipath-chain": lambda n, k, seed, **kw: gen_bipath_chain(max(n - 1, 2)),
    "planar": lambda n, k, seed, **kw: gen_planar(n, seed, **kw),
    "degenerate": lambda n, k, seed, d=3, **kw: gen_degenerate(n, d, seed, **kw),
    "iob-twins": lambda n, k, seed, d=3, **kw: gen_iob_twins(k, d, seed, **kw),
    "random": lambda n, k, seed, m=None, **kw: gen_random(n, m if m else 2 * n, seed, **kw),
}


def generate(family: str, n: int, k: int, seed: int, **kwargs) -> RootedDigraph:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    g = FAMILIES[family](n, k, seed, **kwargs)
    assert is_connected(g)
    return g
