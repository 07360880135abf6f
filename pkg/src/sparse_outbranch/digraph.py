"""Rooted digraphs and their connectivity/surgery primitives.

A rooted digraph is a simple directed graph (no loops, no duplicate arcs;
anti-parallel pairs allowed) with a designated root of in-degree 0.
Connectivity is always taken in the rooted sense: a graph is connected when
every vertex is reachable from the root, a cut-vertex (cut-edge) is a
vertex (arc) whose removal breaks that property.

Graphs are immutable after construction; every surgery returns a new graph
together with an old-id -> new-id mapping so that reduction traces can be
replayed against original vertex names.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Optional

Arc = tuple[int, int]


class RootedDigraph:
    """Simple digraph on vertices 0..n-1 with a root of in-degree 0."""

    __slots__ = ("n", "root", "out_adj", "in_adj", "_arcset")

    def __init__(self, n: int, root: int, arcs: Iterable[Arc]):
        if n <= 0:
            raise ValueError("vertex count must be positive")
        if not 0 <= root < n:
            raise ValueError(f"root {root} out of range 0..{n - 1}")
        out_adj: list[list[int]] = [[] for _ in range(n)]
        in_adj: list[list[int]] = [[] for _ in range(n)]
        arcset: set[Arc] = set()
        for u, v in arcs:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"arc ({u},{v}) out of range")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if (u, v) in arcset:
                raise ValueError(f"duplicate arc ({u},{v})")
            if v == root:
                raise ValueError(f"arc ({u},{v}) enters the root")
            arcset.add((u, v))
            out_adj[u].append(v)
            in_adj[v].append(u)
        for adj in out_adj:
            adj.sort()
        for adj in in_adj:
            adj.sort()
        self.n = n
        self.root = root
        self.out_adj = out_adj
        self.in_adj = in_adj
        self._arcset = arcset

    @property
    def m(self) -> int:
        return len(self._arcset)

    def vertices(self) -> range:
        return range(self.n)

    def arcs(self) -> list[Arc]:
        return sorted(self._arcset)

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self._arcset

    def out_neighbors(self, v: int) -> list[int]:
        return self.out_adj[v]

    def in_neighbors(self, v: int) -> list[int]:
        return self.in_adj[v]

    def out_degree(self, v: int) -> int:
        return len(self.out_adj[v])

    def in_degree(self, v: int) -> int:
        return len(self.in_adj[v])

    def undirected_degree(self, v: int) -> int:
        return len(set(self.out_adj[v]) | set(self.in_adj[v]))

    def undirected_neighbors(self, v: int) -> set[int]:
        return set(self.out_adj[v]) | set(self.in_adj[v])

    def undirected_edges(self) -> set[frozenset[int]]:
        return {frozenset(a) for a in self._arcset}

    def with_arcs_removed(self, removed: Iterable[Arc]) -> "RootedDigraph":
        dead = set(removed)
        return RootedDigraph(self.n, self.root,
                             (a for a in self._arcset if a not in dead))

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, RootedDigraph)
                and self.n == other.n
                and self.root == other.root
                and self._arcset == other._arcset)

    def __hash__(self) -> int:
        return hash((self.n, self.root, frozenset(self._arcset)))

    def __repr__(self) -> str:
        return f"RootedDigraph(n={self.n}, root={self.root}, m={self.m})"


class OutBranching:
    """Spanning tree of a rooted digraph with all arcs oriented away from
    the root, stored as a parent map over non-root vertices.

    A vertex is a leaf when it has out-degree 0 in the tree, internal
    otherwise.
    """

    __slots__ = ("n", "root", "parent", "children")

    def __init__(self, n: int, root: int, parent: dict[int, int]):
        if set(parent) != set(range(n)) - {root}:
            raise ValueError("parent map must cover exactly the non-root vertices")
        children: list[list[int]] = [[] for _ in range(n)]
        for v, p in parent.items():
            children[p].append(v)
        # acyclicity + rootedness: walk up from every vertex
        for v in range(n):
            seen = 0
            u = v
            while u != root:
                u = parent[u]
                seen += 1
                if seen > n:
                    raise ValueError("parent map contains a cycle")
        self.n = n
        self.root = root
        self.parent = dict(parent)
        self.children = children

    def leaves(self) -> set[int]:
        return {v for v in range(self.n) if not self.children[v]}

    def internal(self) -> set[int]:
        return {v for v in range(self.n) if self.children[v]}

    def leaf_count(self) -> int:
        return sum(1 for v in range(self.n) if not self.children[v])

    def internal_count(self) -> int:
        return self.n - self.leaf_count()

    def tree_arcs(self) -> set[Arc]:
        return {(p, v) for v, p in self.parent.items()}

    def is_valid_for(self, d: RootedDigraph) -> bool:
        return (self.n == d.n and self.root == d.root
                and all(d.has_arc(p, v) for v, p in self.parent.items()))


def reachable(d: RootedDigraph, start: int,
              removed_vertices: Iterable[int] = (),
              removed_arcs: Iterable[Arc] = ()) -> set[int]:
    """Vertices reachable from ``start`` by directed paths that avoid the
    removed vertices and arcs. ``start`` itself is always included."""
    if not 0 <= start < d.n:
        raise ValueError(f"vertex {start} out of range")
    dead_v = set(removed_vertices)
    if start in dead_v:
        raise ValueError("start vertex is removed")
    dead_a = set(removed_arcs)
    seen = [False] * d.n
    seen[start] = True
    for v in dead_v:
        seen[v] = True  # mark removed so BFS never enters them
    queue = deque([start])
    out_adj = d.out_adj
    if dead_a:
        while queue:
            u = queue.popleft()
            for w in out_adj[u]:
                if not seen[w] and (u, w) not in dead_a:
                    seen[w] = True
                    queue.append(w)
    else:
        while queue:
            u = queue.popleft()
            for w in out_adj[u]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
    return {v for v in range(d.n) if seen[v] and v not in dead_v}


def is_connected(d: RootedDigraph) -> bool:
    """True when every vertex is reachable from the root."""
    return len(reachable(d, d.root)) == d.n


def _reach_avoiding(d: RootedDigraph, avoid: int) -> list[bool]:
    """Reachability table from the root with one vertex deleted."""
    seen = [False] * d.n
    seen[avoid] = True
    if avoid == d.root:
        raise ValueError("cannot remove the root")
    seen[d.root] = True
    queue = deque([d.root])
    out_adj = d.out_adj
    while queue:
        u = queue.popleft()
        for w in out_adj[u]:
            if not seen[w]:
                seen[w] = True
                queue.append(w)
    seen[avoid] = False
    return seen


def cut_structure(d: RootedDigraph) -> tuple[set[int], set[Arc]]:
    """Cut-vertices and cut-edges of a connected rooted digraph in one pass.

    An arc (u,v) disconnects something exactly when v itself loses all
    alternative access, i.e. no other in-neighbor of v stays reachable once
    v is deleted. So one reachability run per vertex yields both sets.
    """
    if not is_connected(d):
        raise ValueError("cut structure requires a connected digraph")
    cut_v: set[int] = set()
    cut_e: set[Arc] = set()
    for v in range(d.n):
        if v == d.root:
            continue
        seen = _reach_avoiding(d, v)
        if not all(seen[w] for w in range(d.n) if w != v):
            cut_v.add(v)
        alive = [w for w in d.in_adj[v] if seen[w]]
        if len(alive) == 1:
            cut_e.add((alive[0], v))
    return cut_v, cut_e


def cut_vertices(d: RootedDigraph) -> set[int]:
    """Vertices (other than the root) whose removal disconnects the graph."""
    return cut_structure(d)[0]


def cut_edges(d: RootedDigraph) -> set[Arc]:
    """Arcs whose single removal makes some vertex unreachable from the root."""
    return cut_structure(d)[1]


def split_lonely_branching(cut_e: set[Arc]) -> tuple[set[Arc], set[Arc]]:
    """Partition cut-edges into lonely (tail emits no other cut-edge) and
    branching (tail shared with another cut-edge)."""
    by_tail: dict[int, list[Arc]] = {}
    for a in cut_e:
        by_tail.setdefault(a[0], []).append(a)
    lonely = {a for a in cut_e if len(by_tail[a[0]]) == 1}
    return lonely, cut_e - lonely


def private_neighbors(d: RootedDigraph, u: int) -> set[int]:
    """Out-neighbors of u that are unreachable from the root once u is
    removed. For u = root this is all of its out-neighbors."""
    if not 0 <= u < d.n:
        raise ValueError(f"vertex {u} out of range")
    if u == d.root:
        return set(d.out_adj[u])
    seen = _reach_avoiding(d, u)
    return {w for w in d.out_adj[u] if not seen[w]}


def contract_arc(d: RootedDigraph, arc: Arc) -> tuple[RootedDigraph, list[int]]:
    """Identify the endpoints of ``arc`` into one vertex, dropping loops and
    parallel arcs. Returns the new graph and the old->new id mapping (both
    endpoints map to the merged id). If the root is an endpoint the merged
    vertex becomes the root; the in-degree-0 invariant must survive, which
    is the caller's responsibility to arrange."""
    u, v = arc
    if not d.has_arc(u, v):
        raise ValueError(f"arc ({u},{v}) not in graph")
    keep = min(u, v)
    gone = max(u, v)
    mapping = [x - (1 if x > gone else 0) for x in range(d.n)]
    mapping[gone] = mapping[keep]
    new_arcs = set()
    for a, b in d._arcset:
        na, nb = mapping[a], mapping[b]
        if na != nb:
            new_arcs.add((na, nb))
    new_root = mapping[d.root]
    g = RootedDigraph(d.n - 1, new_root, new_arcs)
    return g, mapping


def shortcut_vertex(d: RootedDigraph, v: int) -> tuple[RootedDigraph, list[Optional[int]]]:
    """Remove v and add an arc (x, y) for every directed path (x, v, y)
    with x != y. Returns the new graph and the old->new mapping, with
    None for the removed vertex."""
    if v == d.root:
        raise ValueError("cannot shortcut the root")
    if not 0 <= v < d.n:
        raise ValueError(f"vertex {v} out of range")
    mapping: list[Optional[int]] = [None] * d.n
    nxt = 0
    for x in range(d.n):
        if x != v:
            mapping[x] = nxt
            nxt += 1
    new_arcs = set()
    for a, b in d._arcset:
        if v not in (a, b):
            new_arcs.add((mapping[a], mapping[b]))
    for x in d.in_adj[v]:
        for y in d.out_adj[v]:
            if x != y:
                new_arcs.add((mapping[x], mapping[y]))
    g = RootedDigraph(d.n - 1, mapping[d.root], new_arcs)
    return g, mapping


def remove_vertices(d: RootedDigraph, drop: Iterable[int]) -> tuple[RootedDigraph, list[Optional[int]]]:
    """Induced subgraph on the complement of ``drop``, with old->new mapping
    (None for removed vertices)."""
    dead = set(drop)
    if d.root in dead:
        raise ValueError("cannot remove the root")
    mapping: list[Optional[int]] = [None] * d.n
    nxt = 0
    for x in range(d.n):
        if x not in dead:
            mapping[x] = nxt
            nxt += 1
    new_arcs = {(mapping[a], mapping[b]) for a, b in d._arcset
                if a not in dead and b not in dead}
    g = RootedDigraph(d.n - len(dead), mapping[d.root], new_arcs)
    return g, mapping


def planarity_witness_check(d: RootedDigraph) -> bool:
    """Necessary-condition planarity check on the underlying simple
    undirected graph: false when the Euler bound m <= 3n - 6 fails
    (n >= 3), true otherwise."""
    if d.n < 3:
        return True
    return len(d.undirected_edges()) <= 3 * d.n - 6


def underlying_adjacency(d: RootedDigraph) -> list[set[int]]:
    """Adjacency sets of the underlying simple undirected graph."""
    adj: list[set[int]] = [set() for _ in range(d.n)]
    for u, v in d._arcset:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def bfs_out_branching(d: RootedDigraph) -> OutBranching:
    """Breadth-first spanning out-branching; requires a connected graph."""
    parent: dict[int, int] = {}
    seen = [False] * d.n
    seen[d.root] = True
    queue = deque([d.root])
    while queue:
        u = queue.popleft()
        for w in d.out_adj[u]:
            if not seen[w]:
                seen[w] = True
                parent[w] = u
                queue.append(w)
    if len(parent) != d.n - 1:
        raise ValueError("graph is not connected from the root")
    return OutBranching(d.n, d.root, parent)
