"""Linear kernel for rooted internal-out-branching on degenerate digraphs.

The pipeline per round:

1. a local search either finds an out-branching with at least k internal
   vertices (answer YES) or exposes a vertex cover U of size at most
   2k-1 that includes the root;
2. an auxiliary undirected bipartite graph is built between U-side unit
   and ordered-pair vertices and the independent remainder W;
3. vertices of W with small degree are bucketed by their exact
   neighborhood in U, and any class more than twice the size of its
   bipartite neighborhood yields a crown decomposition whose unmatched
   side can be deleted without changing the answer for this k;
4. repeat until no class is oversized.

The result is an induced subgraph of the input with the same k.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .digraph import (
    OutBranching,
    RootedDigraph,
    bfs_out_branching,
    is_connected,
    remove_vertices,
)
from .outcomes import (
    KernelOutcome,
    NoOutcome,
    ReducedOutcome,
    ReductionTrace,
    YesOutcome,
)
from .sparsity import degeneracy

# left-side vertices of the auxiliary graph: ("u", x) for units,
# ("p", x, y) for ordered pairs over the cover
LeftKey = tuple


@dataclass(frozen=True)
class IobInstance:
    graph: RootedDigraph
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be nonnegative")


def vc_or_solution(inst: IobInstance) -> Union[OutBranching, set[int]]:
    """Local search: returns an out-branching with >= k internal vertices,
    or a vertex cover of the underlying undirected graph of size at most
    2k-1 that contains the root.

    Starting from a BFS tree, while some arc (u, v) joins two leaves whose
    target still has siblings, re-hang v under u; every move turns one
    leaf internal, so at most n moves happen. On failure the internal
    vertices plus the blocked heads of remaining leaf-leaf arcs form the
    cover.
    """
    d = inst.graph
    if not is_connected(d):
        raise ValueError("local search requires a connected instance")
    tree = bfs_out_branching(d)
    if tree.internal_count() >= inst.k:
        return tree
    parent = dict(tree.parent)
    n_children = [0] * d.n
    for p in parent.values():
        n_children[p] += 1

    def find_move() -> Optional[tuple[int, int]]:
        # the root always keeps children, so leaf checks exclude it
        for u, v in d.arcs():
            if n_children[u] == 0 and n_children[v] == 0 and n_children[parent[v]] >= 2:
                return u, v
        return None

    for _ in range(d.n + 1):
        move = find_move()
        if move is None:
            break
        u, v = move
        n_children[parent[v]] -= 1
        parent[v] = u
        n_children[u] += 1
    else:
        raise RuntimeError("local search failed to terminate")

    tree = OutBranching(d.n, d.root, parent)
    if tree.internal_count() >= inst.k:
        return tree
    internal = tree.internal()
    blocked = set()
    for u, v in d.arcs():
        if n_children[u] == 0 and n_children[v] == 0:
            blocked.add(v)
    cover = internal | blocked | {d.root}
    return cover


@dataclass
class AuxiliaryBipartite:
    cover: frozenset[int]
    w_vertices: frozenset[int]
    left_adj: dict[LeftKey, set[int]]   # left vertex -> W neighbors
    w_adj: dict[int, set[LeftKey]]      # W vertex -> left neighbors


def build_aux_graph(d: RootedDigraph, cover: set[int]) -> AuxiliaryBipartite:
    """Undirected bipartite graph between the cover side and W = V - U:
    unit x is adjacent to w when (x,w) is an arc; ordered pair (x,y) is
    adjacent to w when both (x,w) and (w,y) are arcs. Pairs with no
    neighbor at all are not materialized (they can never enter a crown's
    separator)."""
    w_set = frozenset(range(d.n)) - frozenset(cover)
    for u, v in d.arcs():
        if u in w_set and v in w_set:
            raise ValueError(f"not a vertex cover: arc ({u},{v}) uncovered")
    left_adj: dict[LeftKey, set[int]] = {}
    w_adj: dict[int, set[LeftKey]] = {w: set() for w in w_set}
    for w in w_set:
        for x in d.in_adj[w]:
            key = ("u", x)
            left_adj.setdefault(key, set()).add(w)
            w_adj[w].add(key)
        for x in d.in_adj[w]:
            for y in d.out_adj[w]:
                key = ("p", x, y)
                left_adj.setdefault(key, set()).add(w)
                w_adj[w].add(key)
    return AuxiliaryBipartite(frozenset(cover), w_set, left_adj, w_adj)


@dataclass
class CrownDecomposition:
    c_m: frozenset[int]
    c_u: frozenset[int]
    h: frozenset[LeftKey]
    r: frozenset
    matching: dict[LeftKey, int]  # h -> its matched partner in c_m

    @property
    def c(self) -> frozenset[int]:
        return self.c_m | self.c_u


def validate_crown(b: AuxiliaryBipartite, crown: CrownDecomposition) -> None:
    """Structural crown checks: C sits inside W (hence independent), its
    neighborhood is exactly covered by H, and the matching pairs H
    perfectly into C_m."""
    if crown.c_m & crown.c_u:
        raise ValueError("C_m and C_u overlap")
    if not crown.c <= b.w_vertices:
        raise ValueError("crown C-side must lie inside W")
    for w in crown.c:
        outside = b.w_adj[w] - crown.h
        if outside:
            raise ValueError(f"edge from crown vertex {w} escapes H: {sorted(outside)[:3]}")
    if set(crown.matching) != set(crown.h):
        raise ValueError("matching must saturate H exactly")
    partners = set(crown.matching.values())
    if partners != set(crown.c_m) or len(partners) != len(crown.matching):
        raise ValueError("matching must pair H perfectly with C_m")
    for h_key, w in crown.matching.items():
        if w not in b.left_adj.get(h_key, ()):
            raise ValueError(f"matching edge {h_key}-{w} not in the graph")


def crown_in_class(b: AuxiliaryBipartite, members: set[int]) -> CrownDecomposition:
    """Crown decomposition of the subgraph induced by a same-neighborhood
    class `members` and its bipartite neighborhood, extended to the whole
    auxiliary graph by absorbing everything else into R. Requires
    |members| > 2 |N_B(members)|, which forces an unmatched vertex and
    hence a nonempty C_u."""
    if not members <= b.w_vertices:
        raise ValueError("class members must lie inside W")
    hood: set[LeftKey] = set()
    for w in members:
        hood.update(b.w_adj[w])
    if len(members) <= 2 * len(hood):
        raise ValueError(
            f"class of size {len(members)} does not exceed twice its "
            f"neighborhood ({len(hood)}); crown rule does not fire")

    member_list = sorted(members)
    left_list = sorted(hood)
    # maximum matching (augmenting paths from the small side)
    match_left: dict[LeftKey, int] = {}
    match_w: dict[int, LeftKey] = {}

    def augment(key: LeftKey, seen: set[LeftKey]) -> bool:
        for w in sorted(b.left_adj[key] & members):
            if w not in match_w:
                match_left[key] = w
                match_w[w] = key
                return True
        for w in sorted(b.left_adj[key] & members):
            nxt = match_w[w]
            if nxt not in seen:
                seen.add(nxt)
                if augment(nxt, seen):
                    match_left[key] = w
                    match_w[w] = key
                    return True
        return False

    for key in left_list:
        augment(key, {key})

    free = [w for w in member_list if w not in match_w]
    c: set[int] = set(free)
    h: set[LeftKey] = set()
    queue = list(free)
    while queue:
        w = queue.pop()
        for key in b.w_adj[w]:
            if key in h:
                continue
            h.add(key)
            partner = match_left.get(key)
            if partner is None:
                raise RuntimeError("unmatched neighbor reached: matching was not maximum")
            if partner not in c:
                c.add(partner)
                queue.append(partner)
    c_m = frozenset(match_left[key] for key in h)
    c_u = frozenset(c) - c_m
    r = (set(b.left_adj) | set(b.w_vertices)) - c - h
    crown = CrownDecomposition(c_m, c_u, frozenset(h), frozenset(r),
                               {key: match_left[key] for key in h})
    validate_crown(b, crown)
    if not crown.c_u:
        raise RuntimeError("crown construction produced empty C_u")
    return crown


@dataclass(frozen=True)
class CrownStep:
    class_key: tuple[int, ...]
    removed: tuple[int, ...]
    mapping: Optional[list]  # old id -> new id (None entries for removed)

    def line(self) -> str:
        key = ",".join(str(x) for x in self.class_key)
        ids = ",".join(str(x) for x in self.removed)
        return f"CROWN class={key} removed={ids}"


def apply_crown_rule(inst: IobInstance, crown: CrownDecomposition,
                     b: Optional[AuxiliaryBipartite] = None) -> tuple[IobInstance, list]:
    """Delete C_u from the instance; k is unchanged and the result is an
    induced subgraph. When the auxiliary graph is supplied the crown is
    re-validated against it."""
    if not crown.c_u:
        raise ValueError("crown has empty C_u; nothing to remove")
    if b is not None:
        validate_crown(b, crown)
        if not crown.c <= b.w_vertices:
            raise ValueError("crown C-side escapes W")
    g, mapping = remove_vertices(inst.graph, crown.c_u)
    return IobInstance(g, inst.k), mapping


def small_degree_classes(d: RootedDigraph, cover: set[int], threshold: int
                         ) -> tuple[dict[tuple[int, ...], list[int]], list[int]]:
    """Bucket W-vertices of undirected degree below the threshold by their
    exact undirected neighborhood (always inside the cover); the rest are
    the heavy side W_b."""
    classes: dict[tuple[int, ...], list[int]] = {}
    heavy: list[int] = []
    for w in range(d.n):
        if w in cover:
            continue
        hood = d.undirected_neighbors(w)
        if len(hood) < threshold:
            classes.setdefault(tuple(sorted(hood)), []).append(w)
        else:
            heavy.append(w)
    return classes, heavy


def kernelize_iob(inst: IobInstance, threshold: Optional[int] = None
                  ) -> tuple[KernelOutcome, ReductionTrace]:
    """Run the four-step kernelization to its fixpoint.

    YES as soon as the local search finds a branching with k internal
    vertices; NO when some vertex is unreachable from the root; otherwise
    an induced-subgraph instance in which no small-degree neighborhood
    class exceeds twice its auxiliary neighborhood. The default degree
    threshold is twice the degeneracy of the input's underlying graph.
    """
    if threshold is None:
        threshold = max(2, 2 * degeneracy(inst.graph).d)
    trace = ReductionTrace()
    current = inst
    for _ in range(inst.graph.n + 1):
        if not is_connected(current.graph):
            return NoOutcome("vertex unreachable from root"), trace
        found = vc_or_solution(current)
        if isinstance(found, OutBranching):
            return YesOutcome(found), trace
        cover = found
        assert len(cover) <= max(2 * current.k - 1, 1), \
            f"cover size {len(cover)} exceeds 2k-1"
        b = build_aux_graph(current.graph, cover)
        classes, _ = small_degree_classes(current.graph, cover, threshold)
        fired = False
        for key in sorted(classes):
            members = set(classes[key])
            hood: set[LeftKey] = set()
            for w in members:
                hood.update(b.w_adj[w])
            if len(members) > 2 * len(hood):
                crown = crown_in_class(b, members)
                nxt, mapping = apply_crown_rule(current, crown, b)
                trace.append(CrownStep(key, tuple(sorted(crown.c_u)), mapping))
                current = nxt
                fired = True
                break
        if not fired:
            for key, group in classes.items():
                hood = set()
                for w in group:
                    hood.update(b.w_adj[w])
                assert len(group) <= 2 * (len(key) ** 2 + len(key)), \
                    "retained class exceeds its structural bound"
            return ReducedOutcome(current, trace), trace
    raise RuntimeError("kernelization failed to reach a fixpoint")


def iob_report(inst: IobInstance, threshold: Optional[int] = None) -> dict:
    """Size accounting of a (typically kernelized) instance: cover size,
    small/heavy split of W, and the class-size histogram."""
    if threshold is None:
        threshold = max(2, 2 * degeneracy(inst.graph).d)
    found = vc_or_solution(inst)
    if isinstance(found, OutBranching):
        return {"resolved": "yes", "internal": found.internal_count()}
    cover = found
    classes, heavy = small_degree_classes(inst.graph, cover, threshold)
    hist: dict[int, int] = {}
    for group in classes.values():
        hist[len(group)] = hist.get(len(group), 0) + 1
    return {
        "resolved": "reduced",
        "n": inst.graph.n,
        "m": inst.graph.m,
        "k": inst.k,
        "threshold": threshold,
        "cover_size": len(cover),
        "w_small": sum(len(g) for g in classes.values()),
        "w_big": len(heavy),
        "class_count": len(classes),
        "class_size_histogram": {str(s): c for s, c in sorted(hist.items())},
    }
