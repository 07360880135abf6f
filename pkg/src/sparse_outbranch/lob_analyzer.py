"""Structure analysis of reduced leaf-out-branching instances.

Builds the contracted graph (lonely cut-edges collapsed into bags of size
at most two), identifies special and isolated vertices, decomposes the
remainder into weak bipaths, classifies parallel hard bipaths into masters
and slaves, and turns the three lower bounds

    maxleaf >= |special| / 60
    maxleaf >= |isolated| / 180
    maxleaf >= #slaves

into an acceptance certificate for the instance's leaf target k.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .digraph import (
    RootedDigraph,
    cut_structure,
    split_lonely_branching,
)
from .lob_reducer import LobInstance, find_rule


class StructureError(RuntimeError):
    """A structural lemma failed on supposedly reduced input; this signals
    a bug in the rule engine, not bad user data."""


@dataclass(frozen=True)
class Bag:
    members: tuple[int, ...]  # original vertices, 1 or 2 of them
    tail: int
    head: int

    def __post_init__(self):
        if not 1 <= len(self.members) <= 2:
            raise ValueError("bag must hold one or two vertices")


@dataclass
class ContractedGraph:
    graph: RootedDigraph       # the contracted digraph
    bag_of: list[Bag]          # contracted vertex -> bag of original vertices
    origin: list[int]          # original vertex -> contracted vertex
    original: RootedDigraph


def build_contracted(d: RootedDigraph, check: bool = True) -> ContractedGraph:
    """Contract every lonely cut-edge of a fully reduced graph. With
    ``check`` the reduction fixpoint is verified first."""
    if check:
        app = find_rule(LobInstance(d, 0))
        if app is not None:
            raise ValueError(f"graph is not reduced: rule {app.rule_id} applies")
    _, cut_e = cut_structure(d)
    lonely, _ = split_lonely_branching(cut_e)
    touched: set[int] = set()
    for u, v in lonely:
        if u in touched or v in touched:
            raise StructureError("lonely cut-edges do not form a matching")
        touched.update((u, v))
    groups: list[tuple[int, ...]] = []
    in_pair = {}
    for u, v in lonely:
        in_pair[u] = (u, v)
        in_pair[v] = (u, v)
    for v in range(d.n):
        if v not in in_pair:
            groups.append((v,))
        elif in_pair[v][0] == v:
            groups.append(in_pair[v])
    groups.sort(key=min)
    origin = [0] * d.n
    bags: list[Bag] = []
    for idx, grp in enumerate(groups):
        for w in grp:
            origin[w] = idx
        if len(grp) == 1:
            bags.append(Bag(grp, grp[0], grp[0]))
        else:
            bags.append(Bag(grp, grp[0], grp[1]))
    arcs = {(origin[a], origin[b]) for a, b in d.arcs() if origin[a] != origin[b]}
    g = RootedDigraph(len(groups), origin[d.root], arcs)
    return ContractedGraph(g, bags, origin, d)


def special_vertex_set(g: RootedDigraph) -> set[int]:
    """Vertices of in-degree at least 3 or with an incoming arc whose
    reverse is absent."""
    out: set[int] = set()
    for v in range(g.n):
        if g.in_degree(v) >= 3:
            out.add(v)
            continue
        for u in g.in_adj[v]:
            if not g.has_arc(v, u):
                out.add(v)
                break
    return out


def special_vertices(dc: ContractedGraph) -> set[int]:
    return special_vertex_set(dc.graph)


def isolated_vertices(dc: ContractedGraph,
                      special: Optional[set[int]] = None) -> set[int]:
    """Non-special size-2 bags whose tail sends no original arc into any
    special bag."""
    if special is None:
        special = special_vertices(dc)
    iso: set[int] = set()
    d = dc.original
    for v in range(dc.graph.n):
        bag = dc.bag_of[v]
        if v in special or len(bag.members) != 2:
            continue
        if all(dc.origin[w] not in special for w in d.out_adj[bag.tail]):
            iso.add(v)
    return iso


@dataclass(frozen=True)
class WeakBipath:
    vertices: tuple[int, ...]  # u1..up in contracted-graph ids, p >= 3

    @property
    def extremities(self) -> tuple[int, int]:
        return self.vertices[0], self.vertices[-1]

    @property
    def internals(self) -> tuple[int, ...]:
        return self.vertices[1:-1]

    def canonical(self) -> tuple[int, ...]:
        return min(self.vertices, tuple(reversed(self.vertices)))


@dataclass
class BipathDecomposition:
    seed_set: frozenset[int]
    paths: list[WeakBipath]


def decompose_bipaths(dc: ContractedGraph, seed: set[int]) -> BipathDecomposition:
    """Partition the contracted graph outside ``seed`` into the internal
    vertices of weak bipaths whose extremities lie in the seed set. The
    seed must contain the root and every special vertex; on reduced input
    the decomposition lemma guarantees the partition exists, so any
    violation raises StructureError."""
    g = dc.graph
    special = special_vertices(dc)
    missing = ({g.root} | special) - seed
    if missing:
        raise ValueError(f"seed set misses root/special vertices: {sorted(missing)}")

    side: dict[int, tuple[int, int]] = {}
    for v in range(g.n):
        if v in seed:
            continue
        ins = g.in_adj[v]
        if len(ins) != 2 or any(not g.has_arc(v, u) for u in ins):
            raise StructureError(
                f"vertex {v} outside the seed is not weak-bipath internal")
        side[v] = (ins[0], ins[1])

    paths: list[WeakBipath] = []
    visited: set[int] = set()
    for v in sorted(side):
        if v in visited:
            continue
        # walk to one end of the chain of non-seed vertices
        chain = [v]
        visited.add(v)
        for direction in (0, 1):
            prev = v
            nxt = side[v][direction]
            while nxt not in seed:
                if nxt in visited:
                    raise StructureError("bidirectional cycle outside the seed set")
                visited.add(nxt)
                if direction == 0:
                    chain.insert(0, nxt)
                else:
                    chain.append(nxt)
                a, b = side[nxt]
                prev, nxt = nxt, (a if b == prev else b)
            if direction == 0:
                chain.insert(0, nxt)
            else:
                chain.append(nxt)
        u1, up = chain[0], chain[-1]
        if u1 == up:
            raise StructureError(f"weak bipath with coinciding extremities at {u1}")
        for w in chain[1:-1]:
            for y in g.out_adj[w]:
                if y not in seed and y not in chain:
                    raise StructureError(
                        f"internal vertex {w} has out-neighbor {y} outside seed and path")
        path = WeakBipath(tuple(chain))
        if path.canonical() != path.vertices:
            path = WeakBipath(tuple(reversed(chain)))
        paths.append(path)
    paths.sort(key=lambda p: p.canonical())
    covered = {w for p in paths for w in p.internals}
    if covered != set(side):
        raise StructureError("internal vertices do not partition the non-seed set")
    return BipathDecomposition(frozenset(seed), paths)


def easy_vertices(dc: ContractedGraph) -> set[int]:
    """Root, special vertices, and isolated vertices of the contracted graph."""
    sp = special_vertices(dc)
    return {dc.graph.root} | sp | isolated_vertices(dc, sp)


def outside_neighborhood(dc: ContractedGraph, path: WeakBipath) -> frozenset[int]:
    """Out-neighbors (in the contracted graph) of the path's internal
    vertices, excluding the internals themselves."""
    g = dc.graph
    internals = set(path.internals)
    out: set[int] = set()
    for w in internals:
        out.update(g.out_adj[w])
    return frozenset(out - internals)


def classify_masters_slaves(dec: BipathDecomposition, dc: ContractedGraph
                            ) -> tuple[list[WeakBipath], list[WeakBipath]]:
    """Group maximal hard bipaths by extremity pair and outside
    neighborhood; the two lexicographically smallest paths of each group
    are masters, the rest slaves."""
    groups: dict[tuple[frozenset[int], frozenset[int]], list[WeakBipath]] = {}
    for p in dec.paths:
        key = (frozenset(p.extremities), outside_neighborhood(dc, p))
        groups.setdefault(key, []).append(p)
    masters: list[WeakBipath] = []
    slaves: list[WeakBipath] = []
    for key in sorted(groups, key=lambda k: (sorted(k[0]), sorted(k[1]))):
        members = sorted(groups[key], key=lambda p: p.canonical())
        masters.extend(members[:2])
        slaves.extend(members[2:])
    return masters, slaves


@dataclass(frozen=True)
class LobCertificate:
    k: int
    special_count: int
    isolated_count: int
    slave_count: int

    @property
    def implied_lower_bound(self) -> int:
        return max(-(-self.special_count // 60),
                   -(-self.isolated_count // 180),
                   self.slave_count)

    @property
    def accepted(self) -> bool:
        return (self.special_count >= 60 * self.k
                or self.isolated_count >= 180 * self.k
                or self.slave_count >= self.k)

    @property
    def decision(self) -> str:
        return "yes" if self.accepted else "undecided"

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "special_count": self.special_count,
            "isolated_count": self.isolated_count,
            "slave_count": self.slave_count,
            "implied_lower_bound": self.implied_lower_bound,
            "decision": self.decision,
        }


def certificate(inst: LobInstance, dc: ContractedGraph,
                dec: BipathDecomposition) -> LobCertificate:
    """Acceptance decision for a reduced instance from the three counting
    lower bounds. ``dec`` must be the decomposition over the easy seed."""
    sp = special_vertices(dc)
    iso = isolated_vertices(dc, sp)
    _, slaves = classify_masters_slaves(dec, dc)
    return LobCertificate(inst.k, len(sp), len(iso), len(slaves))


def size_report(inst: LobInstance, dc: ContractedGraph,
                dec: BipathDecomposition) -> dict:
    """Diagnostics over the hard-bipath structure: easy/hard counts, the
    per-path outside-neighborhood histogram (equivalently the bipath-minor
    degree distribution), and the 10|O|+6 length check per path."""
    g = dc.graph
    sp = special_vertices(dc)
    iso = isolated_vertices(dc, sp)
    easy = {g.root} | sp | iso
    hard = set(range(g.n)) - easy
    per_path = []
    histogram: dict[int, int] = {}
    a_degree: dict[int, int] = {}
    for p in dec.paths:
        o = outside_neighborhood(dc, p)
        hd_on_path = len([w for w in p.internals if w in hard])
        per_path.append({
            "vertices": list(p.vertices),
            "internal_count": len(p.internals),
            "hard_on_path": hd_on_path,
            "outside_size": len(o),
            "length_bound_ok": hd_on_path <= 10 * len(o) + 6,
        })
        histogram[len(o)] = histogram.get(len(o), 0) + 1
        for u in o:
            a_degree[u] = a_degree.get(u, 0) + 1
    a_hist: dict[int, int] = {}
    for deg in a_degree.values():
        a_hist[deg] = a_hist.get(deg, 0) + 1
    return {
        "n_original": dc.original.n,
        "n_contracted": g.n,
        "easy_count": len(easy),
        "hard_count": len(hard),
        "special_count": len(sp),
        "isolated_count": len(iso),
        "outside_size_histogram": {str(k): v for k, v in sorted(histogram.items())},
        "bipath_minor_b_degrees": sorted(r["outside_size"] for r in per_path),
        "bipath_minor_a_degree_histogram": {
            str(k): v for k, v in sorted(a_hist.items())},
        "all_length_bounds_ok": all(r["length_bound_ok"] for r in per_path),
        "paths": per_path,
    }


@dataclass
class LobAnalysis:
    contracted: ContractedGraph
    special: set[int]
    isolated: set[int]
    decomposition: BipathDecomposition
    masters: list[WeakBipath]
    slaves: list[WeakBipath]
    cert: LobCertificate
    report: dict


def analyze(inst: LobInstance, check: bool = True) -> LobAnalysis:
    """Full analysis pipeline over a reduced instance."""
    dc = build_contracted(inst.graph, check=check)
    sp = special_vertices(dc)
    iso = isolated_vertices(dc, sp)
    dec = decompose_bipaths(dc, {dc.graph.root} | sp | iso)
    masters, slaves = classify_masters_slaves(dec, dc)
    cert = LobCertificate(inst.k, len(sp), len(iso), len(slaves))
    report = size_report(inst, dc, dec)
    report["certificate"] = cert.to_dict()
    return LobAnalysis(dc, sp, iso, dec, masters, slaves, cert, report)
