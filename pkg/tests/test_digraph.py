import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparse_outbranch.digraph import (
    RootedDigraph,
    bfs_out_branching,
    contract_arc,
    cut_edges,
    cut_structure,
    cut_vertices,
    is_connected,
    planarity_witness_check,
    private_neighbors,
    reachable,
    remove_vertices,
    shortcut_vertex,
    split_lonely_branching,
)
from sparse_outbranch.oracle import solve_branch_and_bound, SolveMode

from conftest import random_connected, small_digraphs


def path3():
    return RootedDigraph(3, 0, [(0, 1), (1, 2)])


class TestReachable:
    def test_full_path(self):
        assert reachable(path3(), 0) == {0, 1, 2}

    def test_removed_vertex_cuts(self):
        assert reachable(path3(), 0, removed_vertices={1}) == {0}

    def test_removed_arc_detour(self):
        d = RootedDigraph(3, 0, [(0, 1), (0, 2), (1, 2)])
        assert reachable(d, 0, removed_arcs={(0, 2)}) == {0, 1, 2}

    def test_invalid_vertex(self):
        with pytest.raises(ValueError):
            reachable(path3(), 7)

    @settings(max_examples=60, deadline=None)
    @given(small_digraphs(), st.sets(st.integers(1, 5)), st.sets(st.integers(1, 5)))
    def test_monotone_in_removals(self, d, more_v, more_a):
        base = reachable(d, 0)
        rm_v = {v for v in more_v if v < d.n}
        rm_a = {(u, v) for u in more_a for v in more_a if u != v and u < d.n and v < d.n}
        shrunk = reachable(d, 0, removed_vertices=rm_v, removed_arcs=rm_a)
        assert shrunk <= base


class TestConnectivity:
    def test_path_connected(self):
        assert is_connected(path3())

    def test_isolated_vertex(self):
        assert not is_connected(RootedDigraph(3, 0, [(0, 1)]))

    def test_single_vertex(self):
        assert is_connected(RootedDigraph(1, 0, []))


class TestCutStructure:
    def test_path_cut_vertex(self):
        assert cut_vertices(path3()) == {1}

    def test_two_routes(self):
        d = RootedDigraph(3, 0, [(0, 1), (0, 2), (1, 2)])
        assert cut_vertices(d) == set()
        assert cut_edges(d) == {(0, 1)}

    def test_star_no_cuts(self):
        d = RootedDigraph(4, 0, [(0, 1), (0, 2), (0, 3)])
        assert cut_vertices(d) == set()

    def test_path_cut_edges_lonely(self):
        ce = cut_edges(path3())
        assert ce == {(0, 1), (1, 2)}
        lonely, branching = split_lonely_branching(ce)
        assert lonely == ce and not branching

    def test_branching_split(self):
        d = RootedDigraph(4, 0, [(0, 1), (1, 2), (1, 3)])
        lonely, branching = split_lonely_branching(cut_edges(d))
        assert lonely == {(0, 1)}
        assert branching == {(1, 2), (1, 3)}

    def test_disconnected_rejected(self):
        with pytest.raises(ValueError):
            cut_vertices(RootedDigraph(3, 0, [(0, 1)]))

    @settings(max_examples=80, deadline=None)
    @given(small_digraphs())
    def test_cut_edge_definitional_roundtrip(self, d):
        ce = cut_edges(d)
        for arc in d.arcs():
            unreached = len(reachable(d, 0, removed_arcs={arc})) != d.n
            assert (arc in ce) == unreached

    @settings(max_examples=80, deadline=None)
    @given(small_digraphs())
    def test_cut_vertex_definitional_roundtrip(self, d):
        cv = cut_vertices(d)
        for v in range(1, d.n):
            rest = reachable(d, 0, removed_vertices={v})
            assert (v in cv) == (len(rest) != d.n - 1)

    def test_head_indegree_one_witness(self, rng):
        # every path from the root to the head of an in-degree-1 cut-edge
        # uses that arc: deleting it must kill reachability of the head
        for _ in range(80):
            d = random_connected(rng, rng.randint(2, 8), 0.25)
            for u, v in cut_edges(d):
                if d.in_degree(v) == 1:
                    assert v not in reachable(d, 0, removed_arcs={(u, v)})

    def test_cut_structure_matches_naive_on_larger_graphs(self, rng):
        # the one-sweep computation against per-vertex and per-arc removal
        for _ in range(25):
            d = random_connected(rng, rng.randint(2, 40), 0.1, bidi=0.2)
            cv, ce = cut_structure(d)
            naive_cv = {v for v in range(1, d.n)
                        if len(reachable(d, 0, removed_vertices={v})) != d.n - 1}
            naive_ce = {a for a in d.arcs()
                        if len(reachable(d, 0, removed_arcs={a})) != d.n}
            assert cv == naive_cv
            assert ce == naive_ce


class TestPrivateNeighbors:
    def test_path_middle(self):
        assert private_neighbors(path3(), 1) == {2}

    def test_root_case(self):
        d = RootedDigraph(3, 0, [(0, 1), (0, 2)])
        assert private_neighbors(d, 0) == {1, 2}

    def test_non_cut_vertex_empty(self):
        d = RootedDigraph(4, 0, [(0, 1), (0, 2), (1, 3), (2, 3)])
        assert private_neighbors(d, 1) == set()


class TestContractArc:
    def test_path_contract(self):
        g, mapping = contract_arc(path3(), (0, 1))
        assert g.n == 2 and g.root == 0
        assert g.arcs() == [(0, 1)]
        assert mapping == [0, 0, 1]

    def test_parallel_arcs_merged(self):
        d = RootedDigraph(3, 0, [(0, 1), (1, 2), (0, 2)])
        g, _ = contract_arc(d, (1, 2))
        assert g.arcs() == [(0, 1)]

    def test_loop_discarded(self):
        d = RootedDigraph(3, 0, [(0, 1), (1, 2), (2, 1)])
        g, _ = contract_arc(d, (1, 2))
        assert g.arcs() == [(0, 1)]

    def test_absent_arc_rejected(self):
        with pytest.raises(ValueError):
            contract_arc(path3(), (0, 2))

    def test_maxleaf_never_increases_on_cut_edges(self, rng):
        for _ in range(60):
            d = random_connected(rng, rng.randint(2, 8), 0.25, bidi=0.3)
            before = solve_branch_and_bound(d, None, SolveMode.LEAF).best_value
            for u, v in cut_edges(d):
                if u == d.root and d.in_degree(v) > 1:
                    continue  # merging would hand the root an in-arc
                g, _ = contract_arc(d, (u, v))
                after = solve_branch_and_bound(g, None, SolveMode.LEAF).best_value
                assert before >= after


class TestShortcutVertex:
    def test_path_shortcut(self):
        g, _ = shortcut_vertex(path3(), 1)
        assert g.arcs() == [(0, 1)]

    def test_fanout(self):
        d = RootedDigraph(4, 0, [(0, 1), (1, 2), (1, 3)])
        g, _ = shortcut_vertex(d, 1)
        assert g.arcs() == [(0, 1), (0, 2)]

    def test_loop_dropped(self):
        d = RootedDigraph(3, 0, [(0, 1), (2, 1), (1, 2)])
        g, _ = shortcut_vertex(d, 1)
        assert g.arcs() == [(0, 1)]

    def test_root_rejected(self):
        with pytest.raises(ValueError):
            shortcut_vertex(path3(), 0)

    def test_maxleaf_invariant_on_cut_vertices(self, rng):
        # shortcutting a cut-vertex preserves the optimum exactly
        for _ in range(60):
            d = random_connected(rng, rng.randint(3, 8), 0.25)
            before = solve_branch_and_bound(d, None, SolveMode.LEAF).best_value
            for v in cut_vertices(d):
                g, _ = shortcut_vertex(d, v)
                if not is_connected(g):
                    continue
                after = solve_branch_and_bound(g, None, SolveMode.LEAF).best_value
                assert before == after, (d.arcs(), v)


class TestPlanarityWitness:
    def test_k5_rejected(self):
        k5 = RootedDigraph(5, 0, [(u, v) for u in range(5) for v in range(5)
                                  if u != v and v != 0])
        assert not planarity_witness_check(k5)

    def test_tree_accepted(self):
        assert planarity_witness_check(path3())

    def test_grid_accepted(self):
        arcs = set()
        for r in range(3):
            for c in range(3):
                v = 3 * r + c
                if c < 2:
                    arcs.add((v, v + 1))
                    if v + 1 != 0:
                        arcs.add((v + 1, v))
                if r < 2:
                    arcs.add((v, v + 3))
                    arcs.add((v + 3, v))
        arcs = {(u, v) for u, v in arcs if v != 0}
        assert planarity_witness_check(RootedDigraph(9, 0, arcs))


class TestRemoveVertices:
    def test_induced_subgraph(self):
        d = RootedDigraph(4, 0, [(0, 1), (1, 2), (1, 3), (3, 2)])
        g, mapping = remove_vertices(d, {2})
        assert g.n == 3
        assert mapping == [0, 1, None, 2]
        assert g.arcs() == [(0, 1), (1, 2)]

    def test_root_protected(self):
        with pytest.raises(ValueError):
            remove_vertices(path3(), {0})


class TestBfsBranching:
    def test_spans(self):
        d = RootedDigraph(4, 0, [(0, 1), (0, 2), (1, 3), (2, 3)])
        t = bfs_out_branching(d)
        assert t.is_valid_for(d)
        assert set(t.parent) == {1, 2, 3}

    def test_disconnected_rejected(self):
        with pytest.raises(ValueError):
            bfs_out_branching(RootedDigraph(3, 0, [(0, 1)]))
