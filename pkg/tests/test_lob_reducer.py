import re

import pytest

from sparse_outbranch.digraph import (
    RootedDigraph,
    cut_structure,
    is_connected,
    planarity_witness_check,
)
from sparse_outbranch.generators import gen_bipath_chain, gen_planar
from sparse_outbranch.lob_reducer import (
    LobInstance,
    apply,
    apply_rule_1,
    apply_rule_2,
    apply_rule_3,
    apply_rule_4,
    apply_rule_5,
    apply_rule_6,
    find_rule,
    find_rule_3,
    find_rule_4,
    find_rule_5,
    find_rule_6,
    reduce_to_fixpoint,
    replay_trace,
)
from sparse_outbranch.oracle import SolveMode, solve_branch_and_bound
from sparse_outbranch.outcomes import NoOutcome, ReducedOutcome

from conftest import random_connected


def maxleaf(d):
    res = solve_branch_and_bound(d, None, SolveMode.LEAF)
    assert res.exact
    return res.best_value


def bipath_arcs(chain):
    arcs = set()
    for a, b in zip(chain, chain[1:]):
        arcs.add((a, b))
        arcs.add((b, a))
    return arcs


class TestFindRule:
    def test_unreachable_is_rule_1(self):
        inst = LobInstance(RootedDigraph(3, 0, [(0, 1)]), 1)
        app = find_rule(inst)
        assert app.rule_id == 1

    def test_rule_2_in_degree(self):
        inst = LobInstance(RootedDigraph(3, 0, [(0, 1), (1, 2)]), 1)
        app = find_rule(inst)
        assert app.rule_id == 2
        assert app.action.arc == (0, 1)

    def test_fully_reduced_none(self):
        # hubs with disjoint root access joined by one bidirectional bridge
        d = RootedDigraph(6, 0, [(0, 1), (0, 2), (1, 3), (2, 4),
                                 (3, 5), (5, 3), (4, 5), (5, 4)])
        inst = LobInstance(d, 1)
        app = find_rule(inst)
        assert app is None
        # exhaustive guard evaluation agrees
        assert find_rule_3(d) is None
        assert find_rule_4(d) is None
        _, ce = cut_structure(d)
        assert find_rule_5(d, ce) is None
        assert find_rule_6(d, ce) is None


class TestRule1:
    def test_isolated_no(self):
        out = apply_rule_1(LobInstance(RootedDigraph(3, 0, [(0, 1)]), 1))
        assert isinstance(out, NoOutcome)

    def test_unreachable_feeder_no(self):
        out = apply_rule_1(LobInstance(RootedDigraph(3, 0, [(0, 1), (2, 1)]), 5))
        assert isinstance(out, NoOutcome)

    def test_connected_rejected(self):
        with pytest.raises(ValueError):
            apply_rule_1(LobInstance(RootedDigraph(2, 0, [(0, 1)]), 1))


class TestRule2:
    def test_in_degree_contract(self):
        inst = LobInstance(RootedDigraph(3, 0, [(0, 1), (1, 2)]), 1)
        nxt, mapping = apply_rule_2(inst, 1)
        assert nxt.graph.n == 2
        assert mapping == [0, 0, 1]

    def test_out_degree_contract(self):
        d = RootedDigraph(5, 0, [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)])
        nxt, _ = apply_rule_2(LobInstance(d, 1), 3)
        assert nxt.graph.n == 4

    def test_guard_rejected(self):
        d = RootedDigraph(3, 0, [(0, 1), (0, 2), (1, 2)])
        with pytest.raises(ValueError):
            apply_rule_2(LobInstance(d, 1), 2)

    def test_maxleaf_preserved(self, rng):
        checked = 0
        for _ in range(150):
            d = random_connected(rng, rng.randint(2, 8), 0.25)
            inst = LobInstance(d, 1)
            app = find_rule(inst)
            if app is None or app.rule_id != 2:
                continue
            before = maxleaf(d)
            nxt, _ = apply(inst, app)
            assert maxleaf(nxt.graph) == before
            checked += 1
        assert checked >= 20


class TestRule3:
    def test_canonical_match(self):
        arcs = {(0, 1)} | bipath_arcs([1, 2, 3, 4, 5])
        d = RootedDigraph(6, 0, arcs)
        assert find_rule_3(d) == (1, 2, 3, 4, 5)
        nxt, _ = apply_rule_3(LobInstance(d, 1), (1, 2, 3, 4, 5))
        assert nxt.graph.n == 5

    def test_short_bipath_no_match(self):
        arcs = {(0, 1)} | bipath_arcs([1, 2, 3, 4])
        assert find_rule_3(RootedDigraph(5, 0, arcs)) is None

    def test_guard_rejected(self):
        arcs = {(0, 1)} | bipath_arcs([1, 2, 3, 4])
        with pytest.raises(ValueError):
            apply_rule_3(LobInstance(RootedDigraph(5, 0, arcs), 1), (0, 1, 2, 3, 4))

    def test_maxleaf_preserved_on_chain(self):
        g = gen_bipath_chain(12)
        seq = find_rule_3(g)
        assert seq is not None
        before = maxleaf(g)
        nxt, _ = apply_rule_3(LobInstance(g, 1), seq)
        assert maxleaf(nxt.graph) == before


class TestRule4:
    def test_paper_pattern(self):
        # in-neighbors z and y of x, removing z cuts y: drop (y, x)
        d = RootedDigraph(4, 0, [(0, 1), (1, 2), (1, 3), (2, 3)])
        assert find_rule_4(d) == (3, 2)
        nxt = apply_rule_4(LobInstance(d, 1), (3, 2))
        assert not nxt.graph.has_arc(2, 3)

    def test_root_remark(self):
        d = RootedDigraph(3, 0, [(0, 1), (2, 1), (0, 2)])
        assert find_rule_4(d) == (1, 2)

    def test_guard_rejected(self):
        d = RootedDigraph(3, 0, [(0, 1), (0, 2), (1, 2)])
        with pytest.raises(ValueError):
            # y is the root itself: it can never be disconnected
            apply_rule_4(LobInstance(d, 1), (2, 0))

    def test_maxleaf_preserved(self, rng):
        checked = 0
        for _ in range(200):
            d = random_connected(rng, rng.randint(3, 8), 0.3, bidi=0.2)
            xy = find_rule_4(d)
            if xy is None:
                continue
            before = maxleaf(d)
            nxt = apply_rule_4(LobInstance(d, 1), xy)
            assert maxleaf(nxt.graph) == before
            checked += 1
        assert checked >= 40

    def test_guard_matches_literal_definition(self, rng):
        # the single-sweep guard must agree with literally removing
        # N^-(x) - {y} and testing y's reachability, for every pair
        from sparse_outbranch.digraph import reachable
        from sparse_outbranch.lob_reducer import _rule_4_guard
        for _ in range(150):
            d = random_connected(rng, rng.randint(2, 9), 0.35, bidi=0.3)
            for x in range(d.n):
                for y in d.in_adj[x]:
                    blockers = set(d.in_adj[x]) - {y}
                    if d.root in blockers:
                        literal = True
                    elif y == d.root:
                        literal = False
                    else:
                        literal = y not in reachable(d, d.root,
                                                     removed_vertices=blockers)
                    assert _rule_4_guard(d, x, y) == literal, (d.arcs(), x, y)


class TestRule5:
    def build(self):
        return RootedDigraph(7, 0, [(0, 1), (0, 2), (1, 3), (2, 4),
                                    (3, 4), (4, 3), (3, 5), (4, 6)])

    def test_reachable_through_priority(self):
        app = find_rule(LobInstance(self.build(), 1))
        assert app.rule_id == 5
        assert app.action.arc == (3, 4)

    def test_spec_example_maxleaf_two(self):
        d = RootedDigraph(5, 0, [(0, 1), (0, 2), (1, 2), (2, 1), (1, 3), (2, 4)])
        _, ce = cut_structure(d)
        pair = find_rule_5(d, ce)
        assert pair == ((1, 3), (2, 4))
        assert maxleaf(d) == 2
        nxt, _ = apply_rule_5(LobInstance(d, 2), pair)
        assert maxleaf(nxt.graph) == 2

    def test_no_match_without_linked_tails(self):
        d = RootedDigraph(4, 0, [(0, 1), (1, 2), (1, 3)])
        _, ce = cut_structure(d)
        assert find_rule_5(d, ce) is None

    def test_maxleaf_preserved_random(self, rng):
        checked = 0
        for _ in range(400):
            d = random_connected(rng, rng.randint(3, 8), 0.25, bidi=0.5)
            _, ce = cut_structure(d)
            pair = find_rule_5(d, ce)
            if pair is None:
                continue
            before = maxleaf(d)
            nxt, _ = apply_rule_5(LobInstance(d, 1), pair)
            assert maxleaf(nxt.graph) == before
            checked += 1
        assert checked >= 15


class TestRule6:
    def test_delete_reverse(self):
        d = RootedDigraph(3, 0, [(0, 1), (1, 2), (2, 1)])
        _, ce = cut_structure(d)
        assert find_rule_6(d, ce) == (1, 2)
        nxt = apply_rule_6(LobInstance(d, 1), (1, 2))
        assert nxt.graph.arcs() == [(0, 1), (1, 2)]

    def test_no_match(self):
        d = RootedDigraph(3, 0, [(0, 1), (1, 2)])
        _, ce = cut_structure(d)
        assert find_rule_6(d, ce) is None

    def test_maxleaf_preserved_random(self, rng):
        checked = 0
        for _ in range(400):
            d = random_connected(rng, rng.randint(3, 8), 0.3, bidi=0.5)
            _, ce = cut_structure(d)
            uv = find_rule_6(d, ce)
            if uv is None:
                continue
            before = maxleaf(d)
            nxt = apply_rule_6(LobInstance(d, 1), uv)
            assert maxleaf(nxt.graph) == before
            checked += 1
        assert checked >= 30

    def test_rule_4_preempts_rule_6(self, rng):
        # whenever the rule-6 guard matches, some earlier rule (in practice
        # rule 4 at the same arc) already applies under strict priority
        for _ in range(300):
            d = random_connected(rng, rng.randint(3, 7), 0.3, bidi=0.5)
            _, ce = cut_structure(d)
            if find_rule_6(d, ce) is None:
                continue
            app = find_rule(LobInstance(d, 1))
            assert app is not None and app.rule_id < 6


class TestDriver:
    def test_path_reduces_and_replays(self):
        d = RootedDigraph(4, 0, [(0, 1), (1, 2), (2, 3)])
        inst = LobInstance(d, 1)
        out, trace = reduce_to_fixpoint(inst)
        assert isinstance(out, ReducedOutcome)
        assert out.instance.graph.n <= 2
        assert out.instance.k == 1
        replayed = replay_trace(inst, trace)
        assert replayed.graph == out.instance.graph

    def test_unreachable_no(self):
        out, trace = reduce_to_fixpoint(LobInstance(RootedDigraph(3, 0, [(0, 1)]), 1))
        assert isinstance(out, NoOutcome)
        assert len(trace) == 1

    def test_already_reduced_empty_trace(self):
        d = RootedDigraph(6, 0, [(0, 1), (0, 2), (1, 3), (2, 4),
                                 (3, 5), (5, 3), (4, 5), (5, 4)])
        out, trace = reduce_to_fixpoint(LobInstance(d, 1))
        assert isinstance(out, ReducedOutcome)
        assert len(trace) == 0
        assert out.instance.graph == d

    def test_trace_line_format(self):
        d = RootedDigraph(4, 0, [(0, 1), (1, 2), (2, 3)])
        _, trace = reduce_to_fixpoint(LobInstance(d, 1))
        pattern = re.compile(
            r"^RULE [1-6] LOCUS( \d+)+ ACTION (contract|delete) \d+ \d+$|"
            r"^RULE 1 LOCUS \d+ ACTION no$")
        for line in trace.serialize().splitlines():
            assert pattern.match(line), line

    def test_each_step_shrinks(self, rng):
        for _ in range(60):
            d = random_connected(rng, rng.randint(2, 9), 0.3, bidi=0.4)
            inst = LobInstance(d, 2)
            size = d.n + d.m
            while True:
                app = find_rule(inst)
                if app is None or app.rule_id == 1:
                    break
                inst, _ = apply(inst, app)
                new_size = inst.graph.n + inst.graph.m
                assert new_size < size
                assert inst.graph.in_degree(inst.graph.root) == 0
                assert inst.k == 2
                size = new_size

    def test_forged_trace_rejected(self):
        from sparse_outbranch.lob_reducer import (Contract, RuleApplication,
                                                  TraceStep)
        from sparse_outbranch.outcomes import ReductionTrace
        d = RootedDigraph(4, 0, [(0, 1), (0, 2), (1, 3), (2, 3)])
        forged = ReductionTrace([TraceStep(
            RuleApplication(2, (1,), Contract((0, 1))), None)])
        with pytest.raises(ValueError):
            replay_trace(LobInstance(d, 1), forged)  # vertex 1 is no cut-vertex

    def test_replay_random(self, rng):
        for _ in range(40):
            d = random_connected(rng, rng.randint(2, 9), 0.3, bidi=0.4)
            inst = LobInstance(d, 3)
            out, trace = reduce_to_fixpoint(inst)
            replayed = replay_trace(inst, trace)
            if isinstance(out, ReducedOutcome):
                assert replayed.graph == out.instance.graph
            else:
                assert isinstance(replayed, NoOutcome)

    def test_minor_closure_witness_on_planar(self, rng):
        for seed in range(8):
            g = gen_planar(40, seed=seed, both_prob=0.4, keep_prob=0.5)
            inst = LobInstance(g, 3)
            while True:
                app = find_rule(inst)
                if app is None or app.rule_id == 1:
                    break
                inst, _ = apply(inst, app)
                assert planarity_witness_check(inst.graph)

    def test_bipath_chain_uses_rule_3(self):
        out, trace = reduce_to_fixpoint(LobInstance(gen_bipath_chain(20), 2))
        rules = [s.application.rule_id for s in trace]
        assert 3 in rules


class TestPipelineEquivalence:
    def test_reduction_preserves_maxleaf_end_to_end(self, rng):
        # composition of all rule firings keeps the exact optimum, hence
        # the decision for every k simultaneously
        for _ in range(120):
            d = random_connected(rng, rng.randint(2, 9), 0.3, bidi=0.4)
            before = maxleaf(d)
            out, _ = reduce_to_fixpoint(LobInstance(d, 1))
            assert isinstance(out, ReducedOutcome)
            assert maxleaf(out.instance.graph) == before

    def test_no_outcome_matches_reality(self, rng):
        for _ in range(40):
            n = rng.randint(2, 8)
            arcs = {(rng.randrange(n), rng.randrange(n)) for _ in range(2 * n)}
            arcs = {(u, v) for u, v in arcs if u != v and v != 0}
            d = RootedDigraph(n, 0, arcs)
            out, _ = reduce_to_fixpoint(LobInstance(d, 1))
            if isinstance(out, NoOutcome):
                assert not is_connected(d)
            else:
                assert is_connected(d)


class TestPostFixpointLemmas:
    def reduced_corpus(self, rng, count=40):
        corpus = []
        while len(corpus) < count:
            d = random_connected(rng, rng.randint(3, 10), 0.3, bidi=0.4)
            out, _ = reduce_to_fixpoint(LobInstance(d, 2))
            if isinstance(out, ReducedOutcome):
                corpus.append(out.instance.graph)
        return corpus

    def test_private_neighbors_have_indegree_one(self, rng):
        from sparse_outbranch.digraph import cut_vertices, private_neighbors
        for g in self.reduced_corpus(rng):
            for u in cut_vertices(g) | {g.root}:
                for v in private_neighbors(g, u):
                    assert g.in_degree(v) == 1

    def test_cut_edge_tails_not_heads(self, rng):
        for g in self.reduced_corpus(rng):
            _, ce = cut_structure(g)
            heads = {v for _, v in ce}
            tails = {u for u, _ in ce}
            assert not heads & tails

    def test_root_lemma(self, rng):
        for g in self.reduced_corpus(rng):
            if g.n < 3:
                continue
            _, ce = cut_structure(g)
            root_arcs = {(g.root, w) for w in g.out_adj[g.root]}
            assert len(root_arcs) >= 2
            assert root_arcs <= ce
