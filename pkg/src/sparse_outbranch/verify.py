"""Randomized verification suites.

Each suite drives one family of correctness claims against the
brute-force oracles and reports a pass/fail result with counters. The
suites back both the ``verify`` CLI command and the acceptance test
module; the acceptance criteria call them at their contractual trial
counts, the CLI lets you dial the effort up or down.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

import numpy as np

from .digraph import (
    OutBranching,
    RootedDigraph,
    cut_structure,
    is_connected,
    underlying_adjacency,
)
from .generators import gen_iob_twins, gen_planar, gen_random
from .iob_kernel import (
    IobInstance,
    apply_crown_rule,
    build_aux_graph,
    crown_in_class,
    kernelize_iob,
    small_degree_classes,
    vc_or_solution,
)
from .lob_analyzer import analyze, decompose_bipaths, special_vertices
from .lob_reducer import (
    LobInstance,
    apply,
    apply_rule_5,
    apply_rule_6,
    find_rule,
    find_rule_5,
    find_rule_6,
    reduce_to_fixpoint,
)
from .oracle import (
    SolveMode,
    brute_force_out_branchings,
    enumerate_out_branchings,
    solve_branch_and_bound,
)
from .outcomes import ReducedOutcome
from .sparsity import (
    class_count_bound_ok,
    classify_by_modulator,
    degeneracy,
    heavy_count_bound_ok,
    heavy_degree_sum_check,
)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        inner = ", ".join(f"{k}={v}" for k, v in self.detail.items())
        return f"[{status}] {self.name}: {inner}"


def _exact_maxleaf(d: RootedDigraph) -> int:
    res = solve_branch_and_bound(d, None, SolveMode.LEAF)
    if not res.exact:
        raise RuntimeError("oracle failed to prove optimality on a small instance")
    return res.best_value


def _small_mixed_digraph(rng: random.Random, max_n: int) -> RootedDigraph:
    """Random small connected digraph; alternates plain, bidirected-heavy,
    and chain-with-chords shapes so every reduction rule sees traffic."""
    style = rng.randrange(3)
    n = rng.randint(2, max_n)
    if style == 0:
        return gen_random(n, rng.randint(n, 3 * n), rng.randrange(1 << 30))
    if style == 1:
        return gen_random(n, rng.randint(n, 3 * n), rng.randrange(1 << 30),
                          bidi_prob=rng.uniform(0.3, 0.9))
    arcs = {(0, 1)}
    for v in range(2, n):
        arcs.add((v - 1, v))
        arcs.add((v, v - 1))
    for _ in range(rng.randint(0, 3)):
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v and v != 0:
            arcs.add((u, v))
    return RootedDigraph(n, 0, arcs)


def verify_rules(trials: int = 1000, max_n: int = 9, seed: int = 0) -> SuiteResult:
    """Every rule firing preserves the exact oracle maxleaf. The driver's
    strict priority is exercised as-is; rules 5 and 6 additionally get
    direct-guard firings since rule 4 usually preempts them."""
    rng = random.Random(seed)
    fired = {i: 0 for i in range(1, 7)}
    violations = []
    t0 = time.monotonic()
    for trial in range(trials):
        d = _small_mixed_digraph(rng, max_n)
        inst = LobInstance(d, 1)
        while True:
            app = find_rule(inst)
            if app is None:
                break
            fired[app.rule_id] += 1
            if app.rule_id == 1:
                break
            before = _exact_maxleaf(inst.graph)
            nxt, _ = apply(inst, app)
            after = _exact_maxleaf(nxt.graph)
            if before != after:
                violations.append((trial, app.rule_id, before, after))
            inst = nxt
        # direct-guard firings for the low-priority rules
        if is_connected(d):
            _, ce = cut_structure(d)
            pair = find_rule_5(d, ce)
            if pair is not None:
                before = _exact_maxleaf(d)
                nxt, _ = apply_rule_5(LobInstance(d, 1), pair)
                if _exact_maxleaf(nxt.graph) != before:
                    violations.append((trial, 5, before, "direct"))
                fired[5] += 1
            uv = find_rule_6(d, ce)
            if uv is not None:
                before = _exact_maxleaf(d)
                nxt6 = apply_rule_6(LobInstance(d, 1), uv)
                if _exact_maxleaf(nxt6.graph) != before:
                    violations.append((trial, 6, before, "direct"))
                fired[6] += 1
    detail = {"trials": trials, "violations": len(violations),
              "seconds": round(time.monotonic() - t0, 1)}
    detail.update({f"rule{i}": fired[i] for i in range(1, 7)})
    if violations:
        detail["first_violation"] = violations[0]
    return SuiteResult("rules", not violations, detail)


def verify_oracle(trials: int = 300, seed: int = 0) -> SuiteResult:
    """Enumeration agrees with the parent-vector brute force (n <= 7) and
    branch and bound agrees with the enumeration optimum (n <= 9)."""
    rng = random.Random(seed)
    violations = 0
    checked_enum = checked_bb = 0
    for trial in range(trials):
        d = _small_mixed_digraph(rng, 7)
        trees = {tuple(sorted(t.parent.items())) for t in enumerate_out_branchings(d)}
        brute = {tuple(sorted(t.parent.items())) for t in brute_force_out_branchings(d)}
        if trees != brute:
            violations += 1
        checked_enum += 1
        for t in enumerate_out_branchings(d):
            if t.leaf_count() != 1 + sum(max(len(t.children[v]) - 1, 0)
                                         for v in range(d.n)):
                violations += 1
    for trial in range(trials):
        d = _small_mixed_digraph(rng, 9)
        vals_leaf = [t.leaf_count() for t in enumerate_out_branchings(d)]
        vals_int = [t.internal_count() for t in enumerate_out_branchings(d)]
        for mode, vals in ((SolveMode.LEAF, vals_leaf), (SolveMode.INTERNAL, vals_int)):
            res = solve_branch_and_bound(d, None, mode)
            if not res.exact or res.best_value != max(vals):
                violations += 1
            if res.witness is None or not res.witness.is_valid_for(d):
                violations += 1
        checked_bb += 1
    return SuiteResult("oracle", violations == 0,
                       {"enum_checked": checked_enum, "bb_checked": checked_bb,
                        "violations": violations})


def _reduced_planar_corpus(count: int, max_core: int, seed: int,
                           max_input: int = 26) -> list[LobInstance]:
    """Reduced instances from small sparse planar inputs whose cores stay
    within the oracle's reach."""
    rng = random.Random(seed)
    corpus: list[LobInstance] = []
    attempts = 0
    while len(corpus) < count and attempts < 60 * count:
        attempts += 1
        n = rng.randint(6, max_input)
        g = gen_planar(n, rng.randrange(1 << 30),
                       both_prob=rng.uniform(0.0, 0.5),
                       keep_prob=rng.uniform(0.15, 0.5))
        out, _ = reduce_to_fixpoint(LobInstance(g, rng.randint(1, 4)))
        if isinstance(out, ReducedOutcome) and out.instance.graph.n <= max_core:
            corpus.append(out.instance)
    if len(corpus) < count:
        raise RuntimeError(f"could not build corpus: {len(corpus)}/{count}")
    return corpus


def _parallel_bipath_instance(npaths: int, seg: int = 1) -> LobInstance:
    """Two special hubs with disjoint root access joined by ``npaths``
    parallel bidirectional paths of ``seg`` internal vertices each."""
    arcs = {(0, 1), (0, 2), (1, 3), (2, 4)}
    nxt = 5
    for _ in range(npaths):
        chain = [3] + list(range(nxt, nxt + seg)) + [4]
        nxt += seg
        for a, b in zip(chain, chain[1:]):
            arcs.add((a, b))
            arcs.add((b, a))
    return LobInstance(RootedDigraph(nxt, 0, arcs), 1)


def _isolated_bag_instance(chain_len: int = 5) -> LobInstance:
    """A bidirectional chain between two special hubs where every second
    internal vertex carries a pendant: the pendant cut-edges are lonely,
    their bags are non-special, and the mid-chain ones see no special
    neighbor, so they are isolated in the contracted graph."""
    arcs = {(0, 1), (0, 2), (1, 3), (2, 4)}
    chain = [3] + list(range(5, 5 + chain_len)) + [4]
    nxt = 5 + chain_len
    for a, b in zip(chain, chain[1:]):
        arcs.add((a, b))
        arcs.add((b, a))
    for i in range(2, len(chain) - 1, 2):
        arcs.add((chain[i], nxt))
        nxt += 1
    return LobInstance(RootedDigraph(nxt, 0, arcs), 1)


def verify_bounds(instances: int = 300, max_core: int = 12, seed: int = 0) -> SuiteResult:
    """The three certificate lower bounds hold against oracle maxleaf on
    reduced planar cores, plus constructed multi-bipath instances where
    the slave count is positive."""
    corpus = _reduced_planar_corpus(instances, max_core, seed)
    for npaths in (3, 4, 5, 6):
        corpus.append(_parallel_bipath_instance(npaths))
        if 5 + 2 * npaths <= max_core + 2:
            corpus.append(_parallel_bipath_instance(npaths, seg=2))
    corpus.append(_isolated_bag_instance(3))
    corpus.append(_isolated_bag_instance(5))
    violations = 0
    sp_total = iso_total = sl_total = 0
    for inst in corpus:
        ana = analyze(inst)
        ml = _exact_maxleaf(inst.graph)
        c = ana.cert
        sp_total += c.special_count
        iso_total += c.isolated_count
        sl_total += c.slave_count
        if ml < -(-c.special_count // 60):
            violations += 1
        if ml < -(-c.isolated_count // 180):
            violations += 1
        if ml < c.slave_count:
            violations += 1
        # contraction monotonicity and the cut-vertex bound on the core
        ml_dc = _exact_maxleaf(ana.contracted.graph)
        if ml < ml_dc:
            violations += 1
        cv_dc, ce_dc = cut_structure(ana.contracted.graph)
        by_tail: dict[int, int] = {}
        for u, v in ce_dc:
            by_tail[u] = by_tail.get(u, 0) + 1
        if all(cnt >= 2 for cnt in by_tail.values()):
            if ml_dc < len(cv_dc) + 1:
                violations += 1
        # certificate soundness for the instance's k
        if c.accepted and ml < inst.k:
            violations += 1
    return SuiteResult("bounds", violations == 0,
                       {"instances": len(corpus), "violations": violations,
                        "special_seen": sp_total, "isolated_seen": iso_total,
                        "slaves_seen": sl_total})


def verify_structure(instances: int = 300, max_core: int = 12, seed: int = 0) -> SuiteResult:
    """Structural lemmas on reduced cores: bags of size <= 2, cut-edge
    heads of in-degree 1, linked bags with exactly one arc each way
    landing on tails, decomposition properties over random seeds, and the
    10|O|+6 hard-bipath length bound."""
    corpus = _reduced_planar_corpus(instances, max_core, seed)
    for npaths in (3, 5):
        corpus.append(_parallel_bipath_instance(npaths))
    corpus.append(_isolated_bag_instance(5))
    rng = random.Random(seed + 1)
    violations = 0
    paths_seen = 0
    for inst in corpus:
        d = inst.graph
        ana = analyze(inst)
        dc = ana.contracted
        g = dc.graph
        _, ce = cut_structure(d)
        for u, v in ce:
            if d.in_degree(v) != 1:
                violations += 1
        for v in range(g.n):
            if len(dc.bag_of[v].members) > 2:
                violations += 1
        for a in range(g.n):
            for b in g.out_adj[a]:
                A, B = dc.bag_of[a], dc.bag_of[b]
                ab = [(x, y) for x in A.members for y in B.members if d.has_arc(x, y)]
                if any(y != B.tail for _, y in ab):
                    violations += 1
                if g.has_arc(b, a) and len(ab) != 1:
                    violations += 1
        # decomposition over the easy seed (built inside analyze) and over
        # a random larger seed
        paths_seen += len(ana.decomposition.paths)
        sp = special_vertices(dc)
        base = {g.root} | sp
        extra = [v for v in range(g.n) if v not in base]
        rng.shuffle(extra)
        s = base | set(extra[:rng.randint(0, len(extra))])
        try:
            dec = decompose_bipaths(dc, s)
        except Exception:
            violations += 1
            continue
        for p in dec.paths:
            if p.extremities[0] == p.extremities[1]:
                violations += 1
            if any(w in s for w in p.internals):
                violations += 1
        if not ana.report["all_length_bounds_ok"]:
            violations += 1
    return SuiteResult("structure", violations == 0,
                       {"instances": len(corpus), "violations": violations,
                        "paths_seen": paths_seen})


def _iob_random_instance(rng: random.Random, max_n: int) -> IobInstance:
    style = rng.randrange(3)
    if style == 0:
        n = rng.randint(2, max_n)
        g = gen_random(n, rng.randint(n, 3 * n), rng.randrange(1 << 30),
                       bidi_prob=rng.uniform(0, 0.4))
    else:
        core = rng.randint(1, 3)
        g = gen_iob_twins(rng.randint(2, 5), rng.randint(1, 3),
                          rng.randrange(1 << 30), twin_factor=core)
        if g.n > max_n:
            g = gen_random(rng.randint(2, max_n), 2 * max_n, rng.randrange(1 << 30))
    k = rng.randint(0, max(1, g.n - 1))
    return IobInstance(g, k)


def verify_local_search(trials: int = 1000, max_n: int = 9, seed: int = 0) -> SuiteResult:
    """The search returns either a branching with >= k internal vertices
    (witness-checked) or a verified vertex cover of size <= 2k-1 that
    contains the root."""
    rng = random.Random(seed)
    violations = 0
    yes_count = vc_count = 0
    for _ in range(trials):
        inst = _iob_random_instance(rng, max_n)
        res = vc_or_solution(inst)
        if isinstance(res, OutBranching):
            yes_count += 1
            if not res.is_valid_for(inst.graph) or res.internal_count() < inst.k:
                violations += 1
        else:
            vc_count += 1
            if inst.graph.root not in res:
                violations += 1
            if len(res) > max(2 * inst.k - 1, 1):
                violations += 1
            if any(u not in res and v not in res for u, v in inst.graph.arcs()):
                violations += 1
    return SuiteResult("local-search", violations == 0,
                       {"trials": trials, "yes": yes_count, "vc": vc_count,
                        "violations": violations})


def verify_crown(firings: int = 500, max_n: int = 9, seed: int = 0) -> SuiteResult:
    """Fixed-k equivalence of every crown removal, oracle-checked, plus
    structural validity of each crown (done inside the constructor)."""
    rng = random.Random(seed)
    fired = 0
    violations = 0
    trials = 0
    while fired < firings and trials < 400 * firings:
        trials += 1
        core = rng.randint(2, 4)
        g = gen_iob_twins(rng.randint(2, 4), rng.randint(1, 3),
                          rng.randrange(1 << 30), twin_factor=2)
        if g.n > max_n:
            continue
        k = rng.randint(1, 5)
        current = IobInstance(g, k)
        for _ in range(g.n):
            found = vc_or_solution(current)
            if isinstance(found, OutBranching):
                break
            b = build_aux_graph(current.graph, found)
            classes, _ = small_degree_classes(current.graph, found, 4)
            done = True
            for key in sorted(classes):
                members = set(classes[key])
                hood = set()
                for w in members:
                    hood.update(b.w_adj[w])
                if len(members) > 2 * len(hood):
                    crown = crown_in_class(b, members)
                    nxt, _ = apply_crown_rule(current, crown, b)
                    before = solve_branch_and_bound(
                        current.graph, None, SolveMode.INTERNAL)
                    after = solve_branch_and_bound(
                        nxt.graph, None, SolveMode.INTERNAL)
                    if not (before.exact and after.exact):
                        raise RuntimeError("oracle budget exceeded in crown check")
                    if (before.best_value >= k) != (after.best_value >= k):
                        violations += 1
                    fired += 1
                    current = nxt
                    done = False
                    break
            if done:
                break
    return SuiteResult("crown", violations == 0 and fired >= firings,
                       {"firings": fired, "violations": violations})


def verify_iob_kernel_size(ks=(4, 6, 8, 10, 12, 14, 16), degeneracies=(2, 3),
                           reps: int = 3, seed: int = 0,
                           min_r2: float = 0.6) -> SuiteResult:
    """Kernelize the twin-heavy degenerate family and check the size
    accounting: cover <= 2k-1, every retained class within its structural
    bound (asserted inside the kernelizer), and a per-degeneracy linear
    fit of final size against k."""
    rng = random.Random(seed)
    violations = 0
    detail: dict = {}
    runs = 0
    for d in degeneracies:
        xs, ys = [], []
        for k in ks:
            for rep in range(reps):
                g = gen_iob_twins(k, d, rng.randrange(1 << 30))
                out, _ = kernelize_iob(IobInstance(g, k))
                runs += 1
                if not isinstance(out, ReducedOutcome):
                    violations += 1
                    continue
                red = out.instance
                cover = vc_or_solution(red)
                if isinstance(cover, set) and len(cover) > max(2 * k - 1, 1):
                    violations += 1
                xs.append(float(k))
                ys.append(float(red.graph.n))
        xa, ya = np.array(xs), np.array(ys)
        slope, intercept = np.polyfit(xa, ya, 1)
        pred = slope * xa + intercept
        ss_tot = float(((ya - ya.mean()) ** 2).sum())
        r2 = 1.0 - float(((ya - pred) ** 2).sum()) / ss_tot if ss_tot else 1.0
        detail[f"slope_d{d}"] = round(float(slope), 2)
        detail[f"r2_d{d}"] = round(r2, 3)
        if r2 < min_r2:
            violations += 1
    detail.update({"runs": runs, "violations": violations})
    return SuiteResult("iob-kernel-size", violations == 0, detail)


def verify_lob_kernel_size(ks=tuple(range(2, 11)), reps: int = 3, seed: int = 0,
                           scale: int = 10, timeout: float = 30.0) -> SuiteResult:
    """Empirical stand-in for the linear-kernel theorem: reduced size
    against oracle maxleaf fits a line through the origin with high R^2
    over sparse planar inputs sized by k."""
    rng = random.Random(seed)
    keeps = (0.2, 0.25, 0.3)
    points = []
    inexact = 0
    violations = 0
    for k in ks:
        for rep in range(reps):
            n = max(8, scale * k)
            g = gen_planar(n, rng.randrange(1 << 30), both_prob=0.1,
                           keep_prob=keeps[rep % len(keeps)])
            out, _ = reduce_to_fixpoint(LobInstance(g, k))
            if not isinstance(out, ReducedOutcome):
                violations += 1
                continue
            red = out.instance.graph
            res = solve_branch_and_bound(red, None, SolveMode.LEAF, timeout=timeout)
            if not res.exact:
                inexact += 1
                continue
            points.append((res.best_value, red.n))
    if len(points) < max(6, len(ks)):
        return SuiteResult("lob-kernel-size", False,
                           {"points": len(points), "inexact": inexact,
                            "reason": "too few exact points"})
    xs = np.array([p[0] for p in points], dtype=float)
    ys = np.array([p[1] for p in points], dtype=float)
    c = float((xs * ys).sum() / (xs * xs).sum())
    ss_res = float(((ys - c * xs) ** 2).sum())
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot else 1.0
    ratio_max = max(y / max(1.0, x) for x, y in points)
    passed = violations == 0 and r2 >= 0.9
    return SuiteResult("lob-kernel-size", passed,
                       {"points": len(points), "inexact": inexact,
                        "fitted_constant": round(c, 3), "r2": round(r2, 3),
                        "max_ratio": round(ratio_max, 3)})


def verify_counting(graphs: int = 30, seed: int = 0, p: int = 3) -> SuiteResult:
    """Counting lemmas on planar corpora: the heavy-degree sum bound on
    bipartite views (with exact degeneracy) and both neighborhood-
    diversity bounds at p = 3."""
    rng = random.Random(seed)
    violations = 0
    checks = 0
    for _ in range(graphs):
        n = rng.randint(30, 150)
        g = gen_planar(n, rng.randrange(1 << 30),
                       both_prob=rng.uniform(0, 0.5),
                       keep_prob=rng.uniform(0.3, 1.0))
        adj = underlying_adjacency(g)
        for _ in range(3):
            size = rng.randint(max(1, n // 10), max(2, n // 3))
            x = set(rng.sample(range(n), size))
            classing = classify_by_modulator(adj, x, threshold=2 * p)
            if not heavy_count_bound_ok(classing):
                violations += 1
            if not class_count_bound_ok(classing, p):
                violations += 1
            # bipartite view between x and the rest
            bip = [set() for _ in range(n)]
            for u in range(n):
                for v in adj[u]:
                    if (u in x) != (v in x):
                        bip[u].add(v)
            d_view = degeneracy(bip).d
            y_degs = [len(bip[v]) for v in range(n) if v not in x]
            if not heavy_degree_sum_check(len(x), y_degs, d_view):
                violations += 1
            checks += 3
    return SuiteResult("counting", violations == 0,
                       {"graphs": graphs, "checks": checks,
                        "violations": violations})


SUITES = {
    "rules": verify_rules,
    "oracle": verify_oracle,
    "bounds": verify_bounds,
    "structure": verify_structure,
    "local-search": verify_local_search,
    "crown": verify_crown,
    "iob-kernel-size": verify_iob_kernel_size,
    "lob-kernel-size": verify_lob_kernel_size,
    "counting": verify_counting,
}


def run_suites(names, trials=None, max_n=None, seed=0) -> list[SuiteResult]:
    """Run the named suites (or all) with optional effort overrides."""
    results = []
    for name in names:
        fn = SUITES[name]
        kwargs = {"seed": seed}
        if trials is not None and name in ("rules", "local-search"):
            kwargs["trials"] = trials
        if trials is not None and name == "oracle":
            kwargs["trials"] = max(10, trials // 3)
        if trials is not None and name in ("bounds", "structure"):
            kwargs["instances"] = trials
        if trials is not None and name == "crown":
            kwargs["firings"] = trials
        if trials is not None and name == "counting":
            kwargs["graphs"] = max(5, trials // 30)
        if max_n is not None and name in ("rules", "local-search", "crown"):
            kwargs["max_n"] = max_n
        results.append(fn(**kwargs))
    return results
