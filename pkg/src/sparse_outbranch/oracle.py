"""Ground-truth solvers for small rooted digraphs.

Enumerates every spanning out-branching (recursive arc extension with a
bridging-arc feasibility test, so dead subtrees are never entered and each
branching is produced exactly once), plus an independent parent-vector
brute force used to cross-check the enumeration, and a branch-and-bound
solver for kernelized instances that are too big to enumerate.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

from .digraph import (
    OutBranching,
    RootedDigraph,
    bfs_out_branching,
    is_connected,
)


class BudgetExceeded(Exception):
    """Raised when an exact computation would exceed its budget."""


@dataclass(frozen=True)
class EnumerationBudget:
    max_n: int = 12
    max_count: Optional[int] = None
    timeout: Optional[float] = None  # seconds


class SolveMode(Enum):
    LEAF = "leaf"
    INTERNAL = "internal"


@dataclass
class SolveResult:
    best_value: int
    witness: Optional[OutBranching]
    exact: bool


def _tree_value(t: OutBranching, mode: SolveMode) -> int:
    return t.leaf_count() if mode is SolveMode.LEAF else t.internal_count()


class _Grower:
    """Shared state for the arc-extension recursion: a partial arborescence
    (parent map + attached flags), a set of banned arc indices, and the
    feasibility test that prunes branches which can no longer span."""

    def __init__(self, d: RootedDigraph):
        self.d = d
        self.arcs = d.arcs()
        self.arc_index = {a: i for i, a in enumerate(self.arcs)}
        self.banned = [False] * len(self.arcs)
        self.attached = [False] * d.n
        self.attached[d.root] = True
        self.parent: dict[int, int] = {}
        self.child_count = [0] * d.n
        self.internal = 0

    def unattached(self) -> int:
        return self.d.n - 1 - len(self.parent)

    def feasible(self) -> bool:
        seen = self.attached.copy()
        stack = [v for v in range(self.d.n) if seen[v]]
        todo = self.unattached()
        if todo == 0:
            return True
        out_adj = self.d.out_adj
        banned = self.banned
        index = self.arc_index
        while stack:
            u = stack.pop()
            for w in out_adj[u]:
                if not seen[w] and not banned[index[(u, w)]]:
                    seen[w] = True
                    todo -= 1
                    if todo == 0:
                        return True
                    stack.append(w)
        return False

    def pivot(self) -> Optional[int]:
        attached = self.attached
        for i, (u, v) in enumerate(self.arcs):
            if not self.banned[i] and attached[u] and not attached[v]:
                return i
        return None

    def attach(self, u: int, v: int) -> None:
        self.attached[v] = True
        self.parent[v] = u
        self.child_count[u] += 1
        if self.child_count[u] == 1:
            self.internal += 1

    def detach(self, u: int, v: int) -> None:
        self.child_count[u] -= 1
        if self.child_count[u] == 0:
            self.internal -= 1
        del self.parent[v]
        self.attached[v] = False

    def value_bound(self, mode: SolveMode) -> int:
        # optimistic: every unattached vertex counts toward the objective,
        # attached leaves may still flip to internal (and vice versa never)
        if mode is SolveMode.INTERNAL:
            return self.internal + self.unattached()
        attached_now = len(self.parent) + 1
        return (attached_now - self.internal) + self.unattached()


def enumerate_out_branchings(d: RootedDigraph,
                             budget: Optional[EnumerationBudget] = None
                             ) -> Iterator[OutBranching]:
    """Yield every spanning out-branching of ``d`` rooted at its root,
    each exactly once. Raises BudgetExceeded when the budget runs out;
    anything yielded before that must not be treated as a complete list."""
    if budget is None:
        budget = EnumerationBudget()
    if not is_connected(d):
        raise ValueError("enumeration requires a connected digraph")
    if d.n > budget.max_n:
        raise BudgetExceeded(f"n={d.n} exceeds enumeration cap {budget.max_n}")
    deadline = None if budget.timeout is None else time.monotonic() + budget.timeout
    st = _Grower(d)
    count = 0

    def grow() -> Iterator[OutBranching]:
        nonlocal count
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExceeded("enumeration timeout")
        if not st.feasible():
            return
        if st.unattached() == 0:
            count += 1
            if budget.max_count is not None and count > budget.max_count:
                raise BudgetExceeded(f"more than {budget.max_count} branchings")
            yield OutBranching(d.n, d.root, st.parent)
            return
        i = st.pivot()
        if i is None:
            return
        u, v = st.arcs[i]
        st.attach(u, v)
        yield from grow()
        st.detach(u, v)
        st.banned[i] = True
        yield from grow()
        st.banned[i] = False

    yield from grow()


def brute_force_out_branchings(d: RootedDigraph) -> Iterator[OutBranching]:
    """Independent oracle: try every way of picking one in-arc per non-root
    vertex and keep the acyclic ones. Exponential; for cross-checks only."""
    nonroots = [v for v in range(d.n) if v != d.root]
    for v in nonroots:
        if not d.in_adj[v]:
            return
    for combo in itertools.product(*(d.in_adj[v] for v in nonroots)):
        parent = dict(zip(nonroots, combo))
        ok = True
        for v in nonroots:
            steps = 0
            u = v
            while u != d.root:
                u = parent[u]
                steps += 1
                if steps >= d.n:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            yield OutBranching(d.n, d.root, parent)


def _optimize(d: RootedDigraph, mode: SolveMode,
              budget: Optional[EnumerationBudget]) -> SolveResult:
    best = -1
    witness = None
    try:
        for t in enumerate_out_branchings(d, budget):
            val = _tree_value(t, mode)
            if val > best:
                best, witness = val, t
    except BudgetExceeded:
        return SolveResult(best, witness, exact=False)
    return SolveResult(best, witness, exact=True)


def maxleaf_exact(d: RootedDigraph,
                  budget: Optional[EnumerationBudget] = None) -> SolveResult:
    """Exact maximum leaf count over all spanning out-branchings."""
    return _optimize(d, SolveMode.LEAF, budget)


def max_internal_exact(d: RootedDigraph,
                       budget: Optional[EnumerationBudget] = None) -> SolveResult:
    """Exact maximum internal count (equals n minus the minimum leaf count)."""
    return _optimize(d, SolveMode.INTERNAL, budget)


def check_equivalence(before: RootedDigraph, after: RootedDigraph, k: int,
                      mode: SolveMode,
                      budget: Optional[EnumerationBudget] = None) -> bool:
    """True iff (value(before) >= k) == (value(after) >= k); raises
    BudgetExceeded when either side cannot be computed exactly."""
    rb = solve_branch_and_bound(before, None, mode, budget=budget)
    ra = solve_branch_and_bound(after, None, mode, budget=budget)
    if not (rb.exact and ra.exact):
        raise BudgetExceeded("equivalence check inconclusive within budget")
    return (rb.best_value >= k) == (ra.best_value >= k)


def solve_branch_and_bound(d: RootedDigraph, k: Optional[int],
                           mode: SolveMode,
                           budget: Optional[EnumerationBudget] = None,
                           timeout: float = 60.0) -> SolveResult:
    """Exact optimum by branch and bound over partial out-branchings.

    The optimistic bound counts every unattached vertex as a leaf (LEAF
    mode) or as internal (INTERNAL mode). When ``k`` is given the search
    exits as soon as a branching of value >= k is found (the result is then
    a decision witness, not a proven optimum, so exact=False).
    """
    if not is_connected(d):
        raise ValueError("branch and bound requires a connected digraph")
    if budget is not None and budget.timeout is not None:
        timeout = budget.timeout
    deadline = time.monotonic() + timeout

    seed = bfs_out_branching(d)
    best = _tree_value(seed, mode)
    witness: Optional[OutBranching] = seed
    if k is not None and best >= k:
        return SolveResult(best, witness, exact=False)

    st = _Grower(d)
    state = {"timed_out": False, "early": False}

    def search() -> None:
        nonlocal best, witness
        if state["timed_out"] or state["early"]:
            return
        if time.monotonic() > deadline:
            state["timed_out"] = True
            return
        if st.value_bound(mode) <= best:
            return
        if not st.feasible():
            return
        if st.unattached() == 0:
            t = OutBranching(d.n, d.root, st.parent)
            val = _tree_value(t, mode)
            if val > best:
                best, witness = val, t
                if k is not None and best >= k:
                    state["early"] = True
            return
        i = st.pivot()
        if i is None:
            return
        u, v = st.arcs[i]
        st.attach(u, v)
        search()
        st.detach(u, v)
        st.banned[i] = True
        search()
        st.banned[i] = False

    search()
    return SolveResult(best, witness,
                       exact=not (state["timed_out"] or state["early"]))
