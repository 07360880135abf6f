import random

import pytest
from hypothesis import strategies as st

from sparse_outbranch.digraph import RootedDigraph, is_connected


@st.composite
def small_digraphs(draw, max_n=6, connected=True):
    """Random small rooted digraphs (root 0, no arcs into the root)."""
    n = draw(st.integers(min_value=1, max_value=max_n))
    arcs = set()
    if connected and n > 1:
        for v in range(1, n):
            p = draw(st.integers(min_value=0, max_value=v - 1))
            arcs.add((p, v))
    extra = draw(st.lists(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
        max_size=2 * n))
    for u, v in extra:
        if u != v and v != 0:
            arcs.add((u, v))
    return RootedDigraph(n, 0, arcs)


def random_connected(rng: random.Random, n: int, density: float = 0.3,
                     bidi: float = 0.0) -> RootedDigraph:
    """Spanning-overlay random connected digraph for plain random sweeps."""
    arcs = set()
    for v in range(1, n):
        p = rng.randrange(0, v)
        arcs.add((p, v))
        if bidi and p != 0 and rng.random() < bidi:
            arcs.add((v, p))
    for _ in range(int(density * n * n)):
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v and v != 0:
            arcs.add((u, v))
            if bidi and u != 0 and rng.random() < bidi:
                arcs.add((v, u))
    d = RootedDigraph(n, 0, arcs)
    assert is_connected(d)
    return d


@pytest.fixture
def rng():
    return random.Random(20240731)
