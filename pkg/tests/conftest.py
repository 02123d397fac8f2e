import pytest

from chainwalk import build_graph, hodge_decompose, step_field


@pytest.fixture(scope="session")
def graphs():
    """Session-cached graph factory (construction is deterministic)."""
    cache = {}

    def get(k):
        if k not in cache:
            cache[k] = build_graph(k)
        return cache[k]

    return get


@pytest.fixture(scope="session")
def exact_hodge(graphs):
    """Session-cached exact decomposition of the step field per level.

    Returns (graph, step field, potential, divergence-free part); the K=8
    exact solve is expensive, so every test shares one run.
    """
    cache = {}

    def get(k):
        if k not in cache:
            g = graphs(k)
            A = step_field(g)
            f, B = hodge_decompose(A)
            cache[k] = (g, A, f, B)
        return cache[k]

    return get
