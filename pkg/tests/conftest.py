import itertools

import numpy as np
import pytest

from rsiplan.graph import ConflictGraph


def gnp(n, p, seed):
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < p, 1)
    return ConflictGraph.from_edges(n, [(int(u), int(v)) for u, v in zip(*np.nonzero(upper))])


def complete(n):
    return ConflictGraph.from_edges(n, itertools.combinations(range(n), 2))


def path(n):
    return ConflictGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star(leaves):
    return ConflictGraph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def edgeless(n):
    return ConflictGraph.from_edges(n, [])


def complete_bipartite(a, b):
    return ConflictGraph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return ConflictGraph.from_edges(10, outer + spokes + inner)


def disjoint_union(g, h):
    n = g.num_vertices
    return ConflictGraph.from_edges(n + h.num_vertices, g.edges() + [(u + n, v + n) for u, v in h.edges()])


def chromatic_number(g):
    """Exhaustive oracle, fine for about a dozen vertices."""
    n = g.num_vertices
    edges = g.edges()
    for k in range(1, n + 1):
        for colors in itertools.product(range(k), repeat=n):
            if all(colors[u] != colors[v] for u, v in edges):
                return k
    return 0


@pytest.fixture
def k3():
    return complete(3)


def random_qubo(rng, m=None):
    """Dense-ish random QUBO with a mix of integer and Gaussian coefficients."""
    from rsiplan.qubo import Qubo

    m = int(rng.integers(1, 17)) if m is None else m
    density = float(rng.uniform(0.2, 0.9))
    if rng.random() < 0.5:
        draw = lambda size: rng.integers(-5, 6, size).astype(float)
    else:
        draw = lambda size: rng.normal(0.0, 1.0, size)
    i, j = np.triu_indices(m, 1)
    keep = rng.random(i.size) < density
    return Qubo(draw(m), i[keep], j[keep], draw(int(keep.sum())), float(rng.normal()))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
