from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import chromatic_number, complete, complete_bipartite, disjoint_union, edgeless, gnp, path, petersen, star
from rsiplan.graph import ConflictGraph, colors_used, is_legal
from rsiplan.heuristics import (
    HEURISTICS,
    connected_sequential,
    dsatur,
    greedy_color,
    independent_set_color,
    largest_first,
    random_sequential,
    run_heuristic,
)

ALL = sorted(HEURISTICS)


class TestGreedy:
    def test_clique(self):
        for order in ([0, 1, 2], [2, 0, 1]):
            assert colors_used(greedy_color(complete(3), order)) == 3

    def test_edgeless(self):
        assert colors_used(greedy_color(edgeless(6), [5, 3, 1, 0, 2, 4])) == 1

    def test_path_orders(self):
        p3 = path(3)
        # ends first: both get 0, middle gets 1
        assert greedy_color(p3, [0, 2, 1]).assignment == (0, 1, 0)
        # middle first: 0, then both ends 1
        assert greedy_color(p3, [1, 0, 2]).assignment == (1, 0, 1)

    def test_palette_is_colors_used(self):
        c = greedy_color(path(4), [0, 1, 2, 3])
        assert c.palette_size == colors_used(c) == 2

    @pytest.mark.parametrize("order", [[0, 1], [0, 1, 1], [0, 1, 3], []])
    def test_rejects_non_permutation(self, order):
        with pytest.raises(ValueError):
            greedy_color(path(3), order)


class TestExamples:
    def test_random_sequential(self):
        g = gnp(40, 0.2, 1)
        assert random_sequential(g, 7) == random_sequential(g, 7)
        assert all(colors_used(random_sequential(complete(3), s)) == 3 for s in range(20))
        assert all(is_legal(g, random_sequential(g, s)) for s in range(100))

    def test_random_sequential_seed_matters(self):
        g = gnp(60, 0.2, 2)
        assert len({random_sequential(g, s).assignment for s in range(10)}) > 1

    def test_connected_sequential(self):
        assert all(colors_used(connected_sequential(path(5), s)) == 2 for s in range(20))
        assert colors_used(connected_sequential(complete(4), 0)) == 4
        two = disjoint_union(complete(3), complete(3))
        c = connected_sequential(two, 3)
        assert is_legal(two, c) and colors_used(c) == 3

    def test_independent_set(self):
        c = independent_set_color(complete_bipartite(3, 3))
        assert c.assignment == (0, 0, 0, 1, 1, 1)
        assert colors_used(independent_set_color(complete(4))) == 4
        assert colors_used(independent_set_color(edgeless(10))) == 1

    def test_largest_first(self):
        c = largest_first(star(5))
        assert colors_used(c) == 2 and c[0] == 0
        assert colors_used(largest_first(complete(3))) == 3
        g = gnp(50, 0.3, 3)
        assert largest_first(g) == largest_first(g)

    def test_dsatur_small(self):
        assert colors_used(dsatur(complete(3))) == 3
        assert colors_used(dsatur(edgeless(4))) == 1
        assert dsatur(ConflictGraph.from_edges(0, [])).assignment == ()

    def test_petersen(self):
        g = petersen()
        assert chromatic_number(g) == 3
        c = dsatur(g)
        assert is_legal(g, c) and colors_used(c) <= 3

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            run_heuristic("xx", path(2))


def bipartite_parity(g):
    """BFS 2-coloring oracle; returns None when an odd cycle exists."""
    side = [None] * g.num_vertices
    for root in range(g.num_vertices):
        if side[root] is not None:
            continue
        side[root] = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for u in g.adjacency[v]:
                if side[u] is None:
                    side[u] = 1 - side[v]
                    queue.append(u)
                elif side[u] == side[v]:
                    return None
    return side


def is_connected(g):
    seen = {0}
    stack = [0]
    while stack:
        for u in g.adjacency[stack.pop()]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == g.num_vertices


def random_connected_bipartite(rng):
    a, b = int(rng.integers(1, 15)), int(rng.integers(1, 15))
    perm = [int(v) for v in rng.permutation(a + b)]
    left, right = perm[:a], perm[a:]
    placed = {0: [left[0]], 1: []}
    edges = set()
    # random spanning tree: each vertex hooks onto an already placed vertex of
    # the other side; lefts drawn before any right are postponed
    pending = [(v, 0) for v in left[1:]] + [(v, 1) for v in right]
    pending = [pending[i] for i in rng.permutation(len(pending))]
    postponed = []
    for item in pending:
        v, side = item
        other = placed[1 - side]
        if not other:
            postponed.append(item)
            continue
        u = other[int(rng.integers(len(other)))]
        edges.add((min(u, v), max(u, v)))
        placed[side].append(v)
    for v, side in postponed:
        other = placed[1 - side]
        u = other[int(rng.integers(len(other)))]
        edges.add((min(u, v), max(u, v)))
    for u in left:
        for v in right:
            if rng.random() < 0.3:
                edges.add((min(u, v), max(u, v)))
    return ConflictGraph.from_edges(a + b, sorted(edges))


def test_dsatur_exact_on_bipartite():
    rng = np.random.default_rng(12)
    for _ in range(50):
        g = random_connected_bipartite(rng)
        assert g.num_edges >= 1
        assert bipartite_parity(g) is not None
        assert is_connected(g)
        c = dsatur(g)
        assert is_legal(g, c)
        assert colors_used(c) == 2


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 200), p=st.sampled_from([0.05, 0.2, 0.5]), seed=st.integers(0, 2**32 - 1))
def test_all_legal_and_within_greedy_bound(n, p, seed):
    g = gnp(n, p, seed)
    bound = g.max_degree() + 1
    for name in ALL:
        c = run_heuristic(name, g, seed)
        assert is_legal(g, c), name
        assert colors_used(c) <= bound, name


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 80), p=st.sampled_from([0.05, 0.2, 0.5]), seed=st.integers(0, 2**32 - 1))
def test_determinism(n, p, seed):
    g = gnp(n, p, seed)
    for name in ("lf", "ds", "is"):
        assert run_heuristic(name, g) == run_heuristic(name, g)
    for name in ("rs", "cs"):
        assert run_heuristic(name, g, seed) == run_heuristic(name, g, seed)


@pytest.mark.parametrize("seed", range(10))
def test_color_count_invariant_under_relabeling_for_clique_like(seed):
    # complete multipartite graphs: every heuristic is exact regardless of labels
    rng = np.random.default_rng(seed)
    parts = [int(k) for k in rng.integers(1, 5, size=4)]
    n = sum(parts)
    owner = np.repeat(np.arange(len(parts)), parts)[rng.permutation(n)]
    g = ConflictGraph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n) if owner[u] != owner[v]])
    for name in ("lf", "ds", "is", "cs"):
        assert colors_used(run_heuristic(name, g, seed)) == len(parts)
