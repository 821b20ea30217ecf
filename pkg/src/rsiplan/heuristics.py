"""Sequential (greedy) graph-coloring heuristics.

All five share :func:`greedy_color` or its smallest-free-color rule and differ
only in how the vertex sequence is produced. Tie-breaking is fixed so that the
seed-free algorithms are fully deterministic.
"""

from __future__ import annotations

import heapq
from collections import deque
from typing import Callable, Sequence

import numpy as np

from .graph import Coloring, ConflictGraph

SEED_MASK = (1 << 64) - 1


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed) & SEED_MASK)


def _smallest_free(taken: set[int]) -> int:
    c = 0
    while c in taken:
        c += 1
    return c


def _finish(colors: list) -> Coloring:
    return Coloring.from_list(colors)


def greedy_color(g: ConflictGraph, order: Sequence[int]) -> Coloring:
    """Color vertices in ``order`` with the smallest color unused by colored neighbours."""
    n = g.num_vertices
    order = [int(v) for v in order]
    if len(order) != n or sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of the graph's vertices")
    colors: list = [None] * n
    for v in order:
        colors[v] = _smallest_free({colors[u] for u in g.adjacency[v] if colors[u] is not None})
    return _finish(colors)


def random_sequential(g: ConflictGraph, rng_seed: int) -> Coloring:
    """Greedy coloring over a uniformly shuffled vertex sequence."""
    return greedy_color(g, _rng(rng_seed).permutation(g.num_vertices))


def connected_sequential(g: ConflictGraph, rng_seed: int) -> Coloring:
    """Greedy coloring in which every next vertex touches an already colored one.

    Components are handled in order of their lowest vertex index. Each starts
    at a random vertex of the component and is then traversed breadth first,
    neighbours queued in ascending index order.
    """
    rng = _rng(rng_seed)
    n = g.num_vertices
    seen = [False] * n
    order: list[int] = []
    for root in range(n):
        if seen[root]:
            continue
        comp = [root]
        seen[root] = True
        for v in comp:
            for u in g.adjacency[v]:
                if not seen[u]:
                    seen[u] = True
                    comp.append(u)
        comp.sort()
        start = comp[int(rng.integers(len(comp)))]
        placed = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            order.append(v)
            for u in g.adjacency[v]:
                if u not in placed:
                    placed.add(u)
                    queue.append(u)
    return greedy_color(g, order)


def independent_set_color(g: ConflictGraph) -> Coloring:
    """Peel off greedy maximal independent sets, one color per set.

    Each set is grown over the remaining subgraph in ascending order of
    remaining degree (ties by index).
    """
    n = g.num_vertices
    colors: list = [None] * n
    remaining = set(range(n))
    color = 0
    while remaining:
        deg = {v: sum(1 for u in g.adjacency[v] if u in remaining) for v in remaining}
        blocked: set[int] = set()
        for v in sorted(remaining, key=lambda v: (deg[v], v)):
            if v in blocked:
                continue
            colors[v] = color
            blocked.update(g.adjacency[v])
        remaining = {v for v in remaining if colors[v] is None}
        color += 1
    return _finish(colors)


def largest_first(g: ConflictGraph) -> Coloring:
    """Greedy coloring by descending degree, ties by ascending index."""
    order = sorted(range(g.num_vertices), key=lambda v: (-len(g.adjacency[v]), v))
    return greedy_color(g, order)


def dsatur(g: ConflictGraph) -> Coloring:
    """DSATUR: always color the most saturated uncolored vertex next.

    Saturation is the number of distinct colors among a vertex's neighbours.
    Ties go to the vertex with more uncolored neighbours, then the lower index.
    """
    n = g.num_vertices
    colors: list = [None] * n
    neighbor_colors: list[set[int]] = [set() for _ in range(n)]
    uncolored_deg = [len(a) for a in g.adjacency]
    heap = [(0, -uncolored_deg[v], v) for v in range(n)]
    heapq.heapify(heap)
    while heap:
        neg_sat, neg_deg, v = heapq.heappop(heap)
        if colors[v] is not None or -neg_sat != len(neighbor_colors[v]) or -neg_deg != uncolored_deg[v]:
            continue  # stale entry
        c = _smallest_free(neighbor_colors[v])
        colors[v] = c
        for u in g.adjacency[v]:
            if colors[u] is not None:
                continue
            uncolored_deg[u] -= 1
            neighbor_colors[u].add(c)
            heapq.heappush(heap, (-len(neighbor_colors[u]), -uncolored_deg[u], u))
    return _finish(colors)


HEURISTICS: dict[str, Callable[..., Coloring]] = {
    "rs": random_sequential,
    "cs": connected_sequential,
    "is": independent_set_color,
    "lf": largest_first,
    "ds": dsatur,
}
SEEDED = frozenset({"rs", "cs"})


def run_heuristic(name: str, g: ConflictGraph, seed: int = 0) -> Coloring:
    try:
        fn = HEURISTICS[name]
    except KeyError:
        raise ValueError(f"unknown heuristic {name!r}; choose from {sorted(HEURISTICS)}") from None
    return fn(g, seed) if name in SEEDED else fn(g)
