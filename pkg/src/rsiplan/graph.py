"""Conflict graph, colorings and legality checks."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence


@dataclass(frozen=True)
class ConflictGraph:
    """Simple undirected graph over dense vertex indices.

    ``labels[i]`` is the cell id of vertex ``i``; ``adjacency[i]`` is the sorted
    tuple of neighbours of ``i``; ``weights`` maps ``(i, j)`` with ``i < j`` to
    the edge's conflict cost.
    """

    labels: tuple[str, ...]
    adjacency: tuple[tuple[int, ...], ...]
    weights: dict[tuple[int, int], float] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n = len(self.adjacency)
        if len(self.labels) != n:
            raise ValueError("labels and adjacency differ in length")
        if len(set(self.labels)) != n:
            raise ValueError("vertex labels must be unique")
        arcs = set()
        for v, nbrs in enumerate(self.adjacency):
            if any(a >= b for a, b in zip(nbrs, nbrs[1:])):
                raise ValueError(f"neighbour list of vertex {v} is not sorted/unique")
            for u in nbrs:
                if u == v:
                    raise ValueError(f"self-loop at vertex {v}")
                if not 0 <= u < n:
                    raise ValueError(f"neighbour {u} of vertex {v} out of range")
                arcs.add((v, u))
        for v, u in arcs:
            if (u, v) not in arcs:
                raise ValueError(f"adjacency not symmetric at ({v}, {u})")

    @classmethod
    def from_edges(
        cls,
        num_vertices: int,
        edges: Iterable[tuple[int, int]],
        labels: Optional[Sequence[str]] = None,
        weights: Optional[dict[tuple[int, int], float]] = None,
    ) -> "ConflictGraph":
        """Build a graph from an edge list; duplicate edges collapse, self-loops raise."""
        nbrs: list[set[int]] = [set() for _ in range(num_vertices)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise ValueError(f"edge ({u}, {v}) out of range")
            nbrs[u].add(v)
            nbrs[v].add(u)
        if labels is None:
            labels = [str(i) for i in range(num_vertices)]
        w: dict[tuple[int, int], float] = {}
        for (u, v), cost in (weights or {}).items():
            key = (min(u, v), max(u, v))
            if key[1] not in nbrs[key[0]]:
                raise ValueError(f"weight given for missing edge {key}")
            if cost < 0:
                raise ValueError(f"negative weight on edge {key}")
            w[key] = float(cost)
        return cls(tuple(labels), tuple(tuple(sorted(s)) for s in nbrs), w)

    @property
    def num_vertices(self) -> int:
        return len(self.adjacency)

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self) -> list[tuple[int, int]]:
        """All edges as ``(u, v)`` with ``u < v``, in lexicographic order."""
        return [(u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v]

    def neighbors(self, v: int) -> tuple[int, ...]:
        _check_vertex(self, v)
        return self.adjacency[v]

    def weight(self, u: int, v: int) -> float:
        return self.weights.get((min(u, v), max(u, v)), 1.0)

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def index_of(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class Coloring:
    """Per-vertex color index (``None`` = unassigned) over a palette of size N."""

    assignment: tuple[Optional[int], ...]
    palette_size: int

    def __post_init__(self):
        if self.palette_size < 0:
            raise ValueError("palette_size must be non-negative")
        for v, c in enumerate(self.assignment):
            if c is None:
                continue
            if isinstance(c, bool) or not isinstance(c, int):
                raise TypeError(f"color of vertex {v} must be an int or None, got {c!r}")
            if not 0 <= c < self.palette_size:
                raise ValueError(f"color {c} of vertex {v} outside palette of size {self.palette_size}")

    @classmethod
    def from_list(cls, colors: Sequence[Optional[int]], palette_size: Optional[int] = None) -> "Coloring":
        """Build a coloring; the palette defaults to ``max(color) + 1``."""
        colors = tuple(None if c is None else int(c) for c in colors)
        if palette_size is None:
            palette_size = max((c for c in colors if c is not None), default=-1) + 1
        return cls(colors, palette_size)

    def __len__(self) -> int:
        return len(self.assignment)

    def __getitem__(self, v: int) -> Optional[int]:
        return self.assignment[v]

    @property
    def is_total(self) -> bool:
        return all(c is not None for c in self.assignment)


def _check_vertex(g: ConflictGraph, v: int) -> None:
    if not 0 <= v < g.num_vertices:
        raise IndexError(f"vertex {v} out of range for graph with {g.num_vertices} vertices")


def degree(g: ConflictGraph, v: int) -> int:
    _check_vertex(g, v)
    return len(g.adjacency[v])


def count_conflicts(g: ConflictGraph, c: Coloring) -> int:
    """Number of edges whose endpoints are both colored with the same color."""
    if len(c) != g.num_vertices:
        raise ValueError("coloring length does not match the graph")
    a = c.assignment
    return sum(
        1
        for u, nbrs in enumerate(g.adjacency)
        if a[u] is not None
        for v in nbrs
        if u < v and a[v] == a[u]
    )


def is_legal(g: ConflictGraph, c: Coloring) -> bool:
    """A legal coloring is total and has no conflicting edge."""
    return len(c) == g.num_vertices and c.is_total and count_conflicts(g, c) == 0


def colors_used(c: Coloring) -> int:
    return len({x for x in c.assignment if x is not None})


def export_coloring_csv(
    g: ConflictGraph, c: Coloring, palette: Optional[Sequence[int]] = None
) -> str:
    """Write ``cell_id,color,rsi``; ``rsi`` is blank unless a palette is given."""
    if len(c) != g.num_vertices:
        raise ValueError("coloring length does not match the graph")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["cell_id", "color", "rsi"])
    for label, color in zip(g.labels, c.assignment):
        if color is None:
            w.writerow([label, "", ""])
            continue
        rsi = "" if palette is None else palette[color]
        w.writerow([label, color, rsi])
    return buf.getvalue()


def parse_coloring_csv(text: str, g: ConflictGraph, palette_size: Optional[int] = None) -> Coloring:
    """Inverse of :func:`export_coloring_csv` (the rsi column is ignored)."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [h.strip() for h in rows[0]] != ["cell_id", "color", "rsi"]:
        raise ValueError("expected header 'cell_id,color,rsi'")
    colors: list[Optional[int]] = [None] * g.num_vertices
    index = {label: i for i, label in enumerate(g.labels)}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise ValueError(f"line {lineno}: expected 3 columns, got {len(row)}")
        cell_id, color = row[0].strip(), row[1].strip()
        if cell_id not in index:
            raise ValueError(f"line {lineno}: unknown cell_id {cell_id!r}")
        colors[index[cell_id]] = int(color) if color else None
    return Coloring.from_list(colors, palette_size)
