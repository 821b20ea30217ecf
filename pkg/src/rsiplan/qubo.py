"""Graph coloring as a QUBO.

Variable ``v * C + c`` is 1 when vertex ``v`` takes color ``c``. The energy

    A * sum_v (1 - sum_c x[v, c])**2 + B * sum_{(u, v) in E} sum_c x[u, c] x[v, c]

is zero exactly on one-hot vectors that encode a legal C-coloring.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Callable, Optional

import numpy as np

from .graph import Coloring, ConflictGraph, colors_used, is_legal

if TYPE_CHECKING:
    from .solvers import SampleSet


class InfeasibleStartError(RuntimeError):
    """The solver found no zero-energy sample at the starting palette size."""


@dataclass(frozen=True, eq=False)
class Qubo:
    """Sparse upper-triangular QUBO: ``linear . x + sum q_ij x_i x_j + offset``.

    ``rows``/``cols``/``values`` hold the off-diagonal terms with ``rows < cols``,
    sorted and unique. ``num_vertices``/``num_colors`` are set for coloring
    QUBOs and define the ``(v, c) <-> v * C + c`` variable map.
    """

    linear: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    offset: float = 0.0
    num_vertices: int = 0
    num_colors: int = 0
    penalty_a: float = 1.0
    penalty_b: float = 1.0
    _csr: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        lin = np.ascontiguousarray(self.linear, dtype=np.float64)
        r = np.ascontiguousarray(self.rows, dtype=np.int64)
        c = np.ascontiguousarray(self.cols, dtype=np.int64)
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if lin.ndim != 1 or not (r.shape == c.shape == vals.shape) or r.ndim != 1:
            raise ValueError("inconsistent coefficient array shapes")
        m = lin.size
        if r.size:
            if np.any(r >= c) or r.min() < 0 or c.max() >= m:
                raise ValueError("quadratic keys must satisfy 0 <= i < j < num_vars")
            key = r * m + c
            if np.any(np.diff(key) <= 0):
                raise ValueError("quadratic keys must be sorted and unique")
        if self.num_colors and self.num_vertices * self.num_colors != m:
            raise ValueError("num_vars must equal num_vertices * num_colors")
        if self.penalty_a <= 0 or self.penalty_b <= 0:
            raise ValueError("penalties must be positive")
        for name, arr in (("linear", lin), ("rows", r), ("cols", c), ("values", vals)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_terms(cls, linear, quadratic: dict[tuple[int, int], float], offset: float = 0.0) -> "Qubo":
        """Generic QUBO from a linear vector and a ``{(i, j): coeff}`` map.

        ``(i, j)`` and ``(j, i)`` are merged; diagonal keys fold into ``linear``.
        """
        lin = np.array(linear, dtype=np.float64)
        merged: dict[tuple[int, int], float] = {}
        for (i, j), v in quadratic.items():
            if i == j:
                lin[i] += v
                continue
            key = (min(i, j), max(i, j))
            merged[key] = merged.get(key, 0.0) + float(v)
        keys = sorted(merged)
        rows = np.array([k[0] for k in keys], dtype=np.int64)
        cols = np.array([k[1] for k in keys], dtype=np.int64)
        vals = np.array([merged[k] for k in keys], dtype=np.float64)
        return cls(lin, rows, cols, vals, offset)

    @property
    def num_vars(self) -> int:
        return self.linear.size

    @cached_property
    def quadratic(self) -> dict[tuple[int, int], float]:
        return {(int(i), int(j)): float(v) for i, j, v in zip(self.rows, self.cols, self.values)}

    def var_index(self, v: int, c: int) -> int:
        if not (0 <= v < self.num_vertices and 0 <= c < self.num_colors):
            raise IndexError(f"(vertex {v}, color {c}) outside the variable map")
        return v * self.num_colors + c

    def var_pair(self, i: int) -> tuple[int, int]:
        if not self.num_colors or not 0 <= i < self.num_vars:
            raise IndexError(f"variable {i} outside the variable map")
        return divmod(i, self.num_colors)

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Symmetric neighbour structure ``(indptr, indices, data)`` for the samplers."""
        if not self._csr:
            m = self.num_vars
            r = np.concatenate([self.rows, self.cols])
            c = np.concatenate([self.cols, self.rows])
            d = np.concatenate([self.values, self.values])
            order = np.lexsort((c, r))
            indptr = np.zeros(m + 1, dtype=np.int64)
            np.cumsum(np.bincount(r, minlength=m), out=indptr[1:])
            self._csr.update(indptr=indptr, indices=c[order].copy(), data=d[order].copy())
        return self._csr["indptr"], self._csr["indices"], self._csr["data"]

    def dense(self) -> np.ndarray:
        """Upper-triangular dense Q with the linear terms on the diagonal."""
        q = np.diag(self.linear)
        q[self.rows, self.cols] = self.values
        return q


def build_qubo(g: ConflictGraph, num_colors: int, penalty_a: float = 1.0, penalty_b: float = 1.0) -> Qubo:
    """Expand the one-hot and edge penalties into QUBO coefficients.

    Using ``x**2 == x``, each vertex contributes ``-A`` per variable, ``+2A`` per
    pair of its own color variables and ``A`` to the offset; each edge
    contributes ``+B`` per shared color.
    """
    C = int(num_colors)
    if C < 1:
        raise ValueError("num_colors must be >= 1")
    if penalty_a <= 0 or penalty_b <= 0:
        raise ValueError("penalties must be positive")
    n = g.num_vertices
    m = n * C

    ca, cb = np.triu_indices(C, 1)
    base = (np.arange(n, dtype=np.int64) * C)[:, None]
    same_r = (base + ca).ravel()
    same_c = (base + cb).ravel()

    edges = np.array(g.edges(), dtype=np.int64).reshape(-1, 2)
    colors = np.arange(C, dtype=np.int64)
    edge_r = (edges[:, :1] * C + colors).ravel()
    edge_c = (edges[:, 1:] * C + colors).ravel()

    rows = np.concatenate([same_r, edge_r])
    cols = np.concatenate([same_c, edge_c])
    vals = np.concatenate([np.full(same_r.size, 2.0 * penalty_a), np.full(edge_r.size, float(penalty_b))])
    order = np.lexsort((cols, rows))
    return Qubo(
        linear=np.full(m, -float(penalty_a)),
        rows=rows[order],
        cols=cols[order],
        values=vals[order],
        offset=penalty_a * n,
        num_vertices=n,
        num_colors=C,
        penalty_a=float(penalty_a),
        penalty_b=float(penalty_b),
    )


def _as_binary(q: Qubo, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[-1:] != (q.num_vars,):
        raise ValueError(f"expected {q.num_vars} variables, got shape {x.shape}")
    if x.size and not np.all((x == 0) | (x == 1)):
        raise ValueError("x must be binary")
    return x.astype(np.float64)


def energy(q: Qubo, x) -> float:
    """``x^T Q x`` plus the offset for a single binary vector."""
    xf = _as_binary(q, x)
    if xf.ndim != 1:
        raise ValueError("energy() takes a single vector; use energies() for batches")
    return float(q.linear @ xf + np.dot(q.values, xf[q.rows] * xf[q.cols]) + q.offset)


def energies(q: Qubo, xs) -> np.ndarray:
    """Vectorized :func:`energy` over the rows of a 2-D array."""
    xf = _as_binary(q, np.atleast_2d(xs))
    return xf @ q.linear + (xf[:, q.rows] * xf[:, q.cols]) @ q.values + q.offset


def encode(c: Coloring, q: Qubo) -> np.ndarray:
    if len(c) != q.num_vertices:
        raise ValueError("coloring length does not match the QUBO's vertex count")
    if not c.is_total:
        raise ValueError("cannot encode a partial coloring")
    x = np.zeros(q.num_vars, dtype=np.int8)
    for v, color in enumerate(c.assignment):
        if color >= q.num_colors:
            raise ValueError(f"color {color} of vertex {v} exceeds the QUBO's {q.num_colors} colors")
        x[v * q.num_colors + color] = 1
    return x


def decode(x, q: Qubo) -> Coloring:
    """Rows with exactly one set bit give that color; anything else is unassigned."""
    xb = _as_binary(q, x)
    if xb.ndim != 1:
        raise ValueError("decode() takes a single vector")
    grid = xb.reshape(q.num_vertices, q.num_colors)
    hot = grid.sum(axis=1) == 1
    picks = grid.argmax(axis=1)
    return Coloring(tuple(int(c) if h else None for h, c in zip(hot, picks)), q.num_colors)


def write_qubo(q: Qubo) -> str:
    """Text form: ``M offset`` then ``i i coeff`` (linear) and ``i j coeff`` lines."""
    out = io.StringIO()
    out.write(f"{q.num_vars} {q.offset!r}\n")
    for i, v in enumerate(q.linear):
        if v != 0.0:
            out.write(f"{i} {i} {float(v)!r}\n")
    for i, j, v in zip(q.rows, q.cols, q.values):
        out.write(f"{int(i)} {int(j)} {float(v)!r}\n")
    return out.getvalue()


def read_qubo(text: str) -> Qubo:
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 2:
        raise ValueError("first line must be 'M offset'")
    m, offset = int(lines[0][0]), float(lines[0][1])
    linear = np.zeros(m)
    quad: dict[tuple[int, int], float] = {}
    for lineno, parts in enumerate(lines[1:], start=2):
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'i j coeff'")
        i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
        if not (0 <= i < m and 0 <= j < m):
            raise ValueError(f"line {lineno}: index out of range")
        if i == j:
            linear[i] += v
        elif i > j:
            raise ValueError(f"line {lineno}: quadratic terms need i < j")
        else:
            quad[(i, j)] = quad.get((i, j), 0.0) + v
    return Qubo.from_terms(linear, quad, offset)


def min_colors_search(
    g: ConflictGraph,
    solver: Callable[[Qubo], "SampleSet"],
    c_start: Optional[int] = None,
    penalty_a: float = 1.0,
    penalty_b: float = 1.0,
) -> tuple[int, Coloring]:
    """Shrink the palette while the solver keeps finding zero-energy samples.

    ``solver`` maps a QUBO to a sample set; its parameters (reads, sweeps, ...)
    are the per-step budget. ``c_start`` defaults to DSATUR's color count.
    A feasible sample that uses ``k < C`` colors lets the search resume at
    ``k - 1``, since ``k`` is then known to be feasible.
    """
    if g.num_vertices == 0:
        return 0, Coloring((), 0)
    if c_start is None:
        from .heuristics import dsatur

        c_start = colors_used(dsatur(g))
    best: Optional[tuple[int, Coloring]] = None
    c = int(c_start)
    while c >= 1:
        q = build_qubo(g, c, penalty_a, penalty_b)
        found = _feasible_coloring(g, q, solver(q))
        if found is None:
            break
        k = colors_used(found)
        best = (k, Coloring(found.assignment, k))
        c = k - 1
    if best is None:
        raise InfeasibleStartError(f"no zero-energy sample at {c_start} colors; retry with a larger start")
    return best


def _feasible_coloring(g: ConflictGraph, q: Qubo, samples: "SampleSet") -> Optional[Coloring]:
    for x, e, _ in samples:
        if e > 1e-9:
            break
        col = decode(x, q)
        if is_legal(g, col):
            return _compact(col)
    return None


def _compact(c: Coloring) -> Coloring:
    """Relabel colors to ``0..k-1`` in order of first appearance."""
    relabel: dict[int, int] = {}
    out = []
    for color in c.assignment:
        if color is None:
            out.append(None)
            continue
        out.append(relabel.setdefault(color, len(relabel)))
    return Coloring(tuple(out), max(len(relabel), 0))
