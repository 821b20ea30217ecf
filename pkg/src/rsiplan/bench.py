"""Benchmark harness and RSI plan generation."""

from __future__ import annotations

import csv
import io
import time
import zlib
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .graph import Coloring, ConflictGraph, colors_used, count_conflicts, export_coloring_csv, is_legal
from .heuristics import HEURISTICS, run_heuristic
from .ingest import MAX_RSI, NUM_ROOT_SEQUENCES, Cell, IngestConfig, build_conflict_graph
from .qubo import build_qubo, decode, min_colors_search
from .solvers import SOLVERS, SolverParams

SEED_MASK = (1 << 64) - 1
QUBO_ALGORITHMS = ("sa", "tabu", "hybrid", "exact")
ALGORITHMS = tuple(HEURISTICS) + QUBO_ALGORITHMS
CSV_HEADER = ("algorithm", "conflict_rank", "run", "seed", "colors", "wall_ms", "legal", "energy")
DEFAULT_PALETTE = tuple(range(NUM_ROOT_SEQUENCES))


@dataclass(frozen=True)
class BenchmarkRecord:
    algorithm: str
    conflict_rank: int
    run_index: int
    seed: int
    colors_used: int
    wall_time_ms: Optional[float]
    legal: bool
    energy: Optional[float] = None


@dataclass(frozen=True)
class Plan:
    """Cell id to RSI mapping drawn from an ordered palette."""

    entries: tuple[tuple[str, int], ...]
    palette: tuple[int, ...]

    def as_dict(self) -> dict[str, int]:
        return dict(self.entries)


def run_seed(base_seed: int, algorithm: str, rank: int, run: int) -> int:
    return (int(base_seed) + zlib.crc32(f"{algorithm}|{rank}|{run}".encode())) & SEED_MASK


def _check_algorithm(name: str) -> None:
    if name not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")


def solve_coloring(
    g: ConflictGraph,
    algorithm: str,
    seed: int = 0,
    num_colors: Optional[int] = None,
    params: Optional[SolverParams] = None,
    penalty_a: float = 1.0,
    penalty_b: float = 1.0,
) -> tuple[Coloring, Optional[float]]:
    """Color ``g`` with a heuristic or a QUBO sampler; returns ``(coloring, energy)``.

    QUBO samplers solve a fixed palette when ``num_colors`` is given and run
    the descending palette search from DSATUR's count otherwise. Heuristics
    ignore ``num_colors`` and report no energy.
    """
    _check_algorithm(algorithm)
    if algorithm in HEURISTICS:
        return run_heuristic(algorithm, g, seed), None
    p = replace(params or SolverParams(), seed=seed)
    if p.energy_threshold is None:
        # feasibility: any zero-energy sample is a legal coloring
        p = replace(p, energy_threshold=0.0)
    sampler = SOLVERS[algorithm]

    def solve(q):
        return sampler(q, p)

    if num_colors is not None:
        if g.num_vertices == 0:
            return Coloring((), 0), 0.0
        q = build_qubo(g, num_colors, penalty_a, penalty_b)
        samples = solve(q)
        x, e = samples.first
        return decode(x, q), e
    _, coloring = min_colors_search(g, solve, penalty_a=penalty_a, penalty_b=penalty_b)
    return coloring, 0.0


def run_benchmark(
    cells: Sequence[Cell],
    ranks: Sequence[int],
    algorithms: Sequence[str],
    runs: int,
    base_seed: int = 0,
    radius_km: float = 2.0,
    params: Optional[SolverParams] = None,
    num_colors: Optional[int] = None,
    penalty_a: float = 1.0,
    penalty_b: float = 1.0,
) -> list[BenchmarkRecord]:
    """Run every algorithm ``runs`` times on the conflict graph of each rank.

    Timing covers the coloring call only. Illegal results are kept with
    ``legal=False`` so callers can flag them. Records come back sorted by
    algorithm name, rank and run.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if not cells:
        raise ValueError("no cells to benchmark")
    for name in algorithms:
        _check_algorithm(name)
    records = []
    for rank in ranks:
        g = build_conflict_graph(cells, IngestConfig(radius_km, rank))
        for name in algorithms:
            for run in range(runs):
                seed = run_seed(base_seed, name, rank, run)
                t0 = time.perf_counter()
                coloring, e = solve_coloring(g, name, seed, num_colors, params, penalty_a, penalty_b)
                wall_ms = (time.perf_counter() - t0) * 1e3
                records.append(BenchmarkRecord(
                    algorithm=name, conflict_rank=rank, run_index=run, seed=seed,
                    colors_used=colors_used(coloring), wall_time_ms=wall_ms,
                    legal=is_legal(g, coloring), energy=e,
                ))
    records.sort(key=lambda r: (r.algorithm, r.conflict_rank, r.run_index))
    return records


def _fmt_float(v: Optional[float]) -> str:
    return "" if v is None else repr(float(v))


def emit_csv(records: Sequence[BenchmarkRecord], include_timing: bool = True) -> str:
    """Records as CSV. ``include_timing=False`` blanks ``wall_ms`` so output is byte-reproducible."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([
            r.algorithm, r.conflict_rank, r.run_index, r.seed, r.colors_used,
            _fmt_float(r.wall_time_ms) if include_timing else "",
            "true" if r.legal else "false", _fmt_float(r.energy),
        ])
    return buf.getvalue()


def parse_csv(text: str) -> list[BenchmarkRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"expected header {','.join(CSV_HEADER)!r}")
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(CSV_HEADER):
            raise ValueError(f"line {lineno}: expected {len(CSV_HEADER)} columns")
        algo, rank, run, seed, colors, wall, legal, e = row
        if legal not in ("true", "false"):
            raise ValueError(f"line {lineno}: legal must be 'true' or 'false'")
        out.append(BenchmarkRecord(
            algorithm=algo, conflict_rank=int(rank), run_index=int(run), seed=int(seed),
            colors_used=int(colors), wall_time_ms=float(wall) if wall else None,
            legal=legal == "true", energy=float(e) if e else None,
        ))
    return out


def make_plan(g: ConflictGraph, c: Coloring, rsi_palette: Sequence[int] = DEFAULT_PALETTE) -> Plan:
    """Map color ``i`` to ``rsi_palette[i]`` for every cell of a legally colored graph."""
    palette = tuple(int(v) for v in rsi_palette)
    if len(set(palette)) != len(palette):
        raise ValueError("RSI palette values must be distinct")
    bad = [v for v in palette if not 0 <= v <= MAX_RSI]
    if bad:
        raise ValueError(f"RSI values outside [0, {MAX_RSI}]: {bad[:5]}")
    if not is_legal(g, c):
        raise ValueError("cannot plan from an illegal coloring")
    highest = max((x for x in c.assignment if x is not None), default=-1)
    if colors_used(c) > len(palette) or highest >= len(palette):
        raise ValueError(f"palette of {len(palette)} RSIs is too small for this coloring")
    plan = Plan(tuple((label, palette[color]) for label, color in zip(g.labels, c.assignment)), palette)
    if plan_conflicts(g, plan):
        raise RuntimeError("plan re-validation found RSI conflicts")
    return plan


def plan_conflicts(g: ConflictGraph, plan: Plan) -> int:
    """Edges whose endpoints were given the same RSI."""
    rsi = plan.as_dict()
    if set(rsi) != set(g.labels) or len(plan.entries) != g.num_vertices:
        raise ValueError("plan must cover every graph vertex exactly once")
    as_colors = Coloring(tuple(plan.palette.index(rsi[label]) for label in g.labels), len(plan.palette))
    return count_conflicts(g, as_colors)


def plan_csv(g: ConflictGraph, plan: Plan) -> str:
    rsi = plan.as_dict()
    c = Coloring(tuple(plan.palette.index(rsi[label]) for label in g.labels), len(plan.palette))
    return export_coloring_csv(g, c, plan.palette)
