"""Command line entry point: ``rsiplan color|bench|qubo|synth``."""

from __future__ import annotations

import argparse
import logging
import re
import sys
import time
from pathlib import Path

from .bench import ALGORITHMS, DEFAULT_PALETTE, QUBO_ALGORITHMS, emit_csv, make_plan, plan_csv, run_benchmark, solve_coloring
from .graph import colors_used, is_legal
from .ingest import CellDataError, IngestConfig, build_conflict_graph, format_cells, parse_cells
from .plot import emit_plot
from .qubo import InfeasibleStartError, build_qubo, write_qubo
from .solvers import SolverParams
from .synthetic import synthetic_cells

log = logging.getLogger("rsiplan")


def parse_ranks(text: str) -> list[int]:
    """``"1..6"``, ``"2,4,6"`` or a mix such as ``"1..3,8"``."""
    ranks: list[int] = []
    for part in text.split(","):
        part = part.strip()
        m = re.fullmatch(r"(\d+)\.\.(\d+)", part)
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            if lo > hi:
                raise argparse.ArgumentTypeError(f"empty rank range {part!r}")
            ranks.extend(range(lo, hi + 1))
        elif part.isdigit():
            ranks.append(int(part))
        else:
            raise argparse.ArgumentTypeError(f"bad rank list {text!r}")
    if not ranks or min(ranks) < 1:
        raise argparse.ArgumentTypeError("conflict ranks must be >= 1")
    return ranks


def parse_algos(text: str) -> list[str]:
    algos = [a.strip() for a in text.split(",") if a.strip()]
    bad = [a for a in algos if a not in ALGORITHMS]
    if bad or not algos:
        raise argparse.ArgumentTypeError(f"unknown algorithm(s) {bad}; choose from {','.join(ALGORITHMS)}")
    return algos


def read_palette(path: Path) -> list[int]:
    tokens = re.split(r"[\s,]+", path.read_text().strip())
    return [int(t) for t in tokens if t]


def _solver_flags(p: argparse.ArgumentParser) -> None:
    d = SolverParams()
    g = p.add_argument_group("QUBO solvers")
    g.add_argument("--penalty-a", type=float, default=1.0, help="one-hot penalty weight")
    g.add_argument("--penalty-b", type=float, default=1.0, help="edge-conflict penalty weight")
    g.add_argument("--num-reads", type=int, default=d.num_reads)
    g.add_argument("--sweeps", type=int, default=d.sweeps)
    g.add_argument("--beta-min", type=float)
    g.add_argument("--beta-max", type=float)
    g.add_argument("--tabu-tenure", type=int)
    g.add_argument("--tabu-iters", type=int)
    g.add_argument("--max-iters", type=int, default=d.max_iters)
    g.add_argument("--convergence-iters", type=int, default=d.convergence_iters)
    g.add_argument("--max-subproblem-size", type=int, default=d.max_subproblem_size)


def _params(args) -> SolverParams:
    beta = None
    if args.beta_min is not None or args.beta_max is not None:
        if args.beta_min is None or args.beta_max is None:
            raise ValueError("--beta-min and --beta-max go together")
        beta = (args.beta_min, args.beta_max)
    return SolverParams(
        seed=args.seed, num_reads=args.num_reads, sweeps=args.sweeps, beta_range=beta,
        tabu_tenure=args.tabu_tenure, tabu_iters=args.tabu_iters, max_iters=args.max_iters,
        convergence_iters=args.convergence_iters, max_subproblem_size=args.max_subproblem_size,
    )


def _load_cells(path: Path):
    return parse_cells(path.read_text(encoding="utf-8"))


def cmd_color(args) -> int:
    cells = _load_cells(args.cells)
    g = build_conflict_graph(cells, IngestConfig(args.radius, args.rank))
    palette = read_palette(args.palette) if args.palette else list(DEFAULT_PALETTE)
    t0 = time.perf_counter()
    coloring, energy = solve_coloring(
        g, args.algo, args.seed,
        num_colors=args.colors if args.algo in QUBO_ALGORITHMS else None,
        params=_params(args), penalty_a=args.penalty_a, penalty_b=args.penalty_b,
    )
    wall_ms = (time.perf_counter() - t0) * 1e3
    legal = is_legal(g, coloring)
    k = colors_used(coloring)
    log.info("%s: %d cells, %d edges, %d colors, legal=%s, %.1f ms", args.algo, g.num_vertices,
             g.num_edges, k, legal, wall_ms)
    if not legal:
        log.error("coloring is not legal (energy %s); no plan written", energy)
        return 1
    if args.colors is not None and k > args.colors:
        log.error("%s needed %d colors, more than the %d allowed", args.algo, k, args.colors)
        return 1
    plan = make_plan(g, coloring, palette)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "plan.csv").write_text(plan_csv(g, plan))
    print(f"{args.algo}: {k} RSIs for {g.num_vertices} cells -> {args.out / 'plan.csv'}")
    return 0


def cmd_bench(args) -> int:
    cells = _load_cells(args.cells)
    records = run_benchmark(
        cells, args.ranks, args.algos, args.runs, base_seed=args.seed, radius_km=args.radius,
        params=_params(args), num_colors=args.colors, penalty_a=args.penalty_a, penalty_b=args.penalty_b,
    )
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "records.csv").write_text(emit_csv(records, include_timing=not args.no_timing))
    (args.out / "colors.svg").write_text(emit_plot(records, "colors"))
    if not args.no_timing:
        (args.out / "runtime.svg").write_text(emit_plot(records, "runtime"))
    failures = [r for r in records if not r.legal]
    for r in failures:
        log.error("illegal coloring: %s rank=%d run=%d seed=%d", r.algorithm, r.conflict_rank, r.run_index, r.seed)
    print(f"{len(records)} runs, {len(failures)} illegal -> {args.out}")
    return 1 if failures else 0


def cmd_qubo(args) -> int:
    cells = _load_cells(args.cells)
    g = build_conflict_graph(cells, IngestConfig(args.radius, args.rank))
    q = build_qubo(g, args.colors, args.penalty_a, args.penalty_b)
    args.out.write_text(write_qubo(q))
    print(f"M={q.num_vars} ({g.num_vertices} vertices x {args.colors} colors) -> {args.out}")
    return 0


def cmd_synth(args) -> int:
    cells = synthetic_cells(args.n, seed=args.seed, disk_radius_km=args.disk_radius)
    text = format_cells(cells)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rsiplan", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("color", help="assign RSIs to one conflict graph")
    p.add_argument("--cells", type=Path, required=True)
    p.add_argument("--rank", type=int, required=True, help="conflict rank")
    p.add_argument("--radius", type=float, default=2.0, help="neighbour search radius [km]")
    p.add_argument("--algo", choices=ALGORITHMS, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--colors", type=int, help="fixed palette size (QUBO) or color cap (heuristics)")
    p.add_argument("--palette", type=Path, help="file of RSI values, one per color")
    p.add_argument("--out", type=Path, required=True)
    _solver_flags(p)
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("bench", help="sweep conflict ranks over several algorithms")
    p.add_argument("--cells", type=Path, required=True)
    p.add_argument("--ranks", type=parse_ranks, required=True, help="e.g. 1..6 or 2,4,6")
    p.add_argument("--radius", type=float, default=2.0)
    p.add_argument("--algos", type=parse_algos, default=list(ALGORITHMS[:5]))
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--colors", type=int, help="fixed palette for QUBO algorithms")
    p.add_argument("--no-timing", action="store_true", help="blank wall_ms for byte-reproducible CSV")
    p.add_argument("--out", type=Path, required=True)
    _solver_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("qubo", help="export the coloring QUBO as text")
    p.add_argument("--cells", type=Path, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--radius", type=float, default=2.0)
    p.add_argument("--colors", type=int, required=True)
    p.add_argument("--penalty-a", type=float, default=1.0)
    p.add_argument("--penalty-b", type=float, default=1.0)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_qubo)

    p = sub.add_parser("synth", help="write a synthetic three-sector network as cell CSV")
    p.add_argument("-n", type=int, default=200, help="number of cells")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--disk-radius", type=float, default=3.0, help="deployment disk radius [km]")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (CellDataError, InfeasibleStartError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
