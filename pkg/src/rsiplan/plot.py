"""Dependency-free SVG line charts of benchmark records."""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Sequence
from xml.sax.saxutils import escape

from .bench import BenchmarkRecord

WIDTH, HEIGHT = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 40, 50
SERIES_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")
LOG_RATIO = 100.0
KINDS = ("colors", "runtime")


def aggregate(records: Sequence[BenchmarkRecord], kind: str) -> dict[str, list[tuple[int, float]]]:
    """Per-algorithm ``(rank, mean)`` series over legal records."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    groups: dict[tuple[str, int], list[float]] = defaultdict(list)
    for r in records:
        if not r.legal:
            continue
        value = r.colors_used if kind == "colors" else r.wall_time_ms
        if value is None:
            continue
        groups[(r.algorithm, r.conflict_rank)].append(float(value))
    series: dict[str, list[tuple[int, float]]] = defaultdict(list)
    for (algo, rank), vals in sorted(groups.items()):
        series[algo].append((rank, sum(vals) / len(vals)))
    return dict(series)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def emit_plot(records: Sequence[BenchmarkRecord], kind: str = "colors") -> str:
    """Line chart of mean colors or mean wall time against conflict rank.

    Runtime charts switch to a log10 y axis when the means span more than a
    factor of 100.
    """
    if not records:
        raise ValueError("no records to plot")
    series = aggregate(records, kind)
    if not series:
        raise ValueError("no legal records with values to plot")
    xs = sorted({x for pts in series.values() for x, _ in pts})
    ys = [y for pts in series.values() for _, y in pts]
    positive = [y for y in ys if y > 0]
    log_y = kind == "runtime" and positive and max(positive) / min(positive) > LOG_RATIO

    if log_y:
        floor = min(positive)
        tf = lambda y: math.log10(max(y, floor))
    else:
        tf = lambda y: y
    t_ys = [tf(y) for y in ys]
    y_lo, y_hi = min(t_ys), max(t_ys)
    if not log_y:
        y_lo = min(0.0, y_lo)
    if y_hi - y_lo < 1e-12:
        y_hi = y_lo + 1.0
    x_lo, x_hi = xs[0], xs[-1]
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1, x_hi + 1

    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    px = lambda x: LEFT + (x - x_lo) / (x_hi - x_lo) * pw
    py = lambda t: TOP + ph - (t - y_lo) / (y_hi - y_lo) * ph

    title = "Mean RSIs required" if kind == "colors" else "Mean run time"
    y_label = "colors" if kind == "colors" else ("wall time [ms, log10]" if log_y else "wall time [ms]")
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="22" text-anchor="middle" font-family="sans-serif" font-size="15">{title}</text>',
        f'<line x1="{LEFT}" y1="{TOP + ph}" x2="{LEFT + pw}" y2="{TOP + ph}" stroke="black"/>',
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + ph}" stroke="black"/>',
    ]
    for x in xs:
        out.append(f'<text x="{_fmt(px(x))}" y="{TOP + ph + 18}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{x}</text>')
    for t in _ticks(y_lo, y_hi):
        label = f"{10 ** t:.3g}" if log_y else f"{t:.3g}"
        out.append(f'<text x="{LEFT - 6}" y="{_fmt(py(t) + 4)}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{label}</text>')
        out.append(f'<line x1="{LEFT}" y1="{_fmt(py(t))}" x2="{LEFT + pw}" y2="{_fmt(py(t))}" '
                   f'stroke="#dddddd"/>')
    out.append(f'<text x="{LEFT + pw / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">conflict rank</text>')
    out.append(f'<text x="16" y="{TOP + ph / 2:.0f}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="12" transform="rotate(-90 16 {TOP + ph / 2:.0f})">{y_label}</text>')

    for k, (algo, pts) in enumerate(sorted(series.items())):
        color = SERIES_COLORS[k % len(SERIES_COLORS)]
        coords = " ".join(f"{_fmt(px(x))},{_fmt(py(tf(y)))}" for x, y in pts)
        out.append(f'<polyline class="series" data-algorithm="{escape(algo)}" fill="none" '
                   f'stroke="{color}" stroke-width="2" points="{coords}"/>')
        ly = TOP + 10 + 18 * k
        out.append(f'<line x1="{LEFT + pw + 15}" y1="{ly}" x2="{LEFT + pw + 40}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{LEFT + pw + 46}" y="{ly + 4}" font-family="sans-serif" '
                   f'font-size="12">{escape(algo.upper())}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
