"""Cell-site ingestion and conflict-graph construction.

Cells within a search radius on the same frequency channel are ranked by the
cost of an RSI conflict with the source cell; each cell links to its top
``conflict_rank`` candidates and the union of those links is the undirected
conflict graph.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .graph import ConflictGraph

EARTH_RADIUS_KM = 6371.0
NUM_ROOT_SEQUENCES = 838
MAX_RSI = NUM_ROOT_SEQUENCES - 1

# keeps the inverse-distance term finite for sites a few metres apart
DISTANCE_REGULARIZER_KM = 0.01
COINCIDENT_KM = 1e-9
# co-located sectors: both antennas fully aligned at zero range
COSITED_COST = 2.0 / DISTANCE_REGULARIZER_KM

CSV_HEADER = ("cell_id", "lat", "lon", "bearing_deg", "channel", "rsi")


class CellDataError(ValueError):
    """Malformed or inconsistent cell-site data."""


@dataclass(frozen=True)
class Cell:
    cell_id: str
    latitude: float
    longitude: float
    bearing: float
    channel: int
    rsi: Optional[int] = None

    def __post_init__(self):
        if not self.cell_id:
            raise CellDataError("cell_id must be non-empty")
        if not -90.0 <= self.latitude <= 90.0:
            raise CellDataError(f"{self.cell_id}: latitude {self.latitude} outside [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise CellDataError(f"{self.cell_id}: longitude {self.longitude} outside [-180, 180]")
        if not math.isfinite(self.bearing):
            raise CellDataError(f"{self.cell_id}: bearing must be finite")
        b = self.bearing % 360.0
        # -1e-17 % 360 rounds to 360.0
        object.__setattr__(self, "bearing", 0.0 if b >= 360.0 else b)
        if self.channel < 0:
            raise CellDataError(f"{self.cell_id}: channel must be non-negative")
        if self.rsi is not None and not 0 <= self.rsi <= MAX_RSI:
            raise CellDataError(f"{self.cell_id}: rsi {self.rsi} outside [0, {MAX_RSI}]")

    @property
    def position(self) -> tuple[float, float]:
        return (self.latitude, self.longitude)


@dataclass(frozen=True)
class IngestConfig:
    radius_km: float
    conflict_rank: int

    def __post_init__(self):
        if not self.radius_km > 0:
            raise ValueError("radius_km must be positive")
        if self.conflict_rank < 1:
            raise ValueError("conflict_rank must be >= 1")


def _parse_float(s: str, what: str, lineno: int) -> float:
    try:
        value = float(s)
    except ValueError:
        raise CellDataError(f"line {lineno}: cannot parse {what} {s!r}") from None
    if not math.isfinite(value):
        raise CellDataError(f"line {lineno}: {what} must be finite, got {s!r}")
    return value


def _parse_int(s: str, what: str, lineno: int) -> int:
    try:
        return int(s)
    except ValueError:
        raise CellDataError(f"line {lineno}: cannot parse {what} {s!r}") from None


def parse_cells(text: str) -> list[Cell]:
    """Parse the ``cell_id,lat,lon,bearing_deg,channel,rsi`` CSV format.

    Errors carry the 1-based line number of the offending row.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise CellDataError("missing header row") from None
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise CellDataError(f"line 1: expected header {','.join(CSV_HEADER)!r}")

    cells: list[Cell] = []
    seen: set[str] = set()
    for row in reader:
        lineno = reader.line_num
        if not row or all(not f.strip() for f in row):
            continue
        if len(row) != len(CSV_HEADER):
            raise CellDataError(f"line {lineno}: expected {len(CSV_HEADER)} columns, got {len(row)}")
        cell_id, lat, lon, bearing, channel, rsi = (f.strip() for f in row)
        if cell_id in seen:
            raise CellDataError(f"line {lineno}: duplicate cell_id {cell_id!r}")
        try:
            cell = Cell(
                cell_id=cell_id,
                latitude=_parse_float(lat, "lat", lineno),
                longitude=_parse_float(lon, "lon", lineno),
                bearing=_parse_float(bearing, "bearing_deg", lineno),
                channel=_parse_int(channel, "channel", lineno),
                rsi=_parse_int(rsi, "rsi", lineno) if rsi else None,
            )
        except CellDataError as exc:
            msg = str(exc)
            raise CellDataError(msg if msg.startswith("line ") else f"line {lineno}: {msg}") from None
        seen.add(cell_id)
        cells.append(cell)
    return cells


def format_cells(cells: Sequence[Cell]) -> str:
    """Serialize cells back to the ingest CSV format."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for c in cells:
        w.writerow([c.cell_id, repr(c.latitude), repr(c.longitude), repr(c.bearing), c.channel,
                    "" if c.rsi is None else c.rsi])
    return buf.getvalue()


def great_circle_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Haversine distance in km between two ``(lat, lon)`` points in degrees."""
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    h = math.sin((lat2 - lat1) / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def _great_circle_km_many(a: tuple[float, float], lats: np.ndarray, lons: np.ndarray) -> np.ndarray:
    lat1, lon1 = np.radians(a[0]), np.radians(a[1])
    lat2, lon2 = np.radians(lats), np.radians(lons)
    h = np.sin((lat2 - lat1) / 2) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2) ** 2
    return 2 * EARTH_RADIUS_KM * np.arcsin(np.minimum(1.0, np.sqrt(h)))


def initial_bearing_deg(start: tuple[float, float], end: tuple[float, float]) -> float:
    """Initial great-circle bearing from ``start`` to ``end``, clockwise from north."""
    if great_circle_km(start, end) <= COINCIDENT_KM:
        raise ValueError("bearing between coincident points is undefined")
    lat1, lon1 = map(math.radians, start)
    lat2, lon2 = map(math.radians, end)
    dlon = lon2 - lon1
    y = math.sin(dlon) * math.cos(lat2)
    x = math.cos(lat1) * math.sin(lat2) - math.sin(lat1) * math.cos(lat2) * math.cos(dlon)
    deg = math.degrees(math.atan2(y, x)) % 360.0
    return 0.0 if deg >= 360.0 else deg


def _alignment(src: Cell, dst: Cell) -> float:
    offset = math.radians(initial_bearing_deg(src.position, dst.position) - src.bearing)
    return max(0.0, math.cos(offset))


def conflict_cost(a: Cell, b: Cell) -> float:
    """RSI conflict cost of a cell pair: mutual main-lobe alignment over distance.

    ``(align(a->b) + align(b->a)) / (d_km + 0.01)`` where ``align`` is the
    clamped cosine of the angle between a cell's antenna bearing and the
    direction towards the other cell.
    """
    if a.cell_id == b.cell_id:
        raise ValueError("conflict cost of a cell with itself is undefined")
    d = great_circle_km(a.position, b.position)
    if d <= COINCIDENT_KM:
        raise ValueError(f"cells {a.cell_id} and {b.cell_id} are coincident")
    return (_alignment(a, b) + _alignment(b, a)) / (d + DISTANCE_REGULARIZER_KM)


def rank_candidates(cells: Sequence[Cell], source: int, radius_km: float) -> list[tuple[int, float, float]]:
    """Same-channel cells within ``radius_km`` of ``cells[source]``, highest cost first.

    Returns ``(index, cost, distance_km)`` tuples. Co-located cells get
    :data:`COSITED_COST`. Ties fall back to distance, then cell id.
    """
    lats = np.fromiter((c.latitude for c in cells), float, len(cells))
    lons = np.fromiter((c.longitude for c in cells), float, len(cells))
    return _rank_from_arrays(cells, source, radius_km, lats, lons)


def _rank_from_arrays(cells, source, radius_km, lats, lons):
    src = cells[source]
    dist = _great_circle_km_many(src.position, lats, lons)
    ranked = []
    for j in np.flatnonzero(dist <= radius_km):
        j = int(j)
        other = cells[j]
        if j == source or other.channel != src.channel:
            continue
        d = great_circle_km(src.position, other.position)
        if d > radius_km:
            continue
        cost = COSITED_COST if d <= COINCIDENT_KM else conflict_cost(src, other)
        ranked.append((j, cost, d))
    ranked.sort(key=lambda t: (-t[1], t[2], cells[t[0]].cell_id))
    return ranked


def build_conflict_graph(cells: Sequence[Cell], cfg: IngestConfig) -> ConflictGraph:
    """Union over all source cells of links to their top-ranked candidates."""
    ids = [c.cell_id for c in cells]
    if len(set(ids)) != len(ids):
        raise CellDataError("duplicate cell_id in cell list")
    lats = np.fromiter((c.latitude for c in cells), float, len(cells))
    lons = np.fromiter((c.longitude for c in cells), float, len(cells))
    weights: dict[tuple[int, int], float] = {}
    for i in range(len(cells)):
        for j, cost, _ in _rank_from_arrays(cells, i, cfg.radius_km, lats, lons)[: cfg.conflict_rank]:
            weights[(min(i, j), max(i, j))] = cost
    return ConflictGraph.from_edges(len(cells), weights.keys(), labels=ids, weights=weights)
