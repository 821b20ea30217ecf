"""Reproducible synthetic cell layouts for desk-scale experiments."""

from __future__ import annotations

import math

import numpy as np

from .ingest import EARTH_RADIUS_KM, Cell

SECTOR_BEARINGS = (0.0, 120.0, 240.0)
DEFAULT_CENTER = (60.17, 24.94)


def synthetic_cells(
    n_cells: int,
    seed: int = 0,
    disk_radius_km: float = 3.0,
    channel: int = 1300,
    center: tuple[float, float] = DEFAULT_CENTER,
) -> list[Cell]:
    """Three-sector sites dropped uniformly in a disk, all on one channel.

    Sites are filled sector by sector, so ``n_cells`` not divisible by three
    leaves the last site partially sectorized. Cell ids are ``S<site>-<sector>``.
    """
    if n_cells < 0:
        raise ValueError("n_cells must be non-negative")
    rng = np.random.default_rng(seed)
    n_sites = math.ceil(n_cells / len(SECTOR_BEARINGS))
    r = disk_radius_km * np.sqrt(rng.random(n_sites))
    theta = 2 * math.pi * rng.random(n_sites)
    # local equirectangular offsets are plenty at a few km
    dlat = np.degrees(r * np.cos(theta) / EARTH_RADIUS_KM)
    dlon = np.degrees(r * np.sin(theta) / (EARTH_RADIUS_KM * math.cos(math.radians(center[0]))))
    width = len(str(max(n_sites - 1, 0)))
    cells = []
    for k in range(n_cells):
        site, sector = divmod(k, len(SECTOR_BEARINGS))
        cells.append(Cell(
            cell_id=f"S{site:0{width}d}-{sector}",
            latitude=round(center[0] + float(dlat[site]), 7),
            longitude=round(center[1] + float(dlon[site]), 7),
            bearing=SECTOR_BEARINGS[sector],
            channel=channel,
        ))
    return cells
