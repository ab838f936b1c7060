"""Agent-centered model inputs: local occupancy grid and angular pedestrian grid.

Both encodings share one convention: they are centered at the query agent's
position and aligned with its heading, so the model never sees absolute
position or heading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import AgentState, WorldMap, WorldState, rotation

# Coincident pedestrians (possible in noisy tracking data) get this distance
# so grid values stay strictly positive.
MIN_PEDESTRIAN_DISTANCE = 0.01


@dataclass(frozen=True)
class LocalGrid:
    """Heading-aligned occupancy extract; cells[ix, iy], x-axis = heading."""

    cells: np.ndarray
    resolution: float
    extent: float

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=np.float64)
        if cells.ndim != 2 or cells.shape[0] != cells.shape[1]:
            raise ValueError("local grid must be square")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def n_cells(self) -> int:
        return self.cells.shape[0]


@dataclass(frozen=True)
class ApgVector:
    """Per-cone clipped distance to the nearest other pedestrian.

    values[k] covers polar angles [k, k+1) * 2*pi/K in the query agent's
    heading frame; cones without pedestrians hold r_max.
    """

    values: np.ndarray
    r_max: float
    k: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.k,):
            raise ValueError(f"expected {self.k} cone values, got {values.shape}")
        if np.any(values <= 0.0) or np.any(values > self.r_max):
            raise ValueError("cone values must lie in (0, r_max]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def normalized(self) -> np.ndarray:
        """Values scaled to (0, 1] for network input."""
        return self.values / self.r_max


def local_cell_offsets(extent: float, resolution: float) -> np.ndarray:
    """Signed cell-center offsets along one local axis; center cell at 0."""
    ratio = extent / resolution
    n = round(ratio)
    if abs(ratio - n) > 1e-9:
        raise ValueError("grid extent must be an integer multiple of the resolution")
    return (np.arange(n) - n // 2) * resolution


def extract_local_grid(world_map: WorldMap, agent: AgentState, extent: float = 6.0,
                       resolution: float = 0.1) -> LocalGrid:
    """Sample the world map at heading-aligned cell centers around the agent.

    Nearest-neighbor lookup of each cell center; points outside the map are
    treated as occupied.
    """
    offsets = local_cell_offsets(extent, resolution)
    n = offsets.size
    lx, ly = np.meshgrid(offsets, offsets, indexing="ij")
    local = np.stack([lx.ravel(), ly.ravel()], axis=1)
    world = local @ rotation(agent.heading).T + agent.position
    occ = world_map.occupancy_at(world, outside=1.0)
    return LocalGrid(occ.reshape(n, n), resolution=resolution, extent=extent)


def build_apg(world: WorldState, query_id: int, k: int = 72, r_max: float = 6.0) -> ApgVector:
    """Angular pedestrian grid of the query agent from a world snapshot."""
    query = world.agent(query_id)  # raises for unknown ids
    values = np.full(k, r_max, dtype=np.float64)
    others = world.others(query_id)
    if others:
        rel = np.array([o.position for o in others]) - query.position
        # elementwise rotation into the heading frame (no matmul, so the
        # arithmetic is reproducible per agent regardless of batching)
        c, s = math.cos(query.heading), math.sin(query.heading)
        lx = c * rel[:, 0] + s * rel[:, 1]
        ly = c * rel[:, 1] - s * rel[:, 0]
        rho = np.maximum(np.sqrt(lx * lx + ly * ly), MIN_PEDESTRIAN_DISTANCE)
        phi = np.mod(np.arctan2(ly, lx), 2.0 * math.pi)
        cone = np.minimum(np.floor(phi * (k / (2.0 * math.pi))).astype(np.int64), k - 1)
        clipped = np.minimum(rho, r_max)
        np.minimum.at(values, cone, clipped)
    return ApgVector(values, r_max=r_max, k=k)
