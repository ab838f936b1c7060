"""Shared geometry and state types: agents, world snapshots, occupancy maps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

# Below this speed the heading is held instead of recomputed from velocity,
# which would otherwise flicker for near-stationary agents.
V_EPS = 0.05


def wrap_angle(angle: float) -> float:
    """Wrap an angle into [-pi, pi)."""
    a = math.remainder(angle, 2.0 * math.pi)
    if a >= math.pi:
        a -= 2.0 * math.pi
    return a


def update_heading(previous_heading: float, velocity) -> float:
    """New heading from velocity; keeps the previous one below V_EPS speed."""
    vx, vy = float(velocity[0]), float(velocity[1])
    if math.hypot(vx, vy) > V_EPS:
        return wrap_angle(math.atan2(vy, vx))
    return previous_heading


def _readonly(a, shape=None) -> np.ndarray:
    out = np.array(a, dtype=np.float64)
    if shape is not None and out.shape != shape:
        raise ValueError(f"expected shape {shape}, got {out.shape}")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class AgentState:
    """One pedestrian at one timestep: world-frame position, velocity, heading."""

    id: int
    position: np.ndarray
    velocity: np.ndarray
    heading: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position", _readonly(self.position, (2,)))
        object.__setattr__(self, "velocity", _readonly(self.velocity, (2,)))
        object.__setattr__(self, "heading", wrap_angle(float(self.heading)))

    @property
    def speed(self) -> float:
        return float(np.hypot(self.velocity[0], self.velocity[1]))


@dataclass(frozen=True)
class WorldState:
    """Snapshot of every tracked pedestrian at one time index."""

    time_index: int
    agents: tuple[AgentState, ...]

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        ids = [a.id for a in self.agents]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate agent ids in world state")

    def agent(self, agent_id: int) -> AgentState:
        for a in self.agents:
            if a.id == agent_id:
                return a
        raise KeyError(f"agent {agent_id} not in world state")

    def others(self, agent_id: int) -> tuple[AgentState, ...]:
        return tuple(a for a in self.agents if a.id != agent_id)


@dataclass(frozen=True)
class WorldMap:
    """Global static occupancy grid; cells indexed [iy, ix], 1 = occupied."""

    origin: np.ndarray
    resolution: float
    cells: np.ndarray

    def __post_init__(self):
        if self.resolution <= 0:
            raise ValueError("map resolution must be positive")
        object.__setattr__(self, "origin", _readonly(self.origin, (2,)))
        cells = np.asarray(self.cells)
        if cells.ndim != 2:
            raise ValueError("map cells must be a 2-D grid")
        if not np.all((cells == 0) | (cells == 1)):
            raise ValueError("map cells must be exactly 0 or 1")
        cells = cells.astype(np.uint8)
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    def indices_of(self, points) -> tuple[np.ndarray, np.ndarray]:
        """Cell indices (ix, iy) of world points; may fall outside the grid."""
        p = np.atleast_2d(np.asarray(points, dtype=np.float64))
        ix = np.floor((p[:, 0] - self.origin[0]) / self.resolution).astype(np.int64)
        iy = np.floor((p[:, 1] - self.origin[1]) / self.resolution).astype(np.int64)
        return ix, iy

    def cell_center(self, ix: int, iy: int) -> np.ndarray:
        return self.origin + (np.array([ix, iy], dtype=np.float64) + 0.5) * self.resolution

    def occupancy_at(self, points, outside: float = 1.0) -> np.ndarray:
        """Occupancy of each world point; out-of-bounds points report `outside`."""
        p = np.atleast_2d(np.asarray(points, dtype=np.float64))
        ix, iy = self.indices_of(p)
        inb = (ix >= 0) & (ix < self.width) & (iy >= 0) & (iy < self.height)
        out = np.full(p.shape[0], outside, dtype=np.float64)
        out[inb] = self.cells[iy[inb], ix[inb]]
        return out

    def is_occupied_point(self, point, outside: bool = True) -> bool:
        return bool(self.occupancy_at(np.asarray(point)[None, :], outside=float(outside))[0] > 0.5)

    @cached_property
    def occupied_centers(self) -> np.ndarray:
        """World coordinates of all occupied cell centers, shape (M, 2)."""
        iy, ix = np.nonzero(self.cells)
        return self.origin + (np.stack([ix, iy], axis=1) + 0.5) * self.resolution

    @cached_property
    def n_free_cells(self) -> int:
        return int(self.cells.size - np.count_nonzero(self.cells))

    @property
    def size_m(self) -> tuple[float, float]:
        return self.width * self.resolution, self.height * self.resolution


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered state samples of one agent at a fixed sampling period."""

    agent_id: int
    samples: tuple[AgentState, ...]
    dt: float
    start_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        if self.dt <= 0:
            raise ValueError("trajectory dt must be positive")

    def __len__(self) -> int:
        return len(self.samples)

    def positions(self) -> np.ndarray:
        return np.array([s.position for s in self.samples], dtype=np.float64)

    def velocities(self) -> np.ndarray:
        return np.array([s.velocity for s in self.samples], dtype=np.float64)

    def headings(self) -> np.ndarray:
        return np.array([s.heading for s in self.samples], dtype=np.float64)


@dataclass(frozen=True)
class Dataset:
    """Per-agent trajectories over a shared map at a common sampling period."""

    map: WorldMap
    trajectories: tuple[Trajectory, ...]
    dt: float

    def __post_init__(self):
        object.__setattr__(self, "trajectories", tuple(self.trajectories))
        for tr in self.trajectories:
            if tr.dt != self.dt:
                raise ValueError("trajectory dt differs from dataset dt")

    @cached_property
    def _by_time(self) -> dict[int, list[tuple[Trajectory, int]]]:
        index: dict[int, list[tuple[Trajectory, int]]] = {}
        for tr in self.trajectories:
            for k in range(len(tr)):
                index.setdefault(tr.start_index + k, []).append((tr, k))
        return index

    def time_indices(self) -> list[int]:
        return sorted(self._by_time)

    def world_at(self, time_index: int) -> WorldState:
        entries = self._by_time.get(time_index, [])
        return WorldState(time_index, tuple(tr.samples[k] for tr, k in entries))


def rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=np.float64)


def world_to_agent_frame(p_world, agent: AgentState) -> np.ndarray:
    """Express a world point in the agent-centered, heading-aligned frame."""
    d = np.asarray(p_world, dtype=np.float64) - agent.position
    return rotation(-agent.heading) @ d


def agent_to_world_frame(p_local, agent: AgentState) -> np.ndarray:
    """Inverse of world_to_agent_frame."""
    return rotation(agent.heading) @ np.asarray(p_local, dtype=np.float64) + agent.position


def rotate_world_to_agent(v_world, heading: float) -> np.ndarray:
    """Rotate a world-frame vector (e.g. a velocity) into the heading frame."""
    return rotation(-heading) @ np.asarray(v_world, dtype=np.float64)


def rotate_agent_to_world(v_local, heading: float) -> np.ndarray:
    return rotation(heading) @ np.asarray(v_local, dtype=np.float64)
