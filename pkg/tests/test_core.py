import math

import numpy as np
import pytest

from pedpredict.core import (
    AgentState,
    Dataset,
    Trajectory,
    WorldMap,
    WorldState,
    agent_to_world_frame,
    update_heading,
    world_to_agent_frame,
    wrap_angle,
)


def agent(pos=(0.0, 0.0), heading=0.0, vel=(0.0, 0.0), aid=0):
    return AgentState(id=aid, position=np.array(pos), velocity=np.array(vel), heading=heading)


class TestFrames:
    def test_origin_maps_to_origin(self):
        for h in (0.0, 0.7, -2.0, 3.0):
            a = agent(pos=(2.0, -1.0), heading=h)
            assert np.allclose(world_to_agent_frame(a.position, a), [0.0, 0.0])

    def test_identity_frame(self):
        a = agent()
        assert np.allclose(world_to_agent_frame([1.0, 0.0], a), [1.0, 0.0])

    def test_rotated_query(self):
        # rotation by -pi/2 applied by hand: (0, 1) -> (1, 0)
        a = agent(heading=math.pi / 2)
        assert np.allclose(world_to_agent_frame([0.0, 1.0], a), [1.0, 0.0], atol=1e-12)

    def test_agent_to_world_trivials(self):
        a = agent(pos=(2.0, 3.0))
        assert np.allclose(agent_to_world_frame([0.0, 0.0], a), [2.0, 3.0])
        assert np.allclose(agent_to_world_frame([1.0, 0.0], a), [3.0, 3.0])

    def test_agent_to_world_rotated(self):
        # rotation by +pi/2 by hand: (1, 0) -> (0, 1)
        a = agent(heading=math.pi / 2)
        assert np.allclose(agent_to_world_frame([1.0, 0.0], a), [0.0, 1.0], atol=1e-12)

    def test_round_trip_random(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            a = agent(pos=rng.normal(size=2) * 10, heading=rng.uniform(-np.pi, np.pi))
            p = rng.normal(size=2) * 10
            back = agent_to_world_frame(world_to_agent_frame(p, a), a)
            assert np.linalg.norm(back - p) < 1e-9

    def test_distance_preservation(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            a = agent(pos=rng.normal(size=2) * 5, heading=rng.uniform(-np.pi, np.pi))
            p, q = rng.normal(size=2) * 8, rng.normal(size=2) * 8
            d_world = np.linalg.norm(p - q)
            d_local = np.linalg.norm(world_to_agent_frame(p, a) - world_to_agent_frame(q, a))
            assert abs(d_world - d_local) < 1e-9


class TestHeading:
    def test_moving_agent(self):
        assert update_heading(0.3, np.array([1.0, 0.0])) == 0.0

    def test_speed_below_threshold_keeps_heading(self):
        assert update_heading(0.3, np.array([0.0, 0.0])) == 0.3
        assert update_heading(-1.2, np.array([0.03, 0.03])) == -1.2

    def test_diagonal(self):
        assert abs(update_heading(0.0, np.array([1.0, 1.0])) - math.pi / 4) < 1e-12

    def test_wrap_angle_range(self):
        for a in np.linspace(-10, 10, 101):
            w = wrap_angle(a)
            assert -math.pi <= w < math.pi
            assert abs(math.remainder(w - a, 2 * math.pi)) < 1e-9


class TestTypes:
    def test_agent_state_heading_wrapped(self):
        a = agent(heading=3 * math.pi / 2)
        assert -math.pi <= a.heading < math.pi

    def test_world_state_unique_ids(self):
        with pytest.raises(ValueError):
            WorldState(0, (agent(aid=1), agent(aid=1)))

    def test_world_state_lookup(self):
        w = WorldState(0, (agent(aid=1), agent(aid=2, pos=(1, 1))))
        assert w.agent(2).position[0] == 1.0
        assert len(w.others(2)) == 1
        with pytest.raises(KeyError):
            w.agent(99)

    def test_world_map_invariants(self):
        with pytest.raises(ValueError):
            WorldMap(np.zeros(2), 0.0, np.zeros((2, 2)))
        with pytest.raises(ValueError):
            WorldMap(np.zeros(2), 0.1, np.full((2, 2), 0.5))

    def test_world_map_lookup(self):
        cells = np.zeros((4, 6), dtype=np.uint8)
        cells[1, 2] = 1  # iy=1, ix=2
        m = WorldMap(np.array([0.0, 0.0]), 0.5, cells)
        assert m.width == 6 and m.height == 4
        assert m.is_occupied_point([1.25, 0.75])
        assert not m.is_occupied_point([0.25, 0.25])
        assert m.is_occupied_point([100.0, 0.0])  # out of bounds
        assert np.allclose(m.cell_center(2, 1), [1.25, 0.75])
        assert m.occupied_centers.shape == (1, 2)

    def test_dataset_dt_mismatch(self):
        m = WorldMap(np.zeros(2), 0.5, np.zeros((2, 2)))
        tr = Trajectory(0, (agent(),), dt=0.4)
        with pytest.raises(ValueError):
            Dataset(m, (tr,), dt=0.3)

    def test_dataset_world_at(self):
        m = WorldMap(np.zeros(2), 0.5, np.zeros((2, 2)))
        t1 = Trajectory(0, (agent(aid=0), agent(aid=0, pos=(1, 0))), dt=0.3, start_index=0)
        t2 = Trajectory(1, (agent(aid=1),), dt=0.3, start_index=1)
        d = Dataset(m, (t1, t2), dt=0.3)
        assert len(d.world_at(0).agents) == 1
        assert len(d.world_at(1).agents) == 2
        assert d.time_indices() == [0, 1]
