"""World mechanics: wrapping, movement, collection, respawn scheduling, spawning."""
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from forager.config import validate_config
from forager.env import ForagerEnv
from forager.presets import get_preset
from forager.world import EMPTY, WALL, WorldState, wrap_position


def make_config(**overrides):
    data = {
        "world": {"width": 15, "height": 15},
        "species": [
            {
                "name": "berry",
                "color": [200, 30, 30],
                "spawn": {"kind": "count", "n": 5},
                "respawn": {"delay": {"kind": "fixed", "steps": 3}, "placement": "random"},
            }
        ],
        "schedule": {"kind": "static", "values": {"berry": 1.0}},
        "observation": {"fov": 5},
    }
    data.update(overrides)
    return validate_config(data)


# -- wrap ---------------------------------------------------------------------

def test_wrap_up_from_origin():
    assert wrap_position(0, 0, 0, -1, 15, 15) == (0, 14)


def test_wrap_identity():
    assert wrap_position(7, 7, 0, 0, 15, 15) == (7, 7)


def test_wrap_right_edge():
    assert wrap_position(14, 3, 1, 0, 15, 15) == (0, 3)


@given(
    x=st.integers(0, 19), y=st.integers(0, 11),
    dx=st.integers(-40, 40), dy=st.integers(-40, 40),
)
def test_wrap_round_trip(x, y, dx, dy):
    nx, ny = wrap_position(x, y, dx, dy, 20, 12)
    assert wrap_position(nx, ny, -dx, -dy, 20, 12) == (x, y)
    assert 0 <= nx < 20 and 0 <= ny < 12


# -- movement & collection ------------------------------------------------------

def test_collect_moves_agent_and_empties_cell():
    cfg = make_config(
        agent={"start": [1, 1]},
        species=[{
            "name": "morel", "color": [101, 67, 33],
            "spawn": {"kind": "explicit", "cells": [[1, 0]]},
            "respawn": {"delay": {"kind": "fixed", "steps": 50}, "placement": "original"},
        }],
        schedule={"kind": "static", "values": {"morel": 30.0}},
    )
    env = ForagerEnv(cfg, seed=0)
    _, reward, info = env.step(0)  # up, onto the object
    assert env.agent_pos == (1, 0)
    assert reward == 30.0
    assert info["collected"] == 0
    assert env.world.grid[0, 1] == EMPTY
    assert env.world.consumption_counts[0] == 1
    assert env.world.queue_length() == 1


def test_wall_blocks_and_collects_nothing():
    cfg = make_config(agent={"start": [1, 1]}, walls=[[1, 0]])
    env = ForagerEnv(cfg, seed=0)
    _, reward, info = env.step(0)
    assert env.agent_pos == (1, 1)
    assert reward == 0.0
    assert info["collected"] is None


def test_wrap_move_into_empty():
    cfg = make_config(
        world={"width": 20, "height": 20},
        agent={"start": [0, 5]},
        species=[{
            "name": "berry", "color": [200, 30, 30],
            "spawn": {"kind": "count", "n": 0},
        }],
    )
    env = ForagerEnv(cfg, seed=0)
    _, reward, info = env.step(2)  # left wraps to x=19
    assert env.agent_pos == (19, 5)
    assert reward == 0.0 and info["collected"] is None


def test_blocking_species_acts_like_wall():
    cfg = make_config(
        agent={"start": [1, 1]},
        species=[
            {
                "name": "boulder", "color": [90, 90, 90], "blocking": True,
                "spawn": {"kind": "explicit", "cells": [[1, 0]]},
            },
        ],
        schedule={"kind": "static", "values": {}},
    )
    env = ForagerEnv(cfg, seed=0)
    _, reward, _ = env.step(0)
    assert env.agent_pos == (1, 1)
    assert reward == 0.0
    assert env.world.grid[0, 1] == 1


# -- respawn scheduling ----------------------------------------------------------

def test_original_respawn_restores_cell():
    cfg = make_config(
        agent={"start": [1, 1]},
        species=[{
            "name": "morel", "color": [101, 67, 33],
            "spawn": {"kind": "explicit", "cells": [[1, 0]]},
            "respawn": {"delay": {"kind": "fixed", "steps": 10}, "placement": "original"},
        }],
        schedule={"kind": "static", "values": {"morel": 30.0}},
    )
    env = ForagerEnv(cfg, seed=0)
    env.step(0)  # collect at tick 0 -> due at tick 10
    env.step(1)  # move away
    for _ in range(7):
        env.step(1)
        assert env.world.grid[0, 1] == EMPTY
    _, _, info = env.step(1)  # advances to tick 10
    assert env.tick == 10
    assert env.world.grid[0, 1] == 1
    assert info["respawned"] == [(1, 1, 0)]
    assert env.world.queue_length() == 0


def test_respawn_deferred_while_agent_parks_on_cell():
    # 2x1 world: up is a self-loop, so the agent can park on the spawn cell.
    cfg = make_config(
        world={"width": 2, "height": 1},
        agent={"start": [0, 0]},
        species=[{
            "name": "berry", "color": [200, 30, 30],
            "spawn": {"kind": "explicit", "cells": [[1, 0]]},
            "respawn": {"delay": {"kind": "fixed", "steps": 2}, "placement": "original"},
        }],
        observation={"fov": 1},
    )
    env = ForagerEnv(cfg, seed=0)
    env.step(3)  # collect at tick 0, park on (1, 0); due tick 2
    for _ in range(5):  # ticks 2..6: event defers every step
        env.step(0)
        assert env.world.grid[0, 1] == EMPTY
        assert env.world.queue_length() == 1
    env.step(2)  # step off; tick 7 processes the deferred event
    assert env.world.grid[0, 1] == 1
    assert env.world.queue_length() == 0


def test_uniform_delay_draws_cover_range():
    cfg = make_config(
        world={"width": 2, "height": 1},
        agent={"start": [0, 0]},
        species=[{
            "name": "berry", "color": [200, 30, 30],
            "spawn": {"kind": "explicit", "cells": [[1, 0]]},
            "respawn": {"delay": {"kind": "uniform", "lo": 9, "hi": 11}, "placement": "original"},
        }],
        observation={"fov": 1},
    )
    env = ForagerEnv(cfg, seed=0)
    delays = []
    # Collect, walk off, wait for the berry to come back, repeat.
    for _ in range(40):
        _, r, info = env.step(3) if env.agent_pos == (0, 0) else env.step(2)
        assert r == 1.0
        collect_tick = env.tick - 1
        env.step(2) if env.agent_pos == (1, 0) else env.step(3)
        while env.world.grid[0, 0] == EMPTY and env.world.grid[0, 1] == EMPTY:
            env.step(0)  # park in place (up is a self-loop)
        delays.append(env.tick - collect_tick)
    assert set(delays) == {9, 10, 11}


def test_random_respawn_defers_when_region_full():
    # Two cells, both occupied after respawn is due -> defer until one frees up.
    cfg = make_config(
        world={"width": 3, "height": 1},
        agent={"start": [0, 0]},
        species=[{
            "name": "berry", "color": [200, 30, 30],
            "spawn": {"kind": "explicit", "cells": [[1, 0], [2, 0]]},
            "respawn": {"delay": {"kind": "fixed", "steps": 1}, "placement": "random"},
        }],
        observation={"fov": 1},
    )
    env = ForagerEnv(cfg, seed=0)
    # Collect (1,0): agent now on it; the only empty non-agent cell is (0,0).
    env.step(3)
    assert env.world.grid[0, 0] == 1
    assert env.world.queue_length() == 0


# -- initial spawning -------------------------------------------------------------

def test_density_spawn_statistics():
    cfg = make_config(
        world={"width": 200, "height": 200},
        species=[
            {"name": "a", "color": [200, 30, 30], "spawn": {"kind": "density", "p": 0.1}},
            {"name": "b", "color": [30, 200, 30], "spawn": {"kind": "density", "p": 0.1}},
        ],
        schedule={"kind": "static", "values": {"a": 1.0, "b": -1.0}},
    )
    env = ForagerEnv(cfg, seed=7)
    n_a = env.world.object_count(0)
    n_b = env.world.object_count(1)
    cells = 200 * 200
    assert abs(n_a - 0.1 * cells) < 0.01 * cells
    # b loses contested cells to a (declaration order): expected 0.9 * 0.1.
    assert abs(n_b - 0.09 * cells) < 0.01 * cells


def test_zero_density_spawns_nothing():
    cfg = make_config(
        species=[{"name": "a", "color": [200, 30, 30], "spawn": {"kind": "density", "p": 0.0}}],
        schedule={"kind": "static", "values": {"a": 1.0}},
        walls=[[0, 0], [1, 0]],
    )
    env = ForagerEnv(cfg, seed=0)
    assert env.world.initial_object_count == 0
    assert (env.world.grid == WALL).sum() == 2


def test_agent_start_cell_never_spawns():
    cfg = make_config(
        world={"width": 3, "height": 1},
        agent={"start": [1, 0]},
        species=[{"name": "a", "color": [200, 30, 30], "spawn": {"kind": "density", "p": 1.0}}],
        schedule={"kind": "static", "values": {"a": 1.0}},
        observation={"fov": 1},
    )
    env = ForagerEnv(cfg, seed=0)
    assert env.world.grid[0, 1] == EMPTY
    assert env.world.initial_object_count == 2


def test_reset_deterministic_bit_identical():
    cfg = get_preset("forager-two-biome-morel")
    a = WorldState(cfg, seed=7)
    b = WorldState(cfg, seed=7)
    assert np.array_equal(a.grid, b.grid)
    assert (a.agent_x, a.agent_y) == (b.agent_x, b.agent_y)
    assert a.respawn_queue == b.respawn_queue
    assert a.spawn_rng.bit_generator.state == b.spawn_rng.bit_generator.state
    assert a.respawn_rng.bit_generator.state == b.respawn_rng.bit_generator.state
    assert a.schedule_rng.bit_generator.state == b.schedule_rng.bit_generator.state


def test_reset_different_seeds_differ():
    cfg = get_preset("forager-two-biome-morel")
    a = WorldState(cfg, seed=1)
    b = WorldState(cfg, seed=2)
    assert not np.array_equal(a.grid, b.grid)


def test_count_spawn_exceeding_capacity_raises():
    cfg = make_config(
        world={"width": 2, "height": 2},
        species=[{"name": "a", "color": [200, 30, 30], "spawn": {"kind": "count", "n": 4}}],
        schedule={"kind": "static", "values": {"a": 1.0}},
        observation={"fov": 1},
    )
    with pytest.raises(ValueError, match="free cells"):
        ForagerEnv(cfg, seed=0)


# -- conservation & invariants ------------------------------------------------------

def test_object_conservation_per_species():
    cfg = get_preset("forager-two-biome-morel")
    env = ForagerEnv(cfg, seed=3)
    initial = {s: env.world.object_count(s) for s in range(3)}
    rng = np.random.default_rng(0)
    for _ in range(600):
        env.step(int(rng.integers(0, 4)))
        for s in range(3):
            assert env.world.object_count(s) + env.world.pending_events(s) == initial[s]


def test_queue_bounded_by_initial_objects():
    cfg = get_preset("forager-two-biome-switch")
    env = ForagerEnv(cfg, seed=5)
    bound = env.world.initial_object_count
    rng = np.random.default_rng(1)
    for _ in range(2000):
        env.step(int(rng.integers(0, 4)))
        assert env.world.queue_length() <= bound


def test_walls_invariant_under_stepping():
    cfg = get_preset("forager-two-biome-switch")
    env = ForagerEnv(cfg, seed=2)
    walls0 = env.world.wall_cells()
    rng = np.random.default_rng(2)
    for _ in range(1500):
        env.step(int(rng.integers(0, 4)))
    assert env.world.wall_cells() == walls0
    assert walls0 == set(map(tuple, cfg.walls))


def test_agent_never_on_wall():
    cfg = get_preset("forager-two-biome-switch")
    env = ForagerEnv(cfg, seed=9)
    rng = np.random.default_rng(3)
    for _ in range(1500):
        env.step(int(rng.integers(0, 4)))
        x, y = env.agent_pos
        assert env.world.grid[y, x] != WALL
