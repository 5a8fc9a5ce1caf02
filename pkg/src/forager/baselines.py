"""Scripted reference policies: random, FOV-limited greedy search, and a
privileged full-state search.

The search policies run breadth-first search toward the nearest strictly
positive object, treating walls and strictly negative objects as impassable.
Ties between equally short paths resolve by action order up, down, left, right.
"""
from __future__ import annotations

import numpy as np

from .env import ForagerEnv
from .world import ACTION_DELTAS


def bfs_torus(
    blocked: np.ndarray, goals: np.ndarray, start: tuple[int, int]
) -> tuple[int | None, int] | None:
    """Shortest path on the wrapping grid from start to any goal cell.

    Returns (first_action, distance), (None, 0) when already on a goal, or None
    when no goal is reachable. `blocked` and `goals` are (height, width) bool
    masks; blocked cells are impassable, goal cells are enterable.
    """
    h, w = blocked.shape
    sx, sy = start
    if blocked[sy, sx]:
        raise ValueError("start cell is blocked")
    return _bfs_wrap(blocked.reshape(-1).tobytes(), goals.reshape(-1).tobytes(), w, h, sy * w + sx)


def _bfs_wrap(blocked: bytes, goals: bytes, w: int, h: int, start: int):
    if goals[start]:
        return None, 0
    n = w * h
    visited = bytearray(n)
    visited[start] = 1
    frontier = [(start, -1)]
    dist = 0
    while frontier:
        dist += 1
        nxt = []
        for idx, first in frontier:
            x = idx % w
            # up
            ni = idx - w
            if ni < 0:
                ni += n
            if not visited[ni] and not blocked[ni]:
                a = first if first >= 0 else 0
                if goals[ni]:
                    return a, dist
                visited[ni] = 1
                nxt.append((ni, a))
            # down
            ni = idx + w
            if ni >= n:
                ni -= n
            if not visited[ni] and not blocked[ni]:
                a = first if first >= 0 else 1
                if goals[ni]:
                    return a, dist
                visited[ni] = 1
                nxt.append((ni, a))
            # left
            ni = idx - 1 if x > 0 else idx + w - 1
            if not visited[ni] and not blocked[ni]:
                a = first if first >= 0 else 2
                if goals[ni]:
                    return a, dist
                visited[ni] = 1
                nxt.append((ni, a))
            # right
            ni = idx + 1 if x < w - 1 else idx - w + 1
            if not visited[ni] and not blocked[ni]:
                a = first if first >= 0 else 3
                if goals[ni]:
                    return a, dist
                visited[ni] = 1
                nxt.append((ni, a))
        frontier = nxt
    return None


def _bfs_window(blocked: bytes, goals: bytes, w: int, h: int, start: int):
    """BFS within a finite window: edges do not wrap."""
    if goals[start]:
        return None, 0
    visited = bytearray(w * h)
    visited[start] = 1
    frontier = [(start, -1)]
    dist = 0
    while frontier:
        dist += 1
        nxt = []
        for idx, first in frontier:
            x = idx % w
            y = idx // w
            if y > 0:
                ni = idx - w
                if not visited[ni] and not blocked[ni]:
                    a = first if first >= 0 else 0
                    if goals[ni]:
                        return a, dist
                    visited[ni] = 1
                    nxt.append((ni, a))
            if y < h - 1:
                ni = idx + w
                if not visited[ni] and not blocked[ni]:
                    a = first if first >= 0 else 1
                    if goals[ni]:
                        return a, dist
                    visited[ni] = 1
                    nxt.append((ni, a))
            if x > 0:
                ni = idx - 1
                if not visited[ni] and not blocked[ni]:
                    a = first if first >= 0 else 2
                    if goals[ni]:
                        return a, dist
                    visited[ni] = 1
                    nxt.append((ni, a))
            if x < w - 1:
                ni = idx + 1
                if not visited[ni] and not blocked[ni]:
                    a = first if first >= 0 else 3
                    if goals[ni]:
                        return a, dist
                    visited[ni] = 1
                    nxt.append((ni, a))
        frontier = nxt
    return None


def _classification_luts(env: ForagerEnv) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell-code goal/blocked lookup tables under the current reward values.

    Row index is cell code + 1 (wall, empty, then species slots). Goals are
    strictly positive collectables; blocked are walls, blocking species, and
    strictly negative collectables.
    """
    n = env.schedule.n_slots
    values = env.schedule.values
    goal = np.zeros(n + 2, dtype=bool)
    blocked = np.zeros(n + 2, dtype=bool)
    blocked[0] = True  # wall code
    for slot in range(n):
        if env.schedule.blocking[slot]:
            blocked[slot + 2] = True
        elif values[slot] > 0.0:
            goal[slot + 2] = True
        elif values[slot] < 0.0:
            blocked[slot + 2] = True
    return goal, blocked


class RandomPolicy:
    """Uniform over the four actions."""

    def __init__(self, seed: int = 0):
        self.rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))

    def act(self, env: ForagerEnv) -> int:
        return int(self.rng.integers(0, 4))


class OracleSearch:
    """Privileged search over the full world state and true current rewards.

    Paths toward the nearest strictly positive object while never planning
    through walls or negative objects. With no reachable goal it takes a random
    action that does not step into a blocked cell.
    """

    def __init__(self, seed: int = 0):
        self.rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        self._key: tuple | None = None
        self._env_id: int | None = None
        self._goal_b = b""
        self._blocked_b = b""
        self._blocked_lut: np.ndarray | None = None

    def _refresh(self, env: ForagerEnv) -> None:
        key = (env.world.grid_version, env.schedule.values_version)
        if key == self._key and self._env_id == id(env):
            return
        goal_lut, blocked_lut = _classification_luts(env)
        codes = env.world.grid + 1
        self._goal_b = goal_lut[codes].reshape(-1).tobytes()
        self._blocked_b = blocked_lut[codes].reshape(-1).tobytes()
        self._blocked_lut = blocked_lut
        self._key = key
        self._env_id = id(env)

    def act(self, env: ForagerEnv) -> int:
        self._refresh(env)
        world = env.world
        res = _bfs_wrap(
            self._blocked_b, self._goal_b, world.width, world.height,
            world.agent_y * world.width + world.agent_x,
        )
        if res is not None and res[0] is not None:
            return res[0]
        return self._random_unblocked(env)

    def _random_unblocked(self, env: ForagerEnv) -> int:
        world = env.world
        lut = self._blocked_lut
        open_actions = []
        for a, (dx, dy) in enumerate(ACTION_DELTAS):
            tx = (world.agent_x + dx) % world.width
            ty = (world.agent_y + dy) % world.height
            if not lut[int(world.grid[ty, tx]) + 1]:
                open_actions.append(a)
        if not open_actions:
            return int(self.rng.integers(0, 4))
        return open_actions[int(self.rng.integers(0, len(open_actions)))]


class SearchNearest:
    """Greedy search restricted to the agent's FOV window (no wrap beyond it).

    Sees only the window's cell contents; reward values per species are known.
    With no visible positive object it takes a random non-blocked action.
    """

    def __init__(self, seed: int = 0):
        self.rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        self._values_version = -1
        self._env_id: int | None = None
        self._goal_lut: np.ndarray | None = None
        self._blocked_lut: np.ndarray | None = None

    def act(self, env: ForagerEnv) -> int:
        if (
            env.schedule.values_version != self._values_version
            or self._env_id != id(env)
        ):
            self._goal_lut, self._blocked_lut = _classification_luts(env)
            self._values_version = env.schedule.values_version
            self._env_id = id(env)
        window = env.fov_window()
        codes = window + 1
        goals = self._goal_lut[codes]
        blocked = self._blocked_lut[codes]
        fov = window.shape[0]
        center = fov // 2
        res = _bfs_window(
            blocked.reshape(-1).tobytes(), goals.reshape(-1).tobytes(),
            fov, fov, center * fov + center,
        )
        if res is not None and res[0] is not None:
            return res[0]
        open_actions = []
        for a, (dx, dy) in enumerate(ACTION_DELTAS):
            if not blocked[center + dy, center + dx]:
                open_actions.append(a)
        if not open_actions:
            return int(self.rng.integers(0, 4))
        return open_actions[int(self.rng.integers(0, len(open_actions)))]


POLICY_NAMES = ("random", "nearest", "oracle")


def make_policy(name: str, seed: int = 0):
    if name == "random":
        return RandomPolicy(seed)
    if name == "nearest":
        return SearchNearest(seed)
    if name == "oracle":
        return OracleSearch(seed)
    raise KeyError(f"unknown policy '{name}'; available: {', '.join(POLICY_NAMES)}")


__all__ = [
    "POLICY_NAMES",
    "OracleSearch",
    "RandomPolicy",
    "SearchNearest",
    "bfs_torus",
    "make_policy",
]
