"""Toroidal grid state: agent movement, collection, and the respawn event queue."""
from __future__ import annotations

import heapq
from enum import IntEnum

import numpy as np

from .config import (
    CountSpawn,
    DensitySpawn,
    ExplicitSpawn,
    TaskConfig,
)

# Cell codes. Species occupy slots 1..n_slots; the slot is stable across
# extinction/replacement (the species identity at a slot changes, the code does not).
EMPTY = 0
WALL = -1

GLOBAL_REGION = -1

PLACE_ORIGINAL = 0
PLACE_RANDOM = 1

# Draws per respawn before falling back to explicit enumeration of empty cells.
_REJECTION_CAP = 64


class Action(IntEnum):
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3


# (dx, dy) per action; y grows downward, so UP is dy = -1.
ACTION_DELTAS = ((0, -1), (0, 1), (-1, 0), (1, 0))


def wrap_position(x: int, y: int, dx: int, dy: int, width: int, height: int) -> tuple[int, int]:
    """Translate (x, y) by (dx, dy) on the torus."""
    return (x + dx) % width, (y + dy) % height


class WorldState:
    """Mutable simulation state for one world instance.

    Storage is fixed at reset: the grid plus a respawn queue bounded by the
    initial object count. Instances are single-threaded; run one per thread.
    """

    __slots__ = (
        "width", "height", "grid", "agent_x", "agent_y", "tick",
        "respawn_queue", "event_seq", "consumption_counts", "grid_version",
        "spawn_rng", "respawn_rng", "schedule_rng",
        "n_slots", "slot_blocking", "slot_region", "slot_placement",
        "slot_delay_lo", "slot_delay_hi", "slot_never_respawns",
        "biome_rects", "biome_id_grid", "empty_global", "empty_biome",
        "initial_object_count",
    )

    def __init__(self, config: TaskConfig, seed: int):
        self.width = config.world.width
        self.height = config.world.height
        self.grid = np.zeros((self.height, self.width), dtype=np.int16)
        self.agent_x, self.agent_y = config.resolved_start()
        self.tick = 0
        self.respawn_queue: list[tuple[int, int, int, int, int]] = []
        self.event_seq = 0
        self.grid_version = 0

        ss = np.random.SeedSequence(seed)
        spawn_ss, respawn_ss, schedule_ss = ss.spawn(3)
        self.spawn_rng = np.random.Generator(np.random.PCG64(spawn_ss))
        self.respawn_rng = np.random.Generator(np.random.PCG64(respawn_ss))
        self.schedule_rng = np.random.Generator(np.random.PCG64(schedule_ss))

        # Compiled per-slot species tables (slot k -> index k-1 here).
        n = len(config.species)
        self.n_slots = n
        self.slot_blocking = [sp.blocking for sp in config.species]
        self.slot_region = np.full(n, GLOBAL_REGION, dtype=np.int64)
        self.slot_placement = np.zeros(n, dtype=np.int64)
        self.slot_delay_lo = np.zeros(n, dtype=np.int64)
        self.slot_delay_hi = np.zeros(n, dtype=np.int64)
        self.slot_never_respawns = [False] * n
        for i, sp in enumerate(config.species):
            if sp.biome is not None:
                self.slot_region[i] = config.biome_index(sp.biome)
            self.slot_placement[i] = PLACE_RANDOM if sp.respawn.placement == "random" else PLACE_ORIGINAL
            d = sp.respawn.delay
            if d.kind == "never":
                self.slot_never_respawns[i] = True
            elif d.kind == "fixed":
                self.slot_delay_lo[i] = self.slot_delay_hi[i] = d.steps
            else:
                self.slot_delay_lo[i], self.slot_delay_hi[i] = d.lo, d.hi
        self.consumption_counts = [0] * n

        self.biome_rects = [b.rect for b in config.biomes]
        self.biome_id_grid = np.full((self.height, self.width), GLOBAL_REGION, dtype=np.int16)
        for bi, (x0, y0, x1, y1) in enumerate(self.biome_rects):
            self.biome_id_grid[y0:y1, x0:x1] = bi

        spawn_initial(self, config)

        self.empty_global = int((self.grid == EMPTY).sum())
        self.empty_biome = [
            int((self.grid[y0:y1, x0:x1] == EMPTY).sum()) for (x0, y0, x1, y1) in self.biome_rects
        ]
        self.initial_object_count = int((self.grid > 0).sum())

    # -- movement & collection ------------------------------------------------

    def apply_action(self, action: int) -> int:
        """Move the agent; returns the collected slot code, or 0.

        A wall target leaves the agent in place. Collecting empties the cell,
        bumps the species counter, and schedules the respawn event.
        """
        dx, dy = ACTION_DELTAS[action]
        tx = (self.agent_x + dx) % self.width
        ty = (self.agent_y + dy) % self.height
        code = int(self.grid[ty, tx])
        if code == WALL:
            return 0
        if code != EMPTY:
            slot = code - 1
            if self.slot_blocking[slot]:
                return 0
            self.grid[ty, tx] = EMPTY
            self.grid_version += 1
            self.consumption_counts[slot] += 1
            self._note_cell_emptied(tx, ty)
            if not self.slot_never_respawns[slot]:
                self._schedule_respawn(slot, tx, ty)
            self.agent_x, self.agent_y = tx, ty
            return code
        self.agent_x, self.agent_y = tx, ty
        return 0

    def _schedule_respawn(self, slot: int, ox: int, oy: int) -> None:
        lo = self.slot_delay_lo[slot]
        hi = self.slot_delay_hi[slot]
        if hi > lo:
            delay = lo + int(self.respawn_rng.integers(0, hi - lo + 1))
        else:
            delay = int(lo)
        heapq.heappush(
            self.respawn_queue, (self.tick + delay, self.event_seq, slot, ox, oy)
        )
        self.event_seq += 1

    # -- respawn processing ---------------------------------------------------

    def process_respawns(self) -> list[tuple[int, int, int]]:
        """Replay every event due at the current tick; returns placed (slot+1, x, y).

        An event whose target is unavailable (occupied original cell, or a region
        with no free cell) is deferred by one tick, preserving object conservation.
        """
        q = self.respawn_queue
        if not q or q[0][0] > self.tick:
            return []
        placed: list[tuple[int, int, int]] = []
        deferred: list[tuple[int, int, int, int, int]] = []
        while q and q[0][0] <= self.tick:
            due, seq, slot, ox, oy = heapq.heappop(q)
            if self.slot_placement[slot] == PLACE_ORIGINAL:
                if int(self.grid[oy, ox]) == EMPTY and not (ox == self.agent_x and oy == self.agent_y):
                    self._place(slot, ox, oy)
                    placed.append((slot + 1, ox, oy))
                else:
                    deferred.append((self.tick + 1, seq, slot, ox, oy))
            else:
                cell = self._draw_empty_cell(int(self.slot_region[slot]))
                if cell is None:
                    deferred.append((self.tick + 1, seq, slot, ox, oy))
                else:
                    x, y = cell
                    self._place(slot, x, y)
                    placed.append((slot + 1, x, y))
        for ev in deferred:
            heapq.heappush(q, ev)
        return placed

    def _place(self, slot: int, x: int, y: int) -> None:
        self.grid[y, x] = slot + 1
        self.grid_version += 1
        self.empty_global -= 1
        b = int(self.biome_id_grid[y, x])
        if b >= 0:
            self.empty_biome[b] -= 1

    def _note_cell_emptied(self, x: int, y: int) -> None:
        self.empty_global += 1
        b = int(self.biome_id_grid[y, x])
        if b >= 0:
            self.empty_biome[b] += 1

    def _draw_empty_cell(self, region: int) -> tuple[int, int] | None:
        """Uniform draw among empty cells of a region, excluding the agent's cell."""
        if region == GLOBAL_REGION:
            x0, y0, x1, y1 = 0, 0, self.width, self.height
            empties = self.empty_global
            agent_inside = True
        else:
            x0, y0, x1, y1 = self.biome_rects[region]
            empties = self.empty_biome[region]
            agent_inside = x0 <= self.agent_x < x1 and y0 <= self.agent_y < y1
        available = empties - (1 if agent_inside else 0)
        if available <= 0:
            return None
        rw = x1 - x0
        rh = y1 - y0
        area = rw * rh
        rng = self.respawn_rng
        grid = self.grid
        for _ in range(_REJECTION_CAP):
            idx = int(rng.integers(0, area))
            x = x0 + idx % rw
            y = y0 + idx // rw
            if grid[y, x] == EMPTY and not (x == self.agent_x and y == self.agent_y):
                return x, y
        # Nearly full region: enumerate instead of rejecting forever.
        sub = grid[y0:y1, x0:x1]
        ys, xs = np.nonzero(sub == EMPTY)
        xs = xs + x0
        ys = ys + y0
        keep = ~((xs == self.agent_x) & (ys == self.agent_y))
        xs, ys = xs[keep], ys[keep]
        pick = int(rng.integers(0, len(xs)))
        return int(xs[pick]), int(ys[pick])

    # -- bookkeeping ----------------------------------------------------------

    def queue_length(self) -> int:
        return len(self.respawn_queue)

    def object_count(self, slot: int | None = None) -> int:
        if slot is None:
            return int((self.grid > 0).sum())
        return int((self.grid == slot + 1).sum())

    def pending_events(self, slot: int | None = None) -> int:
        if slot is None:
            return len(self.respawn_queue)
        return sum(1 for ev in self.respawn_queue if ev[2] == slot)

    def wall_cells(self) -> set[tuple[int, int]]:
        ys, xs = np.nonzero(self.grid == WALL)
        return {(int(x), int(y)) for x, y in zip(xs, ys)}


def spawn_initial(state: WorldState, config: TaskConfig) -> None:
    """Place walls then species, in declaration order; first claim wins a cell.

    Density species draw one uniform per region cell; count species pick without
    replacement among the cells still free. The agent's start cell never spawns
    anything.
    """
    grid = state.grid
    w, h = state.width, state.height
    for x, y in config.walls:
        grid[y, x] = WALL
    ax, ay = state.agent_x, state.agent_y

    for i, sp in enumerate(config.species):
        code = i + 1
        if sp.biome is None:
            x0, y0, x1, y1 = 0, 0, w, h
        else:
            x0, y0, x1, y1 = config.biomes[config.biome_index(sp.biome)].rect
        sub = grid[y0:y1, x0:x1]
        if isinstance(sp.spawn, ExplicitSpawn):
            for cx, cy in sp.spawn.cells:
                if grid[cy, cx] != EMPTY:
                    raise ValueError(
                        f"species '{sp.name}': explicit cell ({cx}, {cy}) already occupied"
                    )
                grid[cy, cx] = code
        elif isinstance(sp.spawn, DensitySpawn):
            if sp.spawn.p <= 0.0:
                continue
            draws = state.spawn_rng.random(sub.shape)
            mask = (draws < sp.spawn.p) & (sub == EMPTY)
            if x0 <= ax < x1 and y0 <= ay < y1:
                mask[ay - y0, ax - x0] = False
            sub[mask] = code
        elif isinstance(sp.spawn, CountSpawn):
            if sp.spawn.n == 0:
                continue
            free = sub == EMPTY
            if x0 <= ax < x1 and y0 <= ay < y1:
                free[ay - y0, ax - x0] = False
            flat = np.flatnonzero(free)
            if sp.spawn.n > len(flat):
                raise ValueError(
                    f"species '{sp.name}': {sp.spawn.n} objects requested but only "
                    f"{len(flat)} free cells in region"
                )
            pick = state.spawn_rng.choice(len(flat), size=sp.spawn.n, replace=False)
            chosen = flat[pick]
            # sub is a strided view; assign through 2-d fancy indexing.
            sub[chosen // sub.shape[1], chosen % sub.shape[1]] = code
    state.grid_version += 1
