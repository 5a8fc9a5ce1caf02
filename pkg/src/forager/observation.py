"""Agent-centered FOV extraction and tensor encodings, plus the auxiliary inputs."""
from __future__ import annotations

import numpy as np

from .config import COLOR_AGENT, COLOR_BACKGROUND, COLOR_WALL, TaskConfig
from .world import WALL

NUM_ACTIONS = 4


def effective_fov(fov: int, width: int, height: int) -> int:
    """Clamp an oversized FOV to full observability (largest odd window that fits)."""
    m = min(width, height)
    if fov <= m:
        return fov
    return m if m % 2 == 1 else m - 1


def extract_fov(grid: np.ndarray, agent_x: int, agent_y: int, fov: int) -> np.ndarray:
    """The (fov, fov) window of cell codes centered on the agent, wrapping at edges.

    Row i, column j maps to world cell (agent_x + j - fov//2, agent_y + i - fov//2).
    The center reports the content beneath the agent.
    """
    h, w = grid.shape
    half = fov // 2
    rows = (np.arange(fov) - half + agent_y) % h
    cols = (np.arange(fov) - half + agent_x) % w
    return grid[rows[:, None], cols[None, :]]


def update_trace(value: float, beta: float, reward: float) -> float:
    """Exponentially weighted trace of recent rewards."""
    return beta * value + (1.0 - beta) * reward


class ObservationEncoder:
    """Precompiled encoder for one task: window lookup tables and aux layout.

    Grid tensors are uint8 in row-major (row, col, channel) order. Binary mode
    gives one occupancy plane per species slot; color mode one plane per distinct
    species color (species sharing a color share a plane); rgb paints each cell.
    Walls get their own plane in binary/color modes when the world has any.
    The agent itself is only drawn in rgb mode (center cell, agent blue): in the
    plane modes it is always at the center and carries no information.
    """

    def __init__(self, config: TaskConfig):
        self.config = config
        self.mode = config.observation.mode
        self.fov = effective_fov(
            config.observation.fov, config.world.width, config.world.height
        )
        self._half = self.fov // 2
        self._offsets = np.arange(self.fov) - self._half
        self._width = config.world.width
        self._height = config.world.height

        n = len(config.species)
        self.n_slots = n
        self.wall_channel = len(config.walls) > 0
        if self.mode == "binary":
            self.channels = n + (1 if self.wall_channel else 0)
            # LUT rows are indexed by cell code + 1: wall, empty, then slots.
            lut = np.zeros((n + 2, self.channels), dtype=np.uint8)
            for slot in range(n):
                lut[slot + 2, slot] = 1
            if self.wall_channel:
                lut[0, self.channels - 1] = 1
            self._lut = lut
        elif self.mode == "color":
            colors: list[tuple[int, int, int]] = []
            self._slot_color_idx = []
            for sp in config.species:
                c = tuple(sp.color)
                if c not in colors:
                    colors.append(c)
                self._slot_color_idx.append(colors.index(c))
            self.color_planes = colors
            self.channels = len(colors) + (1 if self.wall_channel else 0)
            lut = np.zeros((n + 2, self.channels), dtype=np.uint8)
            for slot in range(n):
                lut[slot + 2, self._slot_color_idx[slot]] = 1
            if self.wall_channel:
                lut[0, self.channels - 1] = 1
            self._lut = lut
        else:  # rgb
            self.channels = 3
            lut = np.zeros((n + 2, 3), dtype=np.uint8)
            lut[0] = COLOR_WALL
            lut[1] = COLOR_BACKGROUND
            for slot, sp in enumerate(config.species):
                lut[slot + 2] = sp.color
            self._lut = lut
            self._agent_rgb = np.array(COLOR_AGENT, dtype=np.uint8)

        obs = config.observation
        self.aux_length = (
            (NUM_ACTIONS if obs.include_last_action else 0)
            + (1 if obs.include_last_reward else 0)
            + (1 if obs.reward_trace is not None else 0)
            + (len(config.biomes) if obs.include_cue else 0)
        )
        self._include_action = obs.include_last_action
        self._include_reward = obs.include_last_reward
        self._include_trace = obs.reward_trace is not None
        self._include_cue = obs.include_cue
        self._n_biomes = len(config.biomes)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.fov, self.fov, self.channels)

    def set_slot_color(self, slot: int, color: tuple[int, int, int]) -> None:
        """Species replacement support; meaningful in rgb mode only."""
        if self.mode == "rgb":
            self._lut[slot + 2] = color

    def window(self, grid: np.ndarray, agent_x: int, agent_y: int) -> np.ndarray:
        rows = (self._offsets + agent_y) % self._height
        cols = (self._offsets + agent_x) % self._width
        return grid[rows[:, None], cols[None, :]]

    def grid_tensor(self, window: np.ndarray) -> np.ndarray:
        out = self._lut[window + 1]
        if self.mode == "rgb":
            out[self._half, self._half] = self._agent_rgb
        return out

    def encode(self, grid: np.ndarray, agent_x: int, agent_y: int) -> np.ndarray:
        return self.grid_tensor(self.window(grid, agent_x, agent_y))

    def aux_vector(
        self,
        last_action: int | None,
        last_reward: float,
        trace_value: float,
        cue: np.ndarray | None,
    ) -> np.ndarray:
        """Fixed layout: action one-hot, last reward, reward trace, cue.

        Disabled sections contribute no entries. On the first step the action
        one-hot is all zeros and the last reward is 0.
        """
        out = np.zeros(self.aux_length, dtype=np.float64)
        i = 0
        if self._include_action:
            if last_action is not None:
                out[last_action] = 1.0
            i += NUM_ACTIONS
        if self._include_reward:
            out[i] = last_reward
            i += 1
        if self._include_trace:
            out[i] = trace_value
            i += 1
        if self._include_cue and cue is not None:
            out[i : i + self._n_biomes] = cue
        return out


def decode_binary(tensor: np.ndarray, encoder: ObservationEncoder) -> np.ndarray:
    """Inverse of the binary encoding: reconstruct the window's cell codes."""
    if encoder.mode != "binary":
        raise ValueError("decode_binary requires binary mode")
    codes = np.zeros(tensor.shape[:2], dtype=np.int16)
    for slot in range(encoder.n_slots):
        codes[tensor[:, :, slot] == 1] = slot + 1
    if encoder.wall_channel:
        codes[tensor[:, :, encoder.channels - 1] == 1] = WALL
    return codes


__all__ = [
    "NUM_ACTIONS",
    "ObservationEncoder",
    "decode_binary",
    "effective_fov",
    "extract_fov",
    "update_trace",
]
