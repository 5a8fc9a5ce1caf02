"""The simulation facade: one step = move, reward, tick, respawns, schedules, observe.

The per-step order is fixed so that the reward is a pure function of the collect
event at the acting tick:

1. apply the action and collect
2. compute the reward (and any species replacement it triggers)
3. advance the tick
4. process due respawn events
5. advance reward schedules
6. emit the observation (with the cue evaluated at the new tick)
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .config import TaskConfig
from .observation import ObservationEncoder, update_trace
from .rewards import ScheduleEngine, cue_vector
from .world import WorldState

_EMPTY_AUX = np.zeros(0, dtype=np.float64)


class Observation(NamedTuple):
    grid: np.ndarray  # uint8, shape (fov, fov, channels)
    aux: np.ndarray  # float64, shape (aux_length,)


class ForagerEnv:
    """A continuing task: there are no episodes and no terminal states.

    Instances are single-threaded; run one instance per worker for parallelism.
    Identical (config, seed, action sequence) produce identical observations and
    rewards; all randomness flows from PCG64 streams derived from the seed.
    """

    def __init__(self, config: TaskConfig, seed: int | None = None):
        self.config = config
        self.seed = config.seed if seed is None else seed
        self.num_actions = 4
        self.world: WorldState
        self.schedule: ScheduleEngine
        self.encoder: ObservationEncoder
        self.reset()

    def reset(self, seed: int | None = None) -> Observation:
        if seed is not None:
            self.seed = seed
        self.world = WorldState(self.config, self.seed)
        self.schedule = ScheduleEngine(self.config, self.world.schedule_rng)
        self.encoder = ObservationEncoder(self.config)
        self.last_action: int | None = None
        self.last_reward = 0.0
        self.trace_value = 0.0
        self._trace_beta = self.config.observation.reward_trace
        cue = self.config.cue
        self._cue_enabled = cue is not None
        if cue is not None:
            self._cue_period = cue.period
            self._cue_duration = cue.duration
            self._cue_always = cue.mode == "always"
        self._n_biomes = len(self.config.biomes)
        self._cue_values_version = -1
        self._cue_argmax = 0
        self.last_cue: np.ndarray | None = None
        return self._emit()

    # -- stepping ---------------------------------------------------------------

    def step(self, action: int) -> tuple[Observation, float, dict]:
        if not 0 <= action < 4:
            raise ValueError(f"action must be in 0..3, got {action}")
        world = self.world
        schedule = self.schedule

        code = world.apply_action(action)
        reward = 0.0
        info: dict = {"tick": 0, "collected": None}
        if code:
            slot = code - 1
            reward = schedule.values[slot]
            info["collected"] = schedule.species_ids[slot]
            replacement = schedule.record_consumption(slot, world.consumption_counts[slot])
            if replacement is not None:
                world.consumption_counts[slot] = 0
                self.encoder.set_slot_color(slot, replacement.new_color)
                info["replacement"] = replacement

        world.tick += 1
        info["tick"] = world.tick

        placed = world.process_respawns()
        if placed:
            info["respawned"] = placed

        switch = schedule.advance(world.tick)
        if switch is not None:
            info["phase_switch"] = switch

        self.last_action = action
        self.last_reward = reward
        if self._trace_beta is not None:
            self.trace_value = update_trace(self.trace_value, self._trace_beta, reward)
        return self._emit(), reward, info

    def _emit(self) -> Observation:
        enc = self.encoder
        world = self.world
        tensor = enc.grid_tensor(enc.window(world.grid, world.agent_x, world.agent_y))
        cue = None
        if self._cue_enabled:
            cue = self._current_cue()
            self.last_cue = cue
        if enc.aux_length:
            aux = enc.aux_vector(self.last_action, self.last_reward, self.trace_value, cue)
        else:
            aux = _EMPTY_AUX
        return Observation(grid=tensor, aux=aux)

    def _current_cue(self) -> np.ndarray:
        schedule = self.schedule
        if schedule.values_version != self._cue_values_version:
            self._cue_values_version = schedule.values_version
            vals = schedule.biome_values(self._n_biomes)
            self._cue_argmax = int(np.argmax(vals)) if len(vals) else 0
        out = np.zeros(self._n_biomes, dtype=np.float64)
        if self._cue_always or (self.world.tick % self._cue_period) < self._cue_duration:
            out[self._cue_argmax] = 1.0
        return out

    # -- introspection ------------------------------------------------------------

    @property
    def tick(self) -> int:
        return self.world.tick

    @property
    def agent_pos(self) -> tuple[int, int]:
        return (self.world.agent_x, self.world.agent_y)

    @property
    def phase(self) -> int:
        return self.schedule.phase

    def current_reward_values(self) -> np.ndarray:
        """True per-slot reward values right now (privileged; baselines only)."""
        return self.schedule.values.copy()

    def fov_window(self) -> np.ndarray:
        """The agent's current FOV window as raw cell codes."""
        return self.encoder.window(self.world.grid, self.world.agent_x, self.world.agent_y)

    def internal_state_size(self) -> int:
        """Deterministic entry count of all mutable structures.

        Constant apart from the respawn queue, whose length is bounded by the
        initial object count; this is what the bench samples.
        """
        world = self.world
        return (
            world.grid.size
            + len(world.respawn_queue)
            + len(world.consumption_counts)
            + self.schedule.state_size()
        )


def explicit_cue_vector(env: ForagerEnv) -> np.ndarray:
    """Standalone cue evaluation mirroring the emitted signal (for logging/tests)."""
    cue = env.config.cue
    if cue is None:
        raise ValueError("task has no cue configured")
    vals = env.schedule.biome_values(len(env.config.biomes))
    return cue_vector(cue.period, cue.duration, cue.mode == "always", env.tick, vals)
