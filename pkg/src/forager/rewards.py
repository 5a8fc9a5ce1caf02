"""Reward schedules and their per-step evolution.

Four reward laws are supported: static per-species values, per-step multiplicative
decay, hidden-phase switching, and harmonic time series with global centering plus
species extinction/replacement. The engine keeps one current value per species slot;
values correspond to the tick at which a collection would be rewarded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import (
    COLOR_AGENT,
    COLOR_BACKGROUND,
    COLOR_WALL,
    DecayingSchedule,
    FourierSchedule,
    StaticSchedule,
    SwitchingSchedule,
    TaskConfig,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FourierParams:
    """One species' reward time series: value depends on floor(tick / repeat)."""

    a: np.ndarray  # cosine coefficients, harmonic n = 1..N
    b: np.ndarray  # sine coefficients
    period: float
    repeat: int


def sample_fourier_params(
    rng: np.random.Generator,
    harmonics: int,
    repeat: int,
    period_min: float,
    period_max: float,
) -> FourierParams:
    """Coefficients ~ Normal(0, 1/n) per harmonic n; period uniform in the range."""
    n = np.arange(1, harmonics + 1, dtype=np.float64)
    a = rng.normal(0.0, 1.0 / n)
    b = rng.normal(0.0, 1.0 / n)
    period = float(rng.uniform(period_min, period_max))
    return FourierParams(a=a, b=b, period=period, repeat=repeat)


def fourier_value(params: FourierParams, tick: int) -> float:
    """Sum of harmonics evaluated on the plateau index k = floor(tick / repeat)."""
    k = tick // params.repeat
    n = np.arange(1, len(params.a) + 1, dtype=np.float64)
    theta = (TWO_PI * k / params.period) * n
    return float(np.dot(params.a, np.cos(theta)) + np.dot(params.b, np.sin(theta)))


def center_rewards(raw: np.ndarray) -> np.ndarray:
    """Subtract the mean so the values sum to zero and the max is never negative.

    The mean is clamped into [min, max]; float rounding on near-identical inputs
    must not push every centered value below zero.
    """
    if raw.size == 0:
        return raw.copy()
    m = float(raw.mean())
    lo, hi = float(raw.min()), float(raw.max())
    if m > hi:
        m = hi
    elif m < lo:
        m = lo
    return raw - m


def cue_vector(
    period: int,
    duration: int,
    always: bool,
    tick: int,
    biome_values: np.ndarray,
) -> np.ndarray:
    """One-hot over biomes at the current best value; zeros outside the window.

    Ties break to the lowest biome index. In `always` mode the window check is
    skipped and the signal is emitted every step.
    """
    out = np.zeros(len(biome_values), dtype=np.float64)
    if len(biome_values) == 0:
        return out
    if always or (tick % period) < duration:
        out[int(np.argmax(biome_values))] = 1.0
    return out


@dataclass(frozen=True)
class Replacement:
    """Species turnover at a slot: the old lineage went extinct."""

    slot: int
    old_species_id: int
    new_species_id: int
    new_color: tuple[int, int, int]


@dataclass(frozen=True)
class PhaseSwitch:
    old_phase: int
    new_phase: int


class ScheduleEngine:
    """Tracks per-slot reward values and advances them once per step.

    Blocking species hold permanent zeros in `values`; they are never rewarded.
    """

    def __init__(self, config: TaskConfig, schedule_rng: np.random.Generator):
        self.config = config
        self.rng = schedule_rng
        spec = config.schedule
        species = config.species
        self.n_slots = len(species)
        self.blocking = [sp.blocking for sp in species]
        self.slot_biome = np.array(
            [config.biome_index(sp.biome) if sp.biome is not None else -1 for sp in species],
            dtype=np.int64,
        )
        self.values = np.zeros(self.n_slots, dtype=np.float64)
        self.kind = spec.kind
        self.phase = 0
        self.values_version = 0

        # Lifecycle identity: species_id is unique across replacements at a slot.
        self.species_ids = list(range(self.n_slots))
        self.species_names = [sp.name for sp in species]
        self.species_colors = [tuple(sp.color) for sp in species]
        self._next_species_id = self.n_slots
        self.extinction_threshold: int | None = None
        self.fourier_params: list[FourierParams | None] = [None] * self.n_slots

        name_to_slot = {sp.name: i for i, sp in enumerate(species)}
        if isinstance(spec, StaticSchedule):
            for name, v in spec.values.items():
                self.values[name_to_slot[name]] = v
        elif isinstance(spec, DecayingSchedule):
            for name, v in spec.initial.items():
                self.values[name_to_slot[name]] = v
            self.decay = spec.decay
            self.floor = spec.floor
        elif isinstance(spec, SwitchingSchedule):
            self.period = spec.period
            self.phase_tables = np.zeros((len(spec.phases), self.n_slots), dtype=np.float64)
            for p, table in enumerate(spec.phases):
                for name, v in table.items():
                    self.phase_tables[p, name_to_slot[name]] = v
            self.values = self.phase_tables[0].copy()
        elif isinstance(spec, FourierSchedule):
            self.extinction_threshold = spec.extinction_threshold
            self._fourier_spec = spec
            self._plateau = 0
            for i, sp in enumerate(species):
                if sp.blocking:
                    continue
                if spec.params is not None:
                    p = spec.params[sp.name]
                    self.fourier_params[i] = FourierParams(
                        a=np.asarray(p.a, dtype=np.float64),
                        b=np.asarray(p.b, dtype=np.float64),
                        period=p.period,
                        repeat=spec.repeat,
                    )
                else:
                    self.fourier_params[i] = sample_fourier_params(
                        self.rng, spec.harmonics, spec.repeat,
                        spec.period_min, spec.period_max,
                    )
            self._recompute_fourier(0)
        else:  # pragma: no cover - exhaustive over ScheduleSpec
            raise AssertionError(spec)

    # -- per-step evolution ---------------------------------------------------

    def advance(self, tick: int) -> PhaseSwitch | None:
        """Move the schedule to `tick`; returns a notification on phase flips.

        Notifications feed the trajectory log only; they are never observable.
        """
        if self.kind == "switching":
            new_phase = (tick // self.period) % len(self.phase_tables)
            if new_phase != self.phase:
                old = self.phase
                self.phase = new_phase
                self.values = self.phase_tables[new_phase].copy()
                self.values_version += 1
                return PhaseSwitch(old_phase=old, new_phase=new_phase)
        elif self.kind == "decaying":
            decayed = self.values * self.decay
            np.maximum(decayed, self.floor, out=decayed)
            self.values = decayed
            self.values_version += 1
        elif self.kind == "fourier":
            plateau = tick // self._fourier_spec.repeat
            if plateau != self._plateau:
                self._recompute_fourier(tick)
        return None

    def _recompute_fourier(self, tick: int) -> None:
        self._plateau = tick // self._fourier_spec.repeat
        raw = np.array(
            [
                fourier_value(p, tick) if p is not None else 0.0
                for p in self.fourier_params
            ],
            dtype=np.float64,
        )
        live = np.array([not b for b in self.blocking], dtype=bool)
        centered = np.zeros_like(raw)
        if live.any():
            centered[live] = center_rewards(raw[live])
        self.values = centered
        self.values_version += 1

    # -- collection-side queries ------------------------------------------------

    def reward_for_slot(self, slot: int) -> float:
        return float(self.values[slot])

    def record_consumption(self, slot: int, count: int) -> Replacement | None:
        """Species turnover check; fires exactly when the counter hits the threshold."""
        if self.extinction_threshold is None or count != self.extinction_threshold:
            return None
        old_id = self.species_ids[slot]
        new_id = self._next_species_id
        self._next_species_id += 1
        new_color = self._sample_new_color()
        self.species_ids[slot] = new_id
        self.species_colors[slot] = new_color
        spec = self._fourier_spec
        self.fourier_params[slot] = sample_fourier_params(
            self.rng, spec.harmonics, spec.repeat, spec.period_min, spec.period_max
        )
        # Values shift immediately: the new species contributes to centering now.
        self._recompute_fourier_current()
        return Replacement(
            slot=slot, old_species_id=old_id, new_species_id=new_id, new_color=new_color
        )

    def _recompute_fourier_current(self) -> None:
        tick = self._plateau * self._fourier_spec.repeat
        self._recompute_fourier(tick)

    def _sample_new_color(self) -> tuple[int, int, int]:
        taken = set(self.species_colors)
        taken.update((COLOR_WALL, COLOR_AGENT, COLOR_BACKGROUND))
        while True:
            c = tuple(int(v) for v in self.rng.integers(0, 256, size=3))
            if c not in taken:
                return c

    # -- cue support ------------------------------------------------------------

    def biome_values(self, n_biomes: int) -> np.ndarray:
        """Best current reward per biome (max over that biome's live species)."""
        out = np.full(n_biomes, -np.inf, dtype=np.float64)
        for slot in range(self.n_slots):
            if self.blocking[slot]:
                continue
            b = int(self.slot_biome[slot])
            if b >= 0 and self.values[slot] > out[b]:
                out[b] = self.values[slot]
        out[np.isneginf(out)] = 0.0
        return out

    def state_size(self) -> int:
        """Entry count of all mutable schedule structures (for the size report)."""
        n = self.values.size + len(self.species_ids) + len(self.species_colors)
        for p in self.fourier_params:
            if p is not None:
                n += p.a.size + p.b.size + 2
        if self.kind == "switching":
            n += self.phase_tables.size
        return n


def build_schedule(config: TaskConfig, schedule_rng: np.random.Generator) -> ScheduleEngine:
    return ScheduleEngine(config, schedule_rng)


__all__ = [
    "FourierParams",
    "PhaseSwitch",
    "Replacement",
    "ScheduleEngine",
    "build_schedule",
    "center_rewards",
    "cue_vector",
    "fourier_value",
    "sample_fourier_params",
]
