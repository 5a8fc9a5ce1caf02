"""Declarative task configuration: schema, validation, and canonical JSON round-trip."""
from __future__ import annotations

import json
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

CONFIG_VERSION = 1

# Colors reserved for the renderer / observation encodings. Species may not use them
# and replacement sampling never produces them.
COLOR_WALL = (0, 0, 0)
COLOR_AGENT = (0, 0, 255)
COLOR_BACKGROUND = (255, 255, 255)
RESERVED_COLORS = (COLOR_WALL, COLOR_AGENT, COLOR_BACKGROUND)


class ConfigError(ValueError):
    """Raised for syntactic or semantic configuration problems.

    ``errors`` holds (location, message) pairs; ``str()`` renders them one per line.
    """

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = errors
        super().__init__("\n".join(f"{loc}: {msg}" for loc, msg in errors))


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class WorldSpec(_Model):
    width: int = Field(gt=0)
    height: int = Field(gt=0)
    wrap: bool = True

    @model_validator(mode="after")
    def _check_wrap(self) -> "WorldSpec":
        if not self.wrap:
            raise ValueError("non-wrapping worlds are not supported; wrap must be true")
        return self


class AgentSpec(_Model):
    start: Optional[tuple[int, int]] = None  # None -> world center


class BiomeSpec(_Model):
    name: str
    rect: tuple[int, int, int, int]  # (x0, y0, x1, y1), half-open


class DensitySpawn(_Model):
    kind: Literal["density"] = "density"
    p: float = Field(ge=0.0, le=1.0)


class CountSpawn(_Model):
    kind: Literal["count"] = "count"
    n: int = Field(ge=0)


class ExplicitSpawn(_Model):
    kind: Literal["explicit"] = "explicit"
    cells: tuple[tuple[int, int], ...]


SpawnSpec = Union[DensitySpawn, CountSpawn, ExplicitSpawn]


class NeverDelay(_Model):
    kind: Literal["never"] = "never"


class FixedDelay(_Model):
    kind: Literal["fixed"] = "fixed"
    steps: int = Field(ge=1)


class UniformDelay(_Model):
    kind: Literal["uniform"] = "uniform"
    lo: int = Field(ge=1)
    hi: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_range(self) -> "UniformDelay":
        if self.hi < self.lo:
            raise ValueError("uniform delay requires lo <= hi")
        return self


DelaySpec = Union[NeverDelay, FixedDelay, UniformDelay]


class RespawnSpec(_Model):
    delay: DelaySpec = Field(discriminator="kind")
    placement: Literal["original", "random"] = "original"


class SpeciesSpec(_Model):
    name: str
    color: tuple[int, int, int]
    blocking: bool = False
    biome: Optional[str] = None  # None -> species lives in the whole world
    spawn: SpawnSpec = Field(discriminator="kind")
    respawn: RespawnSpec = RespawnSpec(delay=NeverDelay())

    @model_validator(mode="after")
    def _check_color(self) -> "SpeciesSpec":
        if any(c < 0 or c > 255 for c in self.color):
            raise ValueError("color components must be in [0, 255]")
        if tuple(self.color) in RESERVED_COLORS:
            raise ValueError(
                "color is reserved (wall black, agent blue, background white)"
            )
        return self


class StaticSchedule(_Model):
    kind: Literal["static"] = "static"
    values: dict[str, float]


class DecayingSchedule(_Model):
    kind: Literal["decaying"] = "decaying"
    initial: dict[str, float]
    decay: float = Field(gt=0.0, le=1.0)
    floor: float = 0.0


class SwitchingSchedule(_Model):
    kind: Literal["switching"] = "switching"
    period: int = Field(gt=0)
    phases: tuple[dict[str, float], ...] = Field(min_length=1)


class FourierSeriesSpec(_Model):
    """Explicitly pinned time-series coefficients for one species."""

    a: tuple[float, ...]
    b: tuple[float, ...]
    period: float = Field(gt=0.0)

    @model_validator(mode="after")
    def _check_lengths(self) -> "FourierSeriesSpec":
        if len(self.a) != len(self.b):
            raise ValueError("a and b must have the same harmonic count")
        if len(self.a) == 0:
            raise ValueError("at least one harmonic is required")
        return self


class FourierSchedule(_Model):
    kind: Literal["fourier"] = "fourier"
    harmonics: int = Field(gt=0)
    repeat: int = Field(gt=0)
    period_min: float = Field(default=1.0, gt=0.0)
    period_max: float = 1000.0
    extinction_threshold: Optional[int] = Field(default=None, gt=0)
    # When None, coefficients are sampled at reset from the world seed.
    params: Optional[dict[str, FourierSeriesSpec]] = None

    @model_validator(mode="after")
    def _check_range(self) -> "FourierSchedule":
        if self.period_max < self.period_min:
            raise ValueError("period_max must be >= period_min")
        return self


ScheduleSpec = Union[StaticSchedule, DecayingSchedule, SwitchingSchedule, FourierSchedule]


class CueSpec(_Model):
    period: int = Field(default=100, gt=0)
    duration: int = Field(default=10, gt=0)
    mode: Literal["windowed", "always"] = "windowed"

    @model_validator(mode="after")
    def _check_window(self) -> "CueSpec":
        if self.duration > self.period:
            raise ValueError("cue duration must be <= period")
        return self


class ObservationSpecModel(_Model):
    fov: int = Field(gt=0)
    mode: Literal["binary", "color", "rgb"] = "binary"
    include_last_action: bool = False
    include_last_reward: bool = False
    reward_trace: Optional[float] = None  # decay beta in (0, 1)
    include_cue: bool = False

    @model_validator(mode="after")
    def _check(self) -> "ObservationSpecModel":
        if self.fov % 2 == 0:
            raise ValueError("fov must be odd")
        if self.reward_trace is not None and not (0.0 < self.reward_trace < 1.0):
            raise ValueError("reward_trace decay must be in (0, 1)")
        return self


class TaskConfig(_Model):
    forager_config_version: Literal[1] = CONFIG_VERSION
    world: WorldSpec
    agent: AgentSpec = AgentSpec()
    walls: tuple[tuple[int, int], ...] = ()
    biomes: tuple[BiomeSpec, ...] = ()
    species: tuple[SpeciesSpec, ...] = ()
    schedule: ScheduleSpec = Field(discriminator="kind")
    cue: Optional[CueSpec] = None
    observation: ObservationSpecModel
    seed: int = 0

    def resolved_start(self) -> tuple[int, int]:
        if self.agent.start is not None:
            return self.agent.start
        return (self.world.width // 2, self.world.height // 2)

    def biome_index(self, name: str) -> int:
        for i, b in enumerate(self.biomes):
            if b.name == name:
                return i
        raise KeyError(name)

    def reward_species(self) -> list[SpeciesSpec]:
        return [s for s in self.species if not s.blocking]

    @model_validator(mode="after")
    def _validate_semantics(self) -> "TaskConfig":
        errs: list[tuple[str, str]] = []
        w, h = self.world.width, self.world.height

        def in_bounds(x: int, y: int) -> bool:
            return 0 <= x < w and 0 <= y < h

        biome_names = [b.name for b in self.biomes]
        if len(set(biome_names)) != len(biome_names):
            errs.append(("biomes", "biome names must be unique"))
        for i, b in enumerate(self.biomes):
            x0, y0, x1, y1 = b.rect
            if not (0 <= x0 < x1 <= w and 0 <= y0 < y1 <= h):
                errs.append((f"biomes[{i}] ({b.name})", "rect outside world bounds or empty"))
        for i, a in enumerate(self.biomes):
            for j in range(i + 1, len(self.biomes)):
                b = self.biomes[j]
                ax0, ay0, ax1, ay1 = a.rect
                bx0, by0, bx1, by1 = b.rect
                if ax0 < bx1 and bx0 < ax1 and ay0 < by1 and by0 < ay1:
                    errs.append(("biomes", f"regions '{a.name}' and '{b.name}' overlap"))

        names = [s.name for s in self.species]
        if len(set(names)) != len(names):
            errs.append(("species", "species names must be unique"))
        seen_cells: dict[tuple[int, int], str] = {}
        wall_set = set()
        for k, (x, y) in enumerate(self.walls):
            if not in_bounds(x, y):
                errs.append((f"walls[{k}]", f"({x}, {y}) outside world bounds"))
            if (x, y) in wall_set:
                errs.append((f"walls[{k}]", f"duplicate wall at ({x}, {y})"))
            wall_set.add((x, y))
            seen_cells[(x, y)] = "wall"

        sx, sy = self.resolved_start()
        if not in_bounds(sx, sy):
            errs.append(("agent.start", f"({sx}, {sy}) outside world bounds"))
        elif (sx, sy) in wall_set:
            errs.append(("agent.start", f"({sx}, {sy}) is a wall cell"))

        for i, sp in enumerate(self.species):
            loc = f"species[{i}] ({sp.name})"
            if sp.biome is not None and sp.biome not in biome_names:
                errs.append((loc, f"unknown biome '{sp.biome}'"))
            if sp.blocking:
                if sp.respawn.delay.kind != "never":
                    errs.append((loc, "blocking species must never respawn"))
            if isinstance(sp.spawn, ExplicitSpawn):
                for cx, cy in sp.spawn.cells:
                    if not in_bounds(cx, cy):
                        errs.append((loc, f"explicit cell ({cx}, {cy}) outside world"))
                        continue
                    if (cx, cy) == (sx, sy):
                        errs.append((loc, f"explicit cell ({cx}, {cy}) is the agent start"))
                    prev = seen_cells.get((cx, cy))
                    if prev is not None:
                        errs.append((loc, f"cell ({cx}, {cy}) already used by {prev}"))
                    seen_cells[(cx, cy)] = sp.name
                    if sp.biome is not None:
                        x0, y0, x1, y1 = self.biomes[biome_names.index(sp.biome)].rect
                        if not (x0 <= cx < x1 and y0 <= cy < y1):
                            errs.append((loc, f"explicit cell ({cx}, {cy}) outside biome '{sp.biome}'"))

        reward_names = {s.name for s in self.species if not s.blocking}

        def check_values(loc: str, values: dict[str, float]) -> None:
            missing = reward_names - set(values)
            extra = set(values) - reward_names
            if missing:
                errs.append((loc, f"missing species: {sorted(missing)}"))
            if extra:
                errs.append((loc, f"unknown or blocking species: {sorted(extra)}"))

        sched = self.schedule
        if isinstance(sched, StaticSchedule):
            check_values("schedule.values", sched.values)
        elif isinstance(sched, DecayingSchedule):
            check_values("schedule.initial", sched.initial)
        elif isinstance(sched, SwitchingSchedule):
            for p, table in enumerate(sched.phases):
                check_values(f"schedule.phases[{p}]", table)
        elif isinstance(sched, FourierSchedule):
            if sched.params is not None:
                check_values("schedule.params", dict.fromkeys(sched.params, 0.0))
                for name, series in sched.params.items():
                    if len(series.a) != sched.harmonics:
                        errs.append(
                            (f"schedule.params[{name}]",
                             f"expected {sched.harmonics} harmonics, got {len(series.a)}")
                        )
            if sched.extinction_threshold is not None and self.observation.mode == "color":
                errs.append(
                    ("schedule.extinction_threshold",
                     "species replacement changes colors; color one-hot observations cannot "
                     "represent it (use binary or rgb mode)")
                )
        if self.observation.include_cue:
            if self.cue is None:
                errs.append(("observation.include_cue", "requires a cue section"))
            if not self.biomes:
                errs.append(("observation.include_cue", "requires at least one biome"))

        if errs:
            raise ConfigError(errs)
        return self


def parse_config(text: str) -> TaskConfig:
    """Parse and validate a JSON config document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError([(f"line {e.lineno}, column {e.colno}", e.msg)]) from e
    return validate_config(data)


def validate_config(data: object) -> TaskConfig:
    """Validate an already-decoded config document."""
    try:
        return TaskConfig.model_validate(data)
    except ConfigError:
        raise
    except ValidationError as e:
        errs = []
        for err in e.errors():
            loc = ".".join(str(p) for p in err["loc"]) or "<root>"
            msg = err["msg"]
            # pydantic wraps ConfigError raised inside validators; unwrap the text
            if isinstance(err.get("ctx", {}).get("error"), ConfigError):
                inner = err["ctx"]["error"]
                errs.extend(inner.errors)
                continue
            errs.append((loc, msg))
        raise ConfigError(errs) from e


def serialize_config(config: TaskConfig) -> str:
    """Canonical form: sorted keys, two-space indent, trailing newline."""
    data = config.model_dump(mode="json")
    return json.dumps(data, sort_keys=True, indent=2) + "\n"
