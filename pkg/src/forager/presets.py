"""The built-in task presets and the name registry used by the CLI and service."""
from __future__ import annotations

from typing import Callable

import numpy as np

from .config import (
    RESERVED_COLORS,
    AgentSpec,
    BiomeSpec,
    CountSpawn,
    CueSpec,
    DensitySpawn,
    FixedDelay,
    FourierSchedule,
    ObservationSpecModel,
    RespawnSpec,
    SpeciesSpec,
    StaticSchedule,
    SwitchingSchedule,
    TaskConfig,
    UniformDelay,
    WorldSpec,
)


def build_extra_large() -> TaskConfig:
    """A 1000x1000 wrapping world with dense +1/-1 objects that respawn at random.

    Collected objects reappear immediately somewhere else, so the total object
    count never drifts and the world looks endless from the agent's window.
    """
    return TaskConfig(
        world=WorldSpec(width=1000, height=1000),
        species=(
            SpeciesSpec(
                name="jellybean",
                color=(220, 20, 60),
                spawn=DensitySpawn(p=0.1),
                respawn=RespawnSpec(delay=FixedDelay(steps=1), placement="random"),
            ),
            SpeciesSpec(
                name="onion",
                color=(160, 82, 45),
                spawn=DensitySpawn(p=0.1),
                respawn=RespawnSpec(delay=FixedDelay(steps=1), placement="random"),
            ),
        ),
        schedule=StaticSchedule(values={"jellybean": 1.0, "onion": -1.0}),
        observation=ObservationSpecModel(fov=11, mode="binary"),
    )


def build_two_biome_morel(fov: int = 9) -> TaskConfig:
    """Two biomes separated by an empty gap: rare +30 morels on the left, fast
    +1 oysters and -1 deathcaps on the right.

    Morels respawn in place after 2000 steps; the right-side mushrooms respawn
    after 20 steps at random spots in their biome. With fov 3 or 5 the agent
    cannot see one biome from inside the other.
    """
    left = BiomeSpec(name="morel-grove", rect=(1, 1, 13, 13))
    right = BiomeSpec(name="oyster-field", rect=(17, 1, 29, 13))
    return TaskConfig(
        world=WorldSpec(width=30, height=15),
        biomes=(left, right),
        species=(
            SpeciesSpec(
                name="morel",
                color=(101, 67, 33),
                biome="morel-grove",
                spawn=CountSpawn(n=6),
                respawn=RespawnSpec(delay=FixedDelay(steps=2000), placement="original"),
            ),
            SpeciesSpec(
                name="oyster",
                color=(255, 182, 193),
                biome="oyster-field",
                spawn=CountSpawn(n=12),
                respawn=RespawnSpec(delay=FixedDelay(steps=20), placement="random"),
            ),
            SpeciesSpec(
                name="deathcap",
                color=(255, 255, 0),
                biome="oyster-field",
                spawn=CountSpawn(n=12),
                respawn=RespawnSpec(delay=FixedDelay(steps=20), placement="random"),
            ),
        ),
        schedule=StaticSchedule(values={"morel": 30.0, "oyster": 1.0, "deathcap": -1.0}),
        observation=ObservationSpecModel(fov=fov, mode="binary"),
    )


def _switch_walls() -> tuple[tuple[int, int], ...]:
    # Dividing row with two doorways, plus one asymmetric segment per biome so
    # the agent can localize itself.
    walls = [(x, 7) for x in range(15) if x not in (3, 11)]
    walls += [(4, 3), (5, 3), (6, 3)]
    walls += [(8, 11), (9, 11), (10, 11)]
    return tuple(walls)


def build_two_biome_switch() -> TaskConfig:
    """Stacked biomes whose color-to-reward mapping flips on a hidden schedule.

    Purple and yellow mushrooms grow in both biomes and are visually identical
    across them. In phase 0 the top biome pays +4 for purple and -2 for yellow
    while everything below is poisonous (-8 purple, -14 yellow); after a switch
    the signs trade places and the bottom biome pays +4 for yellow.
    """
    purple = (128, 0, 128)
    yellow = (255, 255, 0)
    respawn = RespawnSpec(delay=FixedDelay(steps=10), placement="random")
    return TaskConfig(
        world=WorldSpec(width=15, height=15),
        agent=AgentSpec(start=(7, 3)),
        walls=_switch_walls(),
        biomes=(
            BiomeSpec(name="top", rect=(0, 0, 15, 7)),
            BiomeSpec(name="bottom", rect=(0, 8, 15, 15)),
        ),
        species=(
            SpeciesSpec(name="purple-top", color=purple, biome="top",
                        spawn=CountSpawn(n=10), respawn=respawn),
            SpeciesSpec(name="yellow-top", color=yellow, biome="top",
                        spawn=CountSpawn(n=10), respawn=respawn),
            SpeciesSpec(name="purple-bottom", color=purple, biome="bottom",
                        spawn=CountSpawn(n=10), respawn=respawn),
            SpeciesSpec(name="yellow-bottom", color=yellow, biome="bottom",
                        spawn=CountSpawn(n=10), respawn=respawn),
        ),
        schedule=SwitchingSchedule(
            period=50_000,
            phases=(
                {"purple-top": 4.0, "yellow-top": -2.0,
                 "purple-bottom": -8.0, "yellow-bottom": -14.0},
                {"purple-top": -14.0, "yellow-top": -8.0,
                 "purple-bottom": -2.0, "yellow-bottom": 4.0},
            ),
        ),
        observation=ObservationSpecModel(
            fov=9, mode="color", include_last_action=True, include_last_reward=True
        ),
    )


def build_unending_four(seed: int = 0, cue_mode: str = "windowed") -> TaskConfig:
    """Four biomes, one mushroom species each, with drifting rewards and turnover.

    Reward series are sampled harmonics recomputed on 1000-step plateaus and
    centered across all live species, so at least one species is always worth
    eating. Consuming 10,000 of a species replaces it with a fresh color and a
    fresh series. A global cue flags the best biome for 10 of every 100 steps
    (or always). Wall scatter and species colors derive from `seed`.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    start = (30, 30)

    colors: list[tuple[int, int, int]] = []
    while len(colors) < 4:
        c = tuple(int(v) for v in rng.integers(0, 256, size=3))
        if c not in colors and c not in RESERVED_COLORS:
            colors.append(c)

    cells = [(x, y) for y in range(60) for x in range(60) if (x, y) != start]
    picks = rng.choice(len(cells), size=40, replace=False)
    walls = tuple(cells[i] for i in sorted(picks))

    biome_names = ("northwest", "northeast", "southwest", "southeast")
    rects = ((0, 0, 30, 30), (30, 0, 60, 30), (0, 30, 30, 60), (30, 30, 60, 60))
    respawn = RespawnSpec(delay=UniformDelay(lo=9, hi=11), placement="random")
    return TaskConfig(
        world=WorldSpec(width=60, height=60),
        agent=AgentSpec(start=start),
        walls=walls,
        biomes=tuple(BiomeSpec(name=n, rect=r) for n, r in zip(biome_names, rects)),
        species=tuple(
            SpeciesSpec(
                name=f"{biome_names[i]}-mushroom",
                color=colors[i],
                biome=biome_names[i],
                spawn=DensitySpawn(p=0.05),
                respawn=respawn,
            )
            for i in range(4)
        ),
        schedule=FourierSchedule(
            harmonics=10,
            repeat=1000,
            period_min=1.0,
            period_max=1000.0,
            extinction_threshold=10_000,
        ),
        cue=CueSpec(period=100, duration=10, mode=cue_mode),
        observation=ObservationSpecModel(
            fov=15,
            mode="rgb",
            include_last_action=True,
            include_last_reward=True,
            include_cue=True,
        ),
        seed=seed,
    )


PRESETS: dict[str, tuple[str, Callable[[], TaskConfig]]] = {
    "forager-extra-large": (
        "1000x1000 torus, two dense +1/-1 species, fov 11 binary observations",
        build_extra_large,
    ),
    "forager-two-biome-morel": (
        "rare +30 morels vs fast +1/-1 mushrooms across a gap, fov 9 binary",
        build_two_biome_morel,
    ),
    "forager-two-biome-switch": (
        "two walled biomes whose color rewards flip on a hidden schedule, fov 9 color",
        build_two_biome_switch,
    ),
    "forager-unending-four": (
        "four biomes, drifting rewards, species turnover, global cue, fov 15 rgb",
        build_unending_four,
    ),
}


def preset_names() -> list[str]:
    return list(PRESETS)


def get_preset(name: str) -> TaskConfig:
    try:
        return PRESETS[name][1]()
    except KeyError:
        raise KeyError(
            f"unknown preset '{name}'; available: {', '.join(PRESETS)}"
        ) from None
