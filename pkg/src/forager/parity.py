"""Reference trajectories for cross-client parity checks.

A trajectory digest is sha256 over, in order: the reset observation, then for
every step the reward followed by the observation. Observations contribute the
grid tensor bytes (uint8, row-major row/col/channel) then each aux entry as a
little-endian float64; rewards contribute one little-endian float64. A client
that reproduces the digest byte-for-byte is bit-exact with the native engine.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import struct

import numpy as np

from .env import ForagerEnv, Observation
from .presets import get_preset, preset_names

FIXTURE_VERSION = 1


def _update_obs(h, obs: Observation) -> None:
    h.update(obs.grid.tobytes())
    h.update(obs.aux.astype("<f8").tobytes())


def trajectory_digest(env: ForagerEnv, actions: list[int]) -> tuple[str, list[float]]:
    """Digest of (reset obs, then reward + obs per step); also the first rewards."""
    h = hashlib.sha256()
    _update_obs(h, env.reset(env.seed))
    first_rewards: list[float] = []
    for a in actions:
        obs, reward, _ = env.step(a)
        h.update(struct.pack("<d", reward))
        _update_obs(h, obs)
        if len(first_rewards) < 8:
            first_rewards.append(reward)
    return h.hexdigest(), first_rewards


def generate_fixtures(
    presets: list[str], seeds: list[int], steps: int
) -> dict:
    runs = []
    for p_index, preset in enumerate(presets):
        cfg = get_preset(preset)
        for seed in seeds:
            rng = np.random.Generator(
                np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(p_index,)))
            )
            actions = [int(a) for a in rng.integers(0, 4, size=steps)]
            env = ForagerEnv(cfg, seed)
            digest, first_rewards = trajectory_digest(env, actions)
            runs.append(
                {
                    "preset": preset,
                    "seed": seed,
                    "steps": steps,
                    "actions": actions,
                    "digest": digest,
                    "first_rewards": first_rewards,
                }
            )
    return {"version": FIXTURE_VERSION, "runs": runs}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        description="Generate reference trajectory digests for parity testing."
    )
    parser.add_argument("--out", required=True)
    parser.add_argument("--steps", type=int, default=10_000)
    parser.add_argument("--seeds", type=int, default=5, help="use seeds 0..N-1")
    parser.add_argument(
        "--presets", nargs="*", default=None, help="default: all registered presets"
    )
    args = parser.parse_args(argv)
    presets = args.presets if args.presets else preset_names()
    fixtures = generate_fixtures(presets, list(range(args.seeds)), args.steps)
    with open(args.out, "w") as f:
        json.dump(fixtures, f)
    print(f"wrote {len(fixtures['runs'])} reference runs to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
