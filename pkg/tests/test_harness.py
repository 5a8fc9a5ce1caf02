"""Run loop, metrics, logging, replay, and the resource bench."""
import io
import json

import numpy as np
import pytest

from forager.baselines import RandomPolicy, make_policy
from forager.config import validate_config
from forager.env import ForagerEnv
from forager.harness import (
    EMA_DECAY,
    REFERENCE_FPS,
    bench,
    format_bench_report,
    replay_actions,
    run,
    run_many,
    trajectory_record,
    write_log_line,
)
from forager.presets import get_preset


def constant_reward_config():
    # 2x1 ping-pong world: every step collects the +1 berry.
    return validate_config({
        "world": {"width": 2, "height": 1},
        "agent": {"start": [0, 0]},
        "species": [{"name": "berry", "color": [200, 30, 30],
                     "spawn": {"kind": "explicit", "cells": [[1, 0]]},
                     "respawn": {"delay": {"kind": "fixed", "steps": 1},
                                  "placement": "random"}}],
        "schedule": {"kind": "static", "values": {"berry": 1.0}},
        "observation": {"fov": 1},
    })


class PingPong:
    def act(self, env):
        return 3 if env.agent_pos == (0, 0) else 2


def test_ema_closed_form_under_unit_reward():
    metrics = run(constant_reward_config(), PingPong(), steps=10_000)
    assert metrics.total_reward == 10_000.0
    expected = 1.0 - 0.999 ** 10_000
    assert abs(metrics.ema_reward - expected) / expected <= 1e-12


def test_ema_zero_reward_world():
    cfg = validate_config({
        "world": {"width": 5, "height": 5},
        "species": [{"name": "a", "color": [9, 9, 9], "spawn": {"kind": "count", "n": 0}}],
        "schedule": {"kind": "static", "values": {"a": 1.0}},
        "observation": {"fov": 3},
    })
    metrics = run(cfg, RandomPolicy(0), steps=500)
    assert metrics.ema_reward == 0.0 and metrics.total_reward == 0.0


def test_run_is_deterministic():
    cfg = get_preset("forager-two-biome-morel")
    m1 = run(cfg, make_policy("random", 5), steps=2000, seed=42)
    m2 = run(cfg, make_policy("random", 5), steps=2000, seed=42)
    # Everything but the wall-clock rate must match bit-exactly.
    m1.steps_per_sec = m2.steps_per_sec = 0.0
    assert m1 == m2


def test_window_means():
    metrics = run(constant_reward_config(), PingPong(), steps=250, window_size=100)
    assert metrics.window_means == [1.0, 1.0]
    assert metrics.mean_reward == 1.0


def test_run_rejects_zero_steps():
    with pytest.raises(ValueError):
        run(constant_reward_config(), PingPong(), steps=0)


# -- trajectory log -------------------------------------------------------------

def test_log_record_count_and_schema():
    cfg = get_preset("forager-two-biome-switch")
    records = []
    run(cfg, make_policy("random", 3), steps=400, seed=1, log_sink=records.append)
    assert len(records) == 400
    for rec in records:
        assert rec["v"] == 1
        assert set(rec) == {"v", "tick", "action", "reward", "x", "y",
                            "collected", "phase", "replacement", "cue"}
    assert [r["tick"] for r in records] == list(range(1, 401))


def test_log_lines_parse_as_ndjson():
    cfg = get_preset("forager-unending-four")
    buf = io.StringIO()
    run(cfg, make_policy("random", 3), steps=150, seed=1,
        log_sink=lambda rec: write_log_line(buf, rec))
    lines = buf.getvalue().splitlines()
    assert len(lines) == 150
    parsed = [json.loads(line) for line in lines]
    assert all(len(p["cue"]) == 4 for p in parsed)


@pytest.mark.parametrize("preset", [
    "forager-extra-large",
    "forager-two-biome-morel",
    "forager-two-biome-switch",
    "forager-unending-four",
])
def test_replay_reproduces_logged_rewards(preset):
    cfg = get_preset(preset)
    records = []
    run(cfg, make_policy("random", 7), steps=300, seed=9, log_sink=records.append)
    actions = [r["action"] for r in records]
    rewards, _ = replay_actions(cfg, 9, actions)
    assert rewards == [r["reward"] for r in records]


def test_log_sink_failure_aborts_run():
    def broken(_):
        raise OSError("disk full")

    with pytest.raises(OSError, match="disk full"):
        run(constant_reward_config(), PingPong(), steps=10, log_sink=broken)


def test_trajectory_record_fields():
    cfg = constant_reward_config()
    env = ForagerEnv(cfg, seed=0)
    _, reward, info = env.step(3)
    rec = trajectory_record(env, 3, reward, info)
    assert rec["action"] == 3 and rec["reward"] == 1.0
    assert (rec["x"], rec["y"]) == (1, 0)
    assert rec["collected"] == 0
    assert rec["cue"] is None


# -- seed sweeps -----------------------------------------------------------------

def test_run_many_matches_sequential():
    cfg = get_preset("forager-two-biome-morel")
    seq = run_many(cfg, lambda s: make_policy("random", s), seeds=[1, 2, 3], steps=500)
    par = run_many(cfg, lambda s: make_policy("random", s), seeds=[1, 2, 3], steps=500,
                   workers=3)
    assert [m.total_reward for m in seq] == [m.total_reward for m in par]
    assert [m.seed for m in seq] == [1, 2, 3]


# -- bench -----------------------------------------------------------------------

def test_bench_zero_steps():
    report = bench(get_preset("forager-two-biome-morel"), steps=0)
    assert report.steps == 0
    assert report.steps_per_sec == 0.0
    assert report.state_size_samples == []


def test_bench_samples_and_bounds():
    report = bench(get_preset("forager-two-biome-switch"), steps=5000, sample_every=500)
    assert len(report.state_size_samples) == 10
    spread = max(report.state_size_samples) - min(report.state_size_samples)
    assert spread <= report.initial_object_count
    assert report.max_queue_length <= report.initial_object_count
    assert report.steps_per_sec > 0


def test_bench_rss_flag():
    report = bench(get_preset("forager-two-biome-morel"), steps=100, include_rss=True)
    assert report.max_rss_mb is not None and report.max_rss_mb > 0


def test_bench_report_format_mentions_reference():
    report = bench(get_preset("forager-two-biome-morel"), steps=100)
    text = format_bench_report(report)
    assert f"{REFERENCE_FPS:,}" in text
    assert "steps/sec" in text


def test_policy_independence_of_step_cost():
    cfg = get_preset("forager-two-biome-morel")
    up = bench(cfg, steps=30_000).steps_per_sec
    t_random = run(cfg, make_policy("random", 0), steps=30_000, seed=0).steps_per_sec
    ratio = up / t_random
    assert 0.5 <= ratio <= 2.0 or abs(up - t_random) < 10_000


def test_ema_decay_constant():
    assert EMA_DECAY == 0.999
