"""Run loop, online metrics, trajectory logging, and the resource benchmark."""
from __future__ import annotations

import json
import resource
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .config import TaskConfig
from .env import ForagerEnv

EMA_DECAY = 0.999
LOG_SCHEMA_VERSION = 1

# Published single-core reference point, printed alongside bench results for
# context; the acceptance threshold is deliberately hardware-adjusted below it.
REFERENCE_FPS = 159_879
REFERENCE_MEMORY_GB = 0.1


@dataclass
class RunMetrics:
    steps: int
    seed: int
    total_reward: float
    ema_reward: float
    mean_reward: float
    ema_decay: float
    window_size: int
    window_means: list[float]
    steps_per_sec: float


@dataclass
class BenchReport:
    steps: int
    wall_time_s: float
    steps_per_sec: float
    sample_every: int
    state_size_samples: list[int] = field(default_factory=list)
    initial_object_count: int = 0
    max_queue_length: int = 0
    max_rss_mb: Optional[float] = None
    reference_fps: int = REFERENCE_FPS
    reference_memory_gb: float = REFERENCE_MEMORY_GB


def trajectory_record(
    env: ForagerEnv, action: int, reward: float, info: dict
) -> dict:
    """One newline-delimited log record; `v` is the schema version."""
    rec = {
        "v": LOG_SCHEMA_VERSION,
        "tick": info["tick"],
        "action": action,
        "reward": reward,
        "x": env.world.agent_x,
        "y": env.world.agent_y,
        "collected": info["collected"],
        "phase": env.schedule.phase,
        "replacement": None,
        "cue": env.last_cue.tolist() if env.last_cue is not None else None,
    }
    rep = info.get("replacement")
    if rep is not None:
        rec["replacement"] = [rep.old_species_id, rep.new_species_id]
    return rec


def run(
    config: TaskConfig,
    policy,
    steps: int,
    seed: int | None = None,
    *,
    ema_decay: float = EMA_DECAY,
    window_size: int = 10_000,
    log_sink: Callable[[dict], None] | None = None,
    render_every: int | None = None,
    frame_callback: Callable[[int, ForagerEnv], None] | None = None,
    env: ForagerEnv | None = None,
) -> RunMetrics:
    """Drive `policy` for `steps` ticks of a continuing task (no episode resets).

    Metrics are accumulated online in constant memory. When `log_sink` is given
    it receives one record per step; a sink failure aborts the run.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if env is None:
        env = ForagerEnv(config, seed)
    complement = 1.0 - ema_decay
    ema = 0.0
    total = 0.0
    window_sum = 0.0
    window_means: list[float] = []
    t0 = time.perf_counter()
    for i in range(steps):
        action = policy.act(env)
        _, reward, info = env.step(action)
        ema = ema_decay * ema + complement * reward
        total += reward
        window_sum += reward
        if (i + 1) % window_size == 0:
            window_means.append(window_sum / window_size)
            window_sum = 0.0
        if log_sink is not None:
            log_sink(trajectory_record(env, action, reward, info))
        if render_every is not None and (i + 1) % render_every == 0 and frame_callback:
            frame_callback(env.tick, env)
    elapsed = time.perf_counter() - t0
    return RunMetrics(
        steps=steps,
        seed=env.seed,
        total_reward=total,
        ema_reward=ema,
        mean_reward=total / steps,
        ema_decay=ema_decay,
        window_size=window_size,
        window_means=window_means,
        steps_per_sec=steps / elapsed if elapsed > 0 else 0.0,
    )


def run_many(
    config: TaskConfig,
    policy_factory: Callable[[int], object],
    seeds: Iterable[int],
    steps: int,
    workers: int | None = None,
) -> list[RunMetrics]:
    """Independent seed sweep; one world and one policy instance per worker."""
    seeds = list(seeds)

    def one(seed: int) -> RunMetrics:
        return run(config, policy_factory(seed), steps, seed)

    if workers is None or workers <= 1:
        return [one(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, seeds))


def replay_actions(
    config: TaskConfig, seed: int, actions: Iterable[int]
) -> tuple[list[float], ForagerEnv]:
    """Re-run a logged action sequence; rewards reproduce bit-exactly."""
    env = ForagerEnv(config, seed)
    rewards = []
    for a in actions:
        _, r, _ = env.step(a)
        rewards.append(r)
    return rewards, env


def write_log_line(stream, record: dict) -> None:
    stream.write(json.dumps(record, separators=(",", ":")) + "\n")


def bench(
    config: TaskConfig,
    steps: int,
    *,
    sample_every: int = 10_000,
    include_rss: bool = False,
    seed: int | None = None,
) -> BenchReport:
    """Step the world under the constant-up policy and record throughput plus
    internal-structure size samples.

    The size metric counts entries of every mutable structure (grid cells,
    respawn queue, schedule state) so constant-memory behavior is testable
    deterministically; `include_rss` adds the process peak RSS for reports.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    report = BenchReport(steps=steps, wall_time_s=0.0, steps_per_sec=0.0, sample_every=sample_every)
    if steps == 0:
        return report
    env = ForagerEnv(config, seed)
    report.initial_object_count = env.world.initial_object_count
    step = env.step
    max_q = 0
    samples = report.state_size_samples
    t0 = time.perf_counter()
    for i in range(steps):
        step(0)
        if (i + 1) % sample_every == 0:
            samples.append(env.internal_state_size())
            q = env.world.queue_length()
            if q > max_q:
                max_q = q
    elapsed = time.perf_counter() - t0
    report.wall_time_s = elapsed
    report.steps_per_sec = steps / elapsed if elapsed > 0 else 0.0
    report.max_queue_length = max_q
    if include_rss:
        rss_kb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
        report.max_rss_mb = rss_kb / 1024.0
    return report


def format_bench_report(report: BenchReport) -> str:
    lines = [
        f"{'steps':<22}{report.steps:,}",
        f"{'wall time (s)':<22}{report.wall_time_s:.2f}",
        f"{'speed (steps/sec)':<22}{report.steps_per_sec:,.0f}",
        f"{'initial objects':<22}{report.initial_object_count:,}",
        f"{'max respawn queue':<22}{report.max_queue_length:,}",
    ]
    if report.state_size_samples:
        lo = min(report.state_size_samples)
        hi = max(report.state_size_samples)
        lines.append(f"{'state size (entries)':<22}{lo:,} .. {hi:,}")
    if report.max_rss_mb is not None:
        lines.append(f"{'peak rss (MB)':<22}{report.max_rss_mb:,.1f}")
    lines.append(
        f"{'reference desktop':<22}{report.reference_fps:,} steps/sec at "
        f"{report.reference_memory_gb} GB"
    )
    return "\n".join(lines)
