"""Forager: a fast, constant-memory family of partially observable foraging
gridworlds on a torus, with scripted baselines and a benchmarking harness."""

from .baselines import OracleSearch, RandomPolicy, SearchNearest, bfs_torus, make_policy
from .config import ConfigError, TaskConfig, parse_config, serialize_config, validate_config
from .env import ForagerEnv, Observation
from .harness import BenchReport, RunMetrics, bench, replay_actions, run, run_many
from .presets import get_preset, preset_names
from .rewards import center_rewards, cue_vector, fourier_value
from .world import Action

__version__ = "0.1.0"

__all__ = [
    "Action",
    "BenchReport",
    "ConfigError",
    "ForagerEnv",
    "Observation",
    "OracleSearch",
    "RandomPolicy",
    "RunMetrics",
    "SearchNearest",
    "TaskConfig",
    "bench",
    "bfs_torus",
    "center_rewards",
    "cue_vector",
    "fourier_value",
    "get_preset",
    "make_policy",
    "parse_config",
    "preset_names",
    "replay_actions",
    "run",
    "run_many",
    "serialize_config",
    "validate_config",
    "__version__",
]
