"""Request/response models for the HTTP service."""
from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field, model_validator

from ..config import TaskConfig


class TaskSelector(BaseModel):
    """Exactly one of `preset` (a registered name) or `config` (a full document)."""

    preset: Optional[str] = None
    config: Optional[TaskConfig] = None
    seed: Optional[int] = None

    @model_validator(mode="after")
    def _exactly_one(self) -> "TaskSelector":
        if (self.preset is None) == (self.config is None):
            raise ValueError("provide exactly one of 'preset' or 'config'")
        return self


class ObservationPayload(BaseModel):
    """Grid tensor as nested uint8 rows (row, col, channel); aux as float64s."""

    shape: tuple[int, int, int]
    grid: list
    aux: list[float]


class EnvCreateRequest(TaskSelector):
    pass


class EnvCreateResponse(BaseModel):
    env_id: str
    preset: Optional[str]
    seed: int
    num_actions: int
    observation_shape: tuple[int, int, int]
    aux_length: int
    observation: ObservationPayload


class StepRequest(BaseModel):
    action: int = Field(ge=0, le=3)


class StepInfo(BaseModel):
    tick: int
    collected: Optional[int] = None


class StepResponse(BaseModel):
    observation: ObservationPayload
    reward: float
    done: bool = False  # continuing task: never true
    info: StepInfo


class ResetRequest(BaseModel):
    seed: Optional[int] = None


class ResetResponse(BaseModel):
    observation: ObservationPayload
    seed: int


class EnvInfoResponse(BaseModel):
    env_id: str
    preset: Optional[str]
    seed: int
    tick: int
    num_actions: int
    observation_shape: tuple[int, int, int]
    aux_length: int
    state_size: int  # entry count of mutable structures; stable over time


class EnvListResponse(BaseModel):
    env_ids: list[str]


class PresetInfo(BaseModel):
    name: str
    description: str
    world: tuple[int, int]
    fov: int
    observation_mode: str
    observation_shape: tuple[int, int, int]
    aux_length: int


class PresetListResponse(BaseModel):
    presets: list[PresetInfo]


class ValidateRequest(BaseModel):
    text: str


class ValidateIssue(BaseModel):
    loc: str
    msg: str


class ValidateResponse(BaseModel):
    valid: bool
    errors: list[ValidateIssue] = []


class MetricsModel(BaseModel):
    steps: int
    seed: int
    total_reward: float
    ema_reward: float
    mean_reward: float
    ema_decay: float
    window_size: int
    window_means: list[float]
    steps_per_sec: float


class TrajectoryRecord(BaseModel):
    v: int
    tick: int
    action: int
    reward: float
    x: int
    y: int
    collected: Optional[int]
    phase: int
    replacement: Optional[tuple[int, int]]
    cue: Optional[list[float]]


class FramePayload(BaseModel):
    tick: int
    ppm_base64: str


class RunRequest(TaskSelector):
    policy: str = "random"
    policy_seed: Optional[int] = None  # defaults to the world seed
    steps: int = Field(ge=1)
    window_size: int = Field(default=10_000, ge=1)
    include_log: bool = False
    render_every: Optional[int] = Field(default=None, ge=1)
    render_scale: int = Field(default=8, ge=1)


class RunResponse(BaseModel):
    metrics: MetricsModel
    trajectory: Optional[list[TrajectoryRecord]] = None
    frames: Optional[list[FramePayload]] = None


class BenchRequest(TaskSelector):
    steps: int = Field(ge=0)
    sample_every: int = Field(default=10_000, ge=1)
    include_rss: bool = False


class BenchReportModel(BaseModel):
    steps: int
    wall_time_s: float
    steps_per_sec: float
    sample_every: int
    state_size_samples: list[int]
    initial_object_count: int
    max_queue_length: int
    max_rss_mb: Optional[float]
    reference_fps: int
    reference_memory_gb: float


class RenderRequest(TaskSelector):
    scale: int = Field(default=8, ge=1)
    fov_overlay: bool = True


class RenderResponse(BaseModel):
    width: int
    height: int
    scale: int
    ppm_base64: str


class HealthResponse(BaseModel):
    status: str
    version: str
