"""FastAPI application: presets, validation, runs, benches, renders, and live
environment sessions driven through step/reset/close."""
from __future__ import annotations

import base64
import secrets
import threading

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse, Response

from .. import __version__
from ..baselines import POLICY_NAMES, make_policy
from ..config import ConfigError, TaskConfig, parse_config
from ..env import ForagerEnv, Observation
from ..harness import bench, run, trajectory_record
from ..observation import ObservationEncoder
from ..presets import PRESETS, get_preset
from ..render import ppm_bytes, render_frame
from . import models as m


class _Session:
    def __init__(self, env: ForagerEnv, preset: str | None):
        self.env = env
        self.preset = preset
        self.lock = threading.Lock()  # one world instance is single-threaded


def _observation_payload(obs: Observation) -> m.ObservationPayload:
    return m.ObservationPayload(
        shape=tuple(obs.grid.shape),
        grid=obs.grid.tolist(),
        aux=obs.aux.tolist(),
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="forager",
        version=__version__,
        description="Constant-memory toroidal foraging worlds over HTTP",
    )
    sessions: dict[str, _Session] = {}
    registry_lock = threading.Lock()

    @app.exception_handler(ConfigError)
    def _config_error(request, exc: ConfigError):
        return JSONResponse(
            status_code=400,
            content={"detail": [{"loc": loc, "msg": msg} for loc, msg in exc.errors]},
        )

    def resolve_task(sel: m.TaskSelector) -> tuple[TaskConfig, str | None]:
        if sel.preset is not None:
            try:
                return get_preset(sel.preset), sel.preset
            except KeyError as e:
                raise HTTPException(status_code=404, detail=str(e.args[0])) from e
        return sel.config, None

    def get_session(env_id: str) -> _Session:
        session = sessions.get(env_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"no live environment '{env_id}'")
        return session

    @app.get("/health", response_model=m.HealthResponse)
    def health():
        return m.HealthResponse(status="ok", version=__version__)

    @app.get("/presets", response_model=m.PresetListResponse)
    def presets():
        infos = []
        for name, (description, factory) in PRESETS.items():
            cfg = factory()
            enc = ObservationEncoder(cfg)
            infos.append(
                m.PresetInfo(
                    name=name,
                    description=description,
                    world=(cfg.world.width, cfg.world.height),
                    fov=enc.fov,
                    observation_mode=cfg.observation.mode,
                    observation_shape=enc.shape,
                    aux_length=enc.aux_length,
                )
            )
        return m.PresetListResponse(presets=infos)

    @app.post("/validate", response_model=m.ValidateResponse)
    def validate(req: m.ValidateRequest):
        try:
            parse_config(req.text)
        except ConfigError as e:
            return m.ValidateResponse(
                valid=False,
                errors=[m.ValidateIssue(loc=loc, msg=msg) for loc, msg in e.errors],
            )
        return m.ValidateResponse(valid=True)

    @app.post("/run", response_model=m.RunResponse, response_model_exclude_none=True)
    def run_endpoint(req: m.RunRequest):
        cfg, _ = resolve_task(req)
        seed = req.seed if req.seed is not None else cfg.seed
        try:
            policy = make_policy(
                req.policy, seed if req.policy_seed is None else req.policy_seed
            )
        except KeyError as e:
            raise HTTPException(status_code=404, detail=str(e.args[0])) from e
        records: list[dict] | None = [] if req.include_log else None
        frames: list[m.FramePayload] | None = [] if req.render_every else None

        def frame_cb(tick: int, env: ForagerEnv) -> None:
            buf = render_frame(env, scale=req.render_scale)
            frames.append(
                m.FramePayload(
                    tick=tick,
                    ppm_base64=base64.b64encode(ppm_bytes(buf)).decode("ascii"),
                )
            )

        metrics = run(
            cfg,
            policy,
            req.steps,
            seed,
            window_size=req.window_size,
            log_sink=records.append if records is not None else None,
            render_every=req.render_every,
            frame_callback=frame_cb if frames is not None else None,
        )
        return m.RunResponse(
            metrics=m.MetricsModel(**metrics.__dict__),
            trajectory=(
                [m.TrajectoryRecord(**rec) for rec in records]
                if records is not None
                else None
            ),
            frames=frames,
        )

    @app.post("/bench", response_model=m.BenchReportModel)
    def bench_endpoint(req: m.BenchRequest):
        cfg, _ = resolve_task(req)
        report = bench(
            cfg,
            req.steps,
            sample_every=req.sample_every,
            include_rss=req.include_rss,
            seed=req.seed,
        )
        return m.BenchReportModel(**report.__dict__)

    @app.post("/render", response_model=m.RenderResponse)
    def render_endpoint(req: m.RenderRequest):
        cfg, _ = resolve_task(req)
        env = ForagerEnv(cfg, req.seed)
        buf = render_frame(env, scale=req.scale, fov_overlay=req.fov_overlay)
        return m.RenderResponse(
            width=buf.shape[1],
            height=buf.shape[0],
            scale=req.scale,
            ppm_base64=base64.b64encode(ppm_bytes(buf)).decode("ascii"),
        )

    # -- live environment sessions ------------------------------------------------

    @app.post("/envs", response_model=m.EnvCreateResponse)
    async def create_env(req: m.EnvCreateRequest):
        cfg, preset = resolve_task(req)
        env = ForagerEnv(cfg, req.seed)
        obs = env.reset(env.seed)
        env_id = secrets.token_hex(8)
        with registry_lock:
            sessions[env_id] = _Session(env, preset)
        return m.EnvCreateResponse(
            env_id=env_id,
            preset=preset,
            seed=env.seed,
            num_actions=env.num_actions,
            observation_shape=env.encoder.shape,
            aux_length=env.encoder.aux_length,
            observation=_observation_payload(obs),
        )

    @app.get("/envs", response_model=m.EnvListResponse)
    async def list_envs():
        with registry_lock:
            return m.EnvListResponse(env_ids=sorted(sessions))

    @app.get("/envs/{env_id}", response_model=m.EnvInfoResponse)
    async def env_info(env_id: str):
        session = get_session(env_id)
        env = session.env
        return m.EnvInfoResponse(
            env_id=env_id,
            preset=session.preset,
            seed=env.seed,
            tick=env.tick,
            num_actions=env.num_actions,
            observation_shape=env.encoder.shape,
            aux_length=env.encoder.aux_length,
            state_size=env.internal_state_size(),
        )

    @app.post("/envs/{env_id}/step", response_model=m.StepResponse)
    async def step_env(env_id: str, req: m.StepRequest):
        session = get_session(env_id)
        with session.lock:
            obs, reward, info = session.env.step(req.action)
        # Hot endpoint: serialize once and skip the response-model re-validation.
        body = m.StepResponse.model_construct(
            observation=m.ObservationPayload.model_construct(
                shape=tuple(obs.grid.shape),
                grid=obs.grid.tolist(),
                aux=obs.aux.tolist(),
            ),
            reward=reward,
            done=False,
            info=m.StepInfo.model_construct(
                tick=info["tick"], collected=info["collected"]
            ),
        ).model_dump_json()
        return Response(content=body, media_type="application/json")

    @app.post("/envs/{env_id}/reset", response_model=m.ResetResponse)
    async def reset_env(env_id: str, req: m.ResetRequest):
        session = get_session(env_id)
        with session.lock:
            obs = session.env.reset(req.seed)
        return m.ResetResponse(observation=_observation_payload(obs), seed=session.env.seed)

    @app.delete("/envs/{env_id}", status_code=204)
    async def close_env(env_id: str):
        # Idempotent: closing twice is a no-op.
        with registry_lock:
            sessions.pop(env_id, None)
        return Response(status_code=204)

    @app.get("/policies")
    def policies():
        return {"policies": list(POLICY_NAMES)}

    return app


app = create_app()
