"""Command-line client for the service.

Every subcommand speaks the HTTP API. By default requests are routed to an
in-process application instance; pass --server to target a running one.
Exit codes: 0 ok, 1 configuration error, 2 I/O error.
"""
from __future__ import annotations

import argparse
import asyncio
import base64
import json
import sys
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forager",
        description="Foraging gridworld simulator: runs, benchmarks, rendering.",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running service (default: in-process)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_task_args(p):
        p.add_argument("--preset", help="registered preset name")
        p.add_argument("--config", help="path to a task config JSON file")
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("run", help="run a policy and report metrics")
    add_task_args(p)
    p.add_argument("--policy", default="random", help="random | nearest | oracle")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--window", type=int, default=10_000, help="reward window size")
    p.add_argument("--log", help="write an NDJSON trajectory log to this path")
    p.add_argument("--render-every", type=int, default=None, metavar="K")
    p.add_argument("--out", help="directory for rendered frames (with --render-every)")
    p.add_argument("--scale", type=int, default=8, help="render pixel scale")

    p = sub.add_parser("bench", help="throughput and state-size benchmark")
    add_task_args(p)
    p.add_argument("--steps", type=int, default=1_000_000)
    p.add_argument("--sample-every", type=int, default=10_000)
    p.add_argument("--rss", action="store_true", help="also report peak process RSS")

    p = sub.add_parser("render", help="write one frame of the initial world")
    add_task_args(p)
    p.add_argument("--out", required=True, help="output image path (.ppm or .png)")
    p.add_argument("--scale", type=int, default=8)

    sub.add_parser("presets", help="list built-in presets")

    p = sub.add_parser("validate", help="validate a task config file")
    p.add_argument("--config", required=True)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8750)
    return parser


def _task_payload(args) -> dict:
    if (args.preset is None) == (args.config is None):
        raise CliError("provide exactly one of --preset or --config", EXIT_CONFIG)
    payload: dict = {}
    if args.preset is not None:
        payload["preset"] = args.preset
    else:
        try:
            text = Path(args.config).read_text()
        except OSError as e:
            raise CliError(f"cannot read config: {e}", EXIT_IO) from e
        try:
            payload["config"] = json.loads(text)
        except json.JSONDecodeError as e:
            raise CliError(f"config is not valid JSON: {e}", EXIT_CONFIG) from e
    if args.seed is not None:
        payload["seed"] = args.seed
    return payload


def _detail_text(response: httpx.Response) -> str:
    try:
        detail = response.json().get("detail", response.text)
    except ValueError:
        return response.text
    if isinstance(detail, list):
        parts = []
        for item in detail:
            if isinstance(item, dict):
                loc = item.get("loc", "")
                if isinstance(loc, (list, tuple)):
                    loc = ".".join(str(p) for p in loc)
                parts.append(f"{loc}: {item.get('msg', item)}")
            else:
                parts.append(str(item))
        return "\n".join(parts)
    return str(detail)


async def _request(client: httpx.AsyncClient, method: str, url: str, **kwargs) -> dict:
    try:
        response = await client.request(method, url, **kwargs)
    except httpx.HTTPError as e:
        raise CliError(f"service unreachable: {e}", EXIT_IO) from e
    if response.status_code >= 400:
        raise CliError(_detail_text(response), EXIT_CONFIG)
    if response.status_code == 204:
        return {}
    return response.json()


def _write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise CliError(f"cannot write {path}: {e}", EXIT_IO) from e


def _write_bytes(path: Path, data: bytes) -> None:
    try:
        path.write_bytes(data)
    except OSError as e:
        raise CliError(f"cannot write {path}: {e}", EXIT_IO) from e


async def cmd_run(client, args) -> int:
    payload = _task_payload(args)
    payload.update(
        policy=args.policy,
        steps=args.steps,
        window_size=args.window,
        include_log=args.log is not None,
        render_every=args.render_every,
        render_scale=args.scale,
    )
    if args.render_every is not None and not args.out:
        raise CliError("--render-every needs --out DIR", EXIT_CONFIG)
    data = await _request(client, "POST", "/run", json=payload)
    metrics = data["metrics"]
    if args.log is not None:
        lines = [json.dumps(rec, separators=(",", ":")) for rec in data["trajectory"]]
        _write_text(args.log, "\n".join(lines) + "\n")
    if args.render_every is not None:
        out_dir = Path(args.out)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise CliError(f"cannot create {out_dir}: {e}", EXIT_IO) from e
        for frame in data.get("frames") or []:
            _write_bytes(
                out_dir / f"frame_{frame['tick']:09d}.ppm",
                base64.b64decode(frame["ppm_base64"]),
            )
    print(f"steps            {metrics['steps']:,}")
    print(f"seed             {metrics['seed']}")
    print(f"total reward     {metrics['total_reward']:.6g}")
    print(f"mean reward      {metrics['mean_reward']:.6g}")
    print(f"ema reward       {metrics['ema_reward']:.6g} (decay {metrics['ema_decay']})")
    print(f"steps/sec        {metrics['steps_per_sec']:,.0f}")
    if metrics["window_means"]:
        tail = ", ".join(f"{v:.4g}" for v in metrics["window_means"][-5:])
        print(f"window means     ...{tail} (window {metrics['window_size']:,})")
    return EXIT_OK


async def cmd_bench(client, args) -> int:
    payload = _task_payload(args)
    payload.update(steps=args.steps, sample_every=args.sample_every, include_rss=args.rss)
    data = await _request(client, "POST", "/bench", json=payload)
    print(f"{'steps':<22}{data['steps']:,}")
    print(f"{'wall time (s)':<22}{data['wall_time_s']:.2f}")
    print(f"{'speed (steps/sec)':<22}{data['steps_per_sec']:,.0f}")
    print(f"{'initial objects':<22}{data['initial_object_count']:,}")
    print(f"{'max respawn queue':<22}{data['max_queue_length']:,}")
    samples = data["state_size_samples"]
    if samples:
        print(f"{'state size (entries)':<22}{min(samples):,} .. {max(samples):,}")
    if data.get("max_rss_mb") is not None:
        print(f"{'peak rss (MB)':<22}{data['max_rss_mb']:,.1f}")
    print(
        f"{'reference desktop':<22}{data['reference_fps']:,} steps/sec at "
        f"{data['reference_memory_gb']} GB"
    )
    return EXIT_OK


async def cmd_render(client, args) -> int:
    payload = _task_payload(args)
    payload["scale"] = args.scale
    data = await _request(client, "POST", "/render", json=payload)
    raw = base64.b64decode(data["ppm_base64"])
    out = Path(args.out)
    if out.suffix.lower() == ".png":
        try:
            from PIL import Image
        except ImportError as e:
            raise CliError(
                "PNG output needs Pillow; install forager[png] or use .ppm", EXIT_CONFIG
            ) from e
        import io

        img = Image.open(io.BytesIO(raw))
        try:
            img.save(out)
        except OSError as e:
            raise CliError(f"cannot write {out}: {e}", EXIT_IO) from e
    else:
        _write_bytes(out, raw)
    print(f"wrote {out} ({data['width']}x{data['height']})")
    return EXIT_OK


async def cmd_presets(client, args) -> int:
    data = await _request(client, "GET", "/presets")
    for info in data["presets"]:
        shape = "x".join(str(d) for d in info["observation_shape"])
        print(
            f"{info['name']:<28} {info['world'][0]}x{info['world'][1]:<6} "
            f"obs {shape:<12} aux {info['aux_length']:<3} {info['description']}"
        )
    return EXIT_OK


async def cmd_validate(client, args) -> int:
    try:
        text = Path(args.config).read_text()
    except OSError as e:
        raise CliError(f"cannot read config: {e}", EXIT_IO) from e
    data = await _request(client, "POST", "/validate", json={"text": text})
    if data["valid"]:
        print("OK")
        return EXIT_OK
    for issue in data["errors"]:
        print(f"{issue['loc']}: {issue['msg']}", file=sys.stderr)
    return EXIT_CONFIG


async def dispatch(args) -> int:
    if args.command == "serve":
        import uvicorn

        from .service.app import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return EXIT_OK

    if args.server:
        client = httpx.AsyncClient(base_url=args.server, timeout=None)
    else:
        from .service.app import create_app

        client = httpx.AsyncClient(
            transport=httpx.ASGITransport(app=create_app()),
            base_url="http://forager.internal",
            timeout=None,
        )
    handlers = {
        "run": cmd_run,
        "bench": cmd_bench,
        "render": cmd_render,
        "presets": cmd_presets,
        "validate": cmd_validate,
    }
    async with client:
        return await handlers[args.command](client, args)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return asyncio.run(dispatch(args))
    except CliError as e:
        print(str(e), file=sys.stderr)
        return e.code
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
