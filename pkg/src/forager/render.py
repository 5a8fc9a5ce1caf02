"""Top-down raster frames of the full world, written as PPM (or PNG via Pillow)."""
from __future__ import annotations

import numpy as np

from .config import COLOR_AGENT, COLOR_BACKGROUND, COLOR_WALL
from .env import ForagerEnv

FOV_OVERLAY_COLOR = (173, 216, 230)
FOV_OVERLAY_ALPHA = 0.35


def render_frame(env: ForagerEnv, scale: int = 8, fov_overlay: bool = True) -> np.ndarray:
    """A (height*scale, width*scale, 3) uint8 image of the current world.

    Empty cells are background white, walls black, species their current colors
    (replacements repaint), the agent solid blue, and the FOV a translucent
    light-blue rectangle that wraps at the edges.
    """
    world = env.world
    n = env.schedule.n_slots
    lut = np.zeros((n + 2, 3), dtype=np.uint8)
    lut[0] = COLOR_WALL
    lut[1] = COLOR_BACKGROUND
    for slot in range(n):
        lut[slot + 2] = env.schedule.species_colors[slot]
    img = lut[world.grid + 1].astype(np.float64)

    if fov_overlay:
        fov = env.encoder.fov
        half = fov // 2
        rows = (np.arange(fov) - half + world.agent_y) % world.height
        cols = (np.arange(fov) - half + world.agent_x) % world.width
        patch = img[rows[:, None], cols[None, :]]
        overlay = np.array(FOV_OVERLAY_COLOR, dtype=np.float64)
        img[rows[:, None], cols[None, :]] = (
            (1.0 - FOV_OVERLAY_ALPHA) * patch + FOV_OVERLAY_ALPHA * overlay
        )

    img[world.agent_y, world.agent_x] = COLOR_AGENT
    out = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    if scale > 1:
        out = np.repeat(np.repeat(out, scale, axis=0), scale, axis=1)
    return out


def ppm_bytes(buffer: np.ndarray) -> bytes:
    h, w, _ = buffer.shape
    return b"P6\n%d %d\n255\n" % (w, h) + buffer.tobytes()


def write_image(buffer: np.ndarray, path: str) -> None:
    """Write PPM by default; `.png` paths use Pillow when it is installed."""
    if str(path).lower().endswith(".png"):
        try:
            from PIL import Image
        except ImportError as e:
            raise RuntimeError(
                "PNG output needs Pillow (pip install forager[png]); "
                "use a .ppm path for dependency-free output"
            ) from e
        Image.fromarray(buffer, mode="RGB").save(path)
        return
    with open(path, "wb") as f:
        f.write(ppm_bytes(buffer))
