"""Seeded synthetic candling images standing in for a real egg dataset.

Each image is a dark background with a backlit egg: an ellipse whose shell
rim glows brightly and whose interior brightness depends on the class.
Fertile eggs are brighter, dim strongly toward the shell, and carry a dark
embryo disc with a few dark vessel strokes radiating from it. Infertile
eggs are darker and almost evenly lit.

Randomness comes from numpy's PCG64 bit generator (``numpy.random.PCG64``),
whose stream is fixed for a given seed on every platform; Gaussian noise is
drawn from its uniforms with the Box-Muller transform.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .raster import RgbImage, encode_ppm

CLASSES = ("fertile", "infertile")

# candling glow tint (R, G, B) and its weighted gray response
_TINT = np.array([1.0, 0.78, 0.45])
_TINT_GRAY = 0.2989 * _TINT[0] + 0.587 * _TINT[1] + 0.1141 * _TINT[2]

# multiplicative darkening of embryo disc and vessel strokes
EMBRYO_GAIN = 0.35
VESSEL_GAIN = 0.55


@dataclass(frozen=True)
class SynthConfig:
    """Generator parameters; intensities are target gray levels."""

    width: int = 200
    height: int = 280
    label: str = "fertile"
    seed: int = 0
    brightness_fertile: float = 180.0
    brightness_infertile: float = 60.0
    embryo_radius_frac: float = 0.15
    noise_sigma: float = 8.0
    background: float = 10.0
    rim_brightness: float = 200.0
    rim_frac: float = 0.06
    axis_frac_x: float = 0.36
    axis_frac_y: float = 0.40
    # radial dimming toward the shell, interior * (1 - falloff * rho**2)
    falloff_fertile: float = 0.2
    falloff_infertile: float = 0.05

    def __post_init__(self):
        if self.label not in CLASSES:
            raise ConfigError(f"label must be one of {CLASSES}, got {self.label!r}")
        for name in ("brightness_fertile", "brightness_infertile", "background", "rim_brightness"):
            if not 0 <= getattr(self, name) <= 255:
                raise ConfigError(f"{name} must be a gray level in [0, 255]")
        for name in ("embryo_radius_frac", "rim_frac", "axis_frac_x", "axis_frac_y"):
            if not 0 < getattr(self, name) < 1:
                raise ConfigError(f"{name} must lie in (0, 1)")
        if self.brightness_fertile <= self.brightness_infertile:
            raise ConfigError("fertile interior must be brighter than infertile")
        if not (0 <= self.falloff_fertile < 1 and 0 <= self.falloff_infertile < 1):
            raise ConfigError("falloff must lie in [0, 1)")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be >= 0")
        if self.width < 1 or self.height < 1:
            raise ConfigError("image must be at least 1x1")
        # smallest jittered semi-axis must still cover a few pixels
        if min(self.axis_frac_x * self.width, self.axis_frac_y * self.height) * 0.95 < 2:
            raise ConfigError("egg ellipse is degenerate for this image size")


def hard_config(**overrides) -> SynthConfig:
    """Overlapping classes: a smaller brightness gap and heavy noise."""
    base = dict(brightness_fertile=170.0, noise_sigma=30.0)
    base.update(overrides)
    return SynthConfig(**base)


def box_muller(rng: np.random.Generator, shape) -> np.ndarray:
    size = int(np.prod(shape))
    half = (size + 1) // 2
    u1 = 1.0 - rng.random(half)  # (0, 1], keeps log finite
    u2 = rng.random(half)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])
    return z[:size].reshape(shape)


def _segment_distance(px, py, x0, y0, x1, y1):
    dx, dy = x1 - x0, y1 - y0
    t = np.clip(((px - x0) * dx + (py - y0) * dy) / (dx * dx + dy * dy), 0.0, 1.0)
    return np.hypot(px - (x0 + t * dx), py - (y0 + t * dy))


def generate(cfg: SynthConfig) -> tuple[RgbImage, str]:
    """Render one image. Same config and seed always give the same pixels."""
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    w, h = cfg.width, cfg.height

    cx = w / 2 + rng.uniform(-0.03, 0.03) * w
    cy = h / 2 + rng.uniform(-0.03, 0.03) * h
    ax = cfg.axis_frac_x * w * rng.uniform(0.95, 1.05)
    ay = cfg.axis_frac_y * h * rng.uniform(0.95, 1.05)
    level = rng.uniform(0.95, 1.05)

    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    rho = np.hypot((xx - cx) / ax, (yy - cy) / ay)
    inside = rho <= 1.0
    rim = inside & (rho >= 1.0 - cfg.rim_frac)

    fertile = cfg.label == "fertile"
    interior = (cfg.brightness_fertile if fertile else cfg.brightness_infertile) * level
    lum = np.full((h, w), float(cfg.background))
    falloff = cfg.falloff_fertile if fertile else cfg.falloff_infertile
    lum[inside] = interior * (1.0 - falloff * rho[inside] ** 2)

    # embryo geometry is drawn for both classes so the random stream stays aligned
    minor = 2 * min(ax, ay)
    er = cfg.embryo_radius_frac * minor
    ex = cx + rng.uniform(-0.25, 0.25) * ax
    ey = cy + rng.uniform(-0.25, 0.25) * ay
    n_vessels = int(rng.integers(2, 5))
    angles = rng.uniform(0, 2 * np.pi, size=4)
    reach = rng.uniform(0.5, 0.8, size=4)
    if fertile:
        for k in range(n_vessels):
            length = er + reach[k] * (min(ax, ay) - er)
            x1 = ex + length * math.cos(angles[k])
            y1 = ey + length * math.sin(angles[k])
            vessel = inside & (_segment_distance(xx, yy, ex, ey, x1, y1) <= 1.2)
            lum[vessel] *= VESSEL_GAIN
        embryo = np.hypot(xx - ex, yy - ey) <= er
        lum[embryo & inside] *= EMBRYO_GAIN

    lum[rim] = cfg.rim_brightness
    lum += cfg.noise_sigma * box_muller(rng, (h, w))

    rgb = lum[..., None] * (_TINT / _TINT_GRAY)
    pixels = np.clip(np.floor(rgb + 0.5), 0, 255).astype(np.uint8)
    return RgbImage(pixels), cfg.label


def generate_dataset(n_fertile: int, n_infertile: int, seed: int, out_dir,
                     hard: bool = False, **overrides) -> list[dict]:
    """Write ``n_fertile + n_infertile`` PPM files plus ``manifest.json``.

    Image ``i`` (fertile first, then infertile) uses seed ``seed + i``.
    Manifest paths are relative to ``out_dir``.
    """
    if n_fertile < 1 or n_infertile < 1:
        raise ConfigError("need at least one image of each class")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = hard_config(**overrides) if hard else SynthConfig(**overrides)
    labels = ["fertile"] * n_fertile + ["infertile"] * n_infertile
    manifest = []
    for i, label in enumerate(labels):
        image, _ = generate(replace(base, label=label, seed=seed + i))
        name = f"egg_{i:04d}_{label}.ppm"
        (out / name).write_bytes(encode_ppm(image))
        manifest.append({"path": name, "label": label})
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest
