"""Histogram equalization, CLAHE and the hybrid CLAHE-then-HE enhancement.

All transfer functions round half-up using integer arithmetic, so every
result is bit-exact and platform independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .raster import LEVELS, MAXVAL, GrayImage

ENHANCE_MODES = ("none", "he", "clahe", "clahe-he")


@dataclass(frozen=True)
class ClaheConfig:
    tiles_x: int = 8
    tiles_y: int = 8
    alpha: float = 40.0
    s_max: float = 4.0

    def __post_init__(self):
        if self.tiles_x < 1 or self.tiles_y < 1:
            raise ConfigError(f"tile grid must be at least 1x1, got {self.tiles_x}x{self.tiles_y}")
        if not 1 <= self.alpha <= 100:
            raise ConfigError(f"alpha must be in [1, 100], got {self.alpha}")
        if not self.s_max >= 1:
            raise ConfigError(f"s_max must be >= 1, got {self.s_max}")


def _cdf_map(counts: np.ndarray, total: int) -> np.ndarray:
    """round_half_up(255 * cdf) along the last axis, as uint8."""
    cum = np.cumsum(counts, axis=-1, dtype=np.int64)
    return ((2 * MAXVAL * cum + total) // (2 * total)).astype(np.uint8)


def he_transfer(image: GrayImage) -> np.ndarray:
    """The 256-entry level map used by :func:`equalize_hist`."""
    counts = np.bincount(image.pixels.ravel(), minlength=LEVELS)
    return _cdf_map(counts, image.pixels.size)


def equalize_hist(image: GrayImage) -> GrayImage:
    return GrayImage(he_transfer(image)[image.pixels])


def clip_limit(tile_pixels: int, levels: int = LEVELS, alpha: float = 40.0,
               s_max: float = 4.0) -> float:
    """Clip limit ``beta = (M / N) * (1 + alpha / 100 * (s_max - 1))``.

    Args:
        tile_pixels: pixel count M of the contextual region.
        levels: number of gray levels N.
        alpha: clip factor in [1, 100].
        s_max: maximum slope, >= 1.
    """
    if tile_pixels < 1:
        raise ConfigError(f"tile must hold at least one pixel, got {tile_pixels}")
    if levels != LEVELS:
        raise ConfigError(f"only {LEVELS} gray levels are supported, got {levels}")
    if not 1 <= alpha <= 100:
        raise ConfigError(f"alpha must be in [1, 100], got {alpha}")
    if not s_max >= 1:
        raise ConfigError(f"s_max must be >= 1, got {s_max}")
    return tile_pixels / levels * (1 + alpha / 100 * (s_max - 1))


def clip_ceiling(beta: float) -> int:
    """Integer per-bin ceiling applied to tile histograms."""
    return max(1, math.floor(beta))


def clip_histogram(counts: np.ndarray, ceiling: int) -> np.ndarray:
    """Clip bins at ``ceiling`` and spread the excess uniformly in one pass.

    The ``excess % 256`` leftover counts go one each to evenly strided bins,
    so the returned histogram has exactly the input mass.
    """
    counts = np.asarray(counts, dtype=np.int64)
    excess = int(np.maximum(counts - ceiling, 0).sum())
    out = np.minimum(counts, ceiling) + excess // LEVELS
    rest = excess % LEVELS
    if rest:
        out[(np.arange(rest) * LEVELS) // rest] += 1
    return out


def effective_grid(height: int, width: int, cfg: ClaheConfig) -> tuple[int, int]:
    """Tile grid (rows, cols), shrunk so every tile holds at least one pixel."""
    return min(cfg.tiles_y, height), min(cfg.tiles_x, width)


def tile_edges(length: int, tiles: int) -> np.ndarray:
    return (np.arange(tiles + 1) * length) // tiles


def pad_to_grid(pixels: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Mirror the bottom and right edges until every tile has the same size.

    Equal tiles give equal clip ceilings, so a constant image produces the
    same transfer map in every tile.
    """
    h, w = pixels.shape
    return np.pad(pixels, ((0, -h % rows), (0, -w % cols)), mode="symmetric")


def tile_histograms(image: GrayImage, cfg: ClaheConfig) -> tuple[np.ndarray, np.ndarray]:
    """Clipped-and-redistributed histograms per tile of the padded image.

    Returns:
        ``(hists, sizes)`` with ``hists`` of shape ``(rows, cols, 256)`` and
        ``sizes`` the pixel count M of each tile, shape ``(rows, cols)``.
    """
    ty, tx = effective_grid(*image.pixels.shape, cfg)
    pixels = pad_to_grid(image.pixels, ty, tx)
    h, w = pixels.shape
    ye, xe = tile_edges(h, ty), tile_edges(w, tx)
    hists = np.zeros((ty, tx, LEVELS), dtype=np.int64)
    sizes = np.zeros((ty, tx), dtype=np.int64)
    for r in range(ty):
        for c in range(tx):
            tile = pixels[ye[r]:ye[r + 1], xe[c]:xe[c + 1]]
            m = tile.size
            ceiling = clip_ceiling(clip_limit(m, LEVELS, cfg.alpha, cfg.s_max))
            hists[r, c] = clip_histogram(np.bincount(tile.ravel(), minlength=LEVELS), ceiling)
            sizes[r, c] = m
    return hists, sizes


def _blend_axis(length: int, edges: np.ndarray):
    """Neighbouring tile indices and the weight of the second one, per coordinate."""
    centers = (edges[:-1] + edges[1:] - 1) / 2.0
    pos = np.arange(length)
    k0 = np.searchsorted(centers, pos, side="right") - 1
    k0 = np.clip(k0, 0, len(centers) - 1)
    k1 = np.minimum(k0 + 1, len(centers) - 1)
    span = centers[k1] - centers[k0]
    weight = np.where(span > 0, (pos - centers[k0]) / np.where(span > 0, span, 1.0), 0.0)
    # outside the outermost centers only the nearest tile contributes
    weight = np.clip(weight, 0.0, 1.0)
    return k0, k1, weight


def clahe(image: GrayImage, cfg: ClaheConfig | None = None) -> GrayImage:
    """Contrast limited adaptive histogram equalization with bilinear blending."""
    cfg = cfg or ClaheConfig()
    h, w = image.pixels.shape
    hists, sizes = tile_histograms(image, cfg)
    luts = _cdf_map(hists, sizes[..., None]).astype(np.float64)
    ty, tx = hists.shape[:2]
    # tile centers live in padded coordinates; only original pixels are blended
    r0, r1, wy = _blend_axis(h, tile_edges(h + (-h % ty), ty))
    c0, c1, wx = _blend_axis(w, tile_edges(w + (-w % tx), tx))
    v = image.pixels.astype(np.intp)
    R0, R1 = r0[:, None], r1[:, None]
    C0, C1 = c0[None, :], c1[None, :]
    WY, WX = wy[:, None], wx[None, :]
    top = (1 - WX) * luts[R0, C0, v] + WX * luts[R0, C1, v]
    bottom = (1 - WX) * luts[R1, C0, v] + WX * luts[R1, C1, v]
    out = np.floor((1 - WY) * top + WY * bottom + 0.5)
    return GrayImage(np.clip(out, 0, MAXVAL).astype(np.uint8))


def hybrid_clahe_he(image: GrayImage, cfg: ClaheConfig | None = None) -> GrayImage:
    """CLAHE followed by global histogram equalization."""
    return equalize_hist(clahe(image, cfg))


def enhance(image: GrayImage, mode: str = "clahe-he", cfg: ClaheConfig | None = None) -> GrayImage:
    if mode == "none":
        return image
    if mode == "he":
        return equalize_hist(image)
    if mode == "clahe":
        return clahe(image, cfg)
    if mode == "clahe-he":
        return hybrid_clahe_he(image, cfg)
    raise ConfigError(f"unknown enhance mode {mode!r}; expected one of {ENHANCE_MODES}")
