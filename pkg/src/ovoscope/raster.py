"""Image containers, Netpbm I/O, weighted grayscale conversion and histograms.

Images are thin frozen wrappers around read-only ``uint8`` numpy arrays:
``GrayImage.pixels`` has shape ``(height, width)`` and ``RgbImage.pixels``
has shape ``(height, width, 3)``, both row-major with a top-left origin.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    EmptyHistogramError,
    MalformedHeaderError,
    NetpbmError,
    TruncatedDataError,
    UnknownMagicError,
    UnsupportedMaxvalError,
)

LEVELS = 256
MAXVAL = LEVELS - 1

# Grayscale weights in units of 1e-4 so the conversion is exact integer math.
GRAY_WEIGHTS = (2989, 5870, 1141)
_WEIGHT_SCALE = 10000


def _frozen_uint8(array, ndim: int, name: str) -> np.ndarray:
    arr = np.asarray(array)
    if arr.ndim != ndim:
        raise ValueError(f"{name} pixels must be {ndim}-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be at least 1x1, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"{name} pixels must be integers, got {arr.dtype}")
        if arr.min() < 0 or arr.max() > MAXVAL:
            raise ValueError(f"{name} pixel values must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    arr = np.ascontiguousarray(arr).copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GrayImage:
    pixels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pixels", _frozen_uint8(self.pixels, 2, "GrayImage"))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


@dataclass(frozen=True, eq=False)
class RgbImage:
    pixels: np.ndarray

    def __post_init__(self):
        arr = _frozen_uint8(self.pixels, 3, "RgbImage")
        if arr.shape[2] != 3:
            raise ValueError(f"RgbImage needs 3 channels, got shape {arr.shape}")
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def __eq__(self, other):
        if not isinstance(other, RgbImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"RgbImage({self.width}x{self.height})"


@dataclass(frozen=True, eq=False)
class Histogram:
    """Per-level pixel counts over the 256 gray levels."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (LEVELS,):
            raise ValueError(f"histogram needs {LEVELS} bins, got {counts.shape}")
        if (counts < 0).any():
            raise ValueError("histogram counts must be non-negative")
        counts = counts.copy()
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability mass over the 256 gray levels."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.shape != (LEVELS,):
            raise ValueError(f"pmf needs {LEVELS} bins, got {probs.shape}")
        if (probs < 0).any() or abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError("pmf must be non-negative and sum to 1")
        probs = probs.copy()
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)


# --- Netpbm -----------------------------------------------------------------

_MAGIC = {b"P2": (1, False), b"P5": (1, True), b"P3": (3, False), b"P6": (3, True)}
_TOKEN = re.compile(rb"\s*(?:#[^\n\r]*[\n\r]\s*)*([^\s#]+)")


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` header tokens after the magic, skipping '#' comments.

    Returns the tokens and the offset just past the last one.
    """
    pos = 2
    tokens = []
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise MalformedHeaderError("header ends before width/height/maxval")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens, pos


def decode_netpbm(data: bytes) -> GrayImage | RgbImage:
    """Decode a P2/P3/P5/P6 byte stream with maxval 255."""
    magic = bytes(data[:2])
    if magic not in _MAGIC:
        raise UnknownMagicError(f"unknown Netpbm magic {magic!r}")
    channels, binary = _MAGIC[magic]

    tokens, pos = _header_tokens(data, 3)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise MalformedHeaderError(f"non-integer header field in {tokens!r}") from None
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"invalid dimensions {width}x{height}")
    if maxval != MAXVAL:
        raise UnsupportedMaxvalError(f"maxval must be 255, got {maxval}")

    n = width * height * channels
    if binary:
        if pos >= len(data) or not data[pos:pos + 1].isspace():
            raise TruncatedDataError("missing whitespace before binary raster")
        raster = data[pos + 1:pos + 1 + n]
        if len(raster) < n:
            raise TruncatedDataError(f"expected {n} raster bytes, got {len(raster)}")
        values = np.frombuffer(raster, dtype=np.uint8)
    else:
        body = re.sub(rb"#[^\n\r]*", b" ", bytes(data[pos:]))
        fields = body.split()
        if len(fields) < n:
            raise TruncatedDataError(f"expected {n} samples, got {len(fields)}")
        try:
            values = np.array([int(f) for f in fields[:n]], dtype=np.int64)
        except ValueError:
            raise NetpbmError("non-integer sample in ASCII raster") from None
        if values.min() < 0 or values.max() > MAXVAL:
            raise NetpbmError("ASCII sample outside [0, 255]")

    if channels == 1:
        return GrayImage(values.reshape(height, width))
    return RgbImage(values.reshape(height, width, 3))


def _encode(magic: str, pixels: np.ndarray, width: int, height: int, binary: bool) -> bytes:
    header = f"{magic}\n{width} {height}\n{MAXVAL}\n".encode("ascii")
    if binary:
        return header + pixels.tobytes()
    per_row = pixels.reshape(height, -1)
    lines = (" ".join(map(str, row.tolist())) for row in per_row)
    return header + ("\n".join(lines) + "\n").encode("ascii")


def encode_pgm(image: GrayImage, binary: bool = True) -> bytes:
    return _encode("P5" if binary else "P2", image.pixels, image.width, image.height, binary)


def encode_ppm(image: RgbImage, binary: bool = True) -> bytes:
    return _encode("P6" if binary else "P3", image.pixels, image.width, image.height, binary)


def read_image(path) -> GrayImage | RgbImage:
    return decode_netpbm(Path(path).read_bytes())


def write_image(path, image: GrayImage | RgbImage, binary: bool = True) -> None:
    if isinstance(image, GrayImage):
        data = encode_pgm(image, binary)
    else:
        data = encode_ppm(image, binary)
    Path(path).write_bytes(data)


# --- conversions and histograms ---------------------------------------------

def to_grayscale(image: RgbImage) -> GrayImage:
    """Weighted luminance ``0.2989 R + 0.587 G + 0.1141 B``, rounded half-up."""
    px = image.pixels.astype(np.int64)
    wr, wg, wb = GRAY_WEIGHTS
    acc = wr * px[..., 0] + wg * px[..., 1] + wb * px[..., 2]
    gray = (acc + _WEIGHT_SCALE // 2) // _WEIGHT_SCALE
    return GrayImage(np.clip(gray, 0, MAXVAL))


def compute_histogram(image: GrayImage) -> Histogram:
    return Histogram(np.bincount(image.pixels.ravel(), minlength=LEVELS))


def to_pmf(hist: Histogram) -> Pmf:
    total = hist.total
    if total == 0:
        raise EmptyHistogramError("histogram is empty (degenerate crop)")
    return Pmf(hist.counts / total)
