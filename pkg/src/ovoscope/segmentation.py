"""Threshold segmentation of the candled egg and cropping to its bounding box."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import NoObjectError
from .raster import GrayImage, RgbImage, to_grayscale

DEFAULT_THRESHOLD = 125

# 4-connectivity
_CROSS = ndimage.generate_binary_structure(2, 1)


@dataclass(frozen=True, eq=False)
class BinaryMask:
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 2 or bits.shape[0] < 1 or bits.shape[1] < 1:
            raise ValueError(f"mask must be a non-empty 2-D array, got {bits.shape}")
        bits = bits.astype(bool).copy()
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def __eq__(self, other):
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)


@dataclass(frozen=True)
class CropRect:
    """Inclusive pixel rectangle ``rows top..bottom, cols left..right``."""

    top: int
    left: int
    bottom: int
    right: int

    def __post_init__(self):
        if self.top < 0 or self.left < 0 or self.bottom < self.top or self.right < self.left:
            raise ValueError(f"invalid rectangle {self}")

    @property
    def height(self) -> int:
        return self.bottom - self.top + 1

    @property
    def width(self) -> int:
        return self.right - self.left + 1


def binarize(image: GrayImage, threshold: int = DEFAULT_THRESHOLD) -> BinaryMask:
    """Mark pixels ``>= threshold`` as object (the boundary value counts as object)."""
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold must be in [0, 255], got {threshold}")
    return BinaryMask(image.pixels >= threshold)


def largest_component(mask: BinaryMask) -> BinaryMask:
    """Keep only the largest 4-connected object component.

    Ties go to the component whose bounding box has the smallest (top, left).
    """
    labels, count = ndimage.label(mask.bits, structure=_CROSS)
    if count == 0:
        raise NoObjectError("no object pixel in mask")
    sizes = np.bincount(labels.ravel())[1:]
    boxes = ndimage.find_objects(labels)
    best = min(
        range(count),
        key=lambda k: (-sizes[k], boxes[k][0].start, boxes[k][1].start),
    )
    return BinaryMask(labels == best + 1)


def bounding_box(mask: BinaryMask) -> CropRect:
    rows = np.flatnonzero(mask.bits.any(axis=1))
    cols = np.flatnonzero(mask.bits.any(axis=0))
    if rows.size == 0:
        raise NoObjectError("no object pixel in mask")
    return CropRect(int(rows[0]), int(cols[0]), int(rows[-1]), int(cols[-1]))


def crop(image, rect: CropRect):
    """Copy the pixels inside ``rect`` out of a gray or RGB image."""
    if rect.bottom >= image.height or rect.right >= image.width:
        raise ValueError(f"{rect} exceeds {image.width}x{image.height} image")
    region = image.pixels[rect.top:rect.bottom + 1, rect.left:rect.right + 1]
    return type(image)(region)


def segment_crop(image: RgbImage, threshold: int = DEFAULT_THRESHOLD) -> RgbImage:
    """Threshold the grayscale view, keep the largest blob, crop the RGB original."""
    mask = binarize(to_grayscale(image), threshold)
    if not mask.bits.any():
        raise NoObjectError(f"no pixel reaches threshold {threshold}")
    rect = bounding_box(largest_component(mask))
    return crop(image, rect)
