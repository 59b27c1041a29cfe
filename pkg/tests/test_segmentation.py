import numpy as np
import pytest
from conftest import gray_arrays
from hypothesis import given
from hypothesis import strategies as st
from oracles import flood_fill_components

from ovoscope.errors import NoObjectError
from ovoscope.raster import GrayImage, RgbImage
from ovoscope.segmentation import (
    BinaryMask,
    CropRect,
    binarize,
    bounding_box,
    crop,
    largest_component,
    segment_crop,
)


@pytest.mark.parametrize("pixel, bit", [(124, 0), (200, 1), (125, 1)])
def test_binarize_threshold(pixel, bit):
    assert binarize(GrayImage([[pixel]]), 125).bits[0, 0] == bit


@given(gray_arrays(), st.integers(0, 255), st.integers(0, 255))
def test_binarize_monotone_in_threshold(arr, t1, t2):
    lo, hi = sorted((t1, t2))
    img = GrayImage(arr)
    assert not (binarize(img, hi).bits & ~binarize(img, lo).bits).any()


def test_single_blob_is_unchanged():
    bits = np.zeros((6, 6), bool)
    bits[1:4, 2:5] = True
    assert largest_component(BinaryMask(bits)) == BinaryMask(bits)


def test_lone_pixel_is_cleared():
    bits = np.zeros((8, 8), bool)
    bits[1:4, 1:4] = True
    bits[6, 6] = True
    out = largest_component(BinaryMask(bits)).bits
    assert not out[6, 6] and out.sum() == 9


def test_diagonal_pixels_are_separate_components():
    bits = np.array([[1, 0], [0, 1]], bool)
    assert largest_component(BinaryMask(bits)).bits.tolist() == [[True, False], [False, False]]


def test_tie_goes_to_smallest_top_left():
    bits = np.zeros((6, 6), bool)
    bits[4, 0:2] = True
    bits[1, 3:5] = True
    out = largest_component(BinaryMask(bits)).bits
    assert out[1, 3] and out[1, 4] and out.sum() == 2


def test_empty_mask_has_no_component():
    with pytest.raises(NoObjectError):
        largest_component(BinaryMask(np.zeros((3, 3), bool)))


@given(gray_arrays(max_side=12), st.integers(1, 255))
def test_largest_component_matches_flood_fill(arr, threshold):
    bits = arr >= threshold
    comps = flood_fill_components(bits.tolist())
    if not comps:
        return
    best = min(comps, key=lambda c: (-len(c), min(r for r, _ in c), min(col for _, col in c)))
    expect = np.zeros_like(bits)
    for r, c in best:
        expect[r, c] = True
    assert np.array_equal(largest_component(BinaryMask(bits)).bits, expect)


def test_bounding_box_examples():
    bits = np.zeros((10, 10), bool)
    bits[2:6, 3:8] = True
    assert bounding_box(BinaryMask(bits)) == CropRect(2, 3, 5, 7)
    assert bounding_box(BinaryMask(np.ones((4, 5), bool))) == CropRect(0, 0, 3, 4)
    point = np.zeros((9, 9), bool)
    point[4, 4] = True
    assert bounding_box(BinaryMask(point)) == CropRect(4, 4, 4, 4)


@given(gray_arrays(max_side=16))
def test_bounding_box_is_minimal_and_complete(arr):
    bits = arr >= 128
    if not bits.any():
        return
    r = bounding_box(BinaryMask(bits))
    inside = bits[r.top:r.bottom + 1, r.left:r.right + 1]
    assert inside.sum() == bits.sum()
    # every edge row/column of the box touches the object
    assert inside[0].any() and inside[-1].any() and inside[:, 0].any() and inside[:, -1].any()


def test_crop_examples():
    ramp = GrayImage(np.arange(16, dtype=np.uint8).reshape(4, 4))
    assert crop(ramp, CropRect(0, 0, 3, 3)) == ramp
    assert crop(ramp, CropRect(1, 1, 2, 2)).pixels.tolist() == [[5, 6], [9, 10]]
    assert crop(ramp, CropRect(3, 0, 3, 0)).pixels.tolist() == [[12]]


def test_crop_outside_image_fails():
    with pytest.raises(ValueError):
        crop(GrayImage(np.zeros((2, 2), np.uint8)), CropRect(0, 0, 2, 1))
    with pytest.raises(ValueError):
        CropRect(2, 0, 1, 0)


def _rgb(gray):
    return RgbImage(np.repeat(np.asarray(gray, np.uint8)[..., None], 3, axis=2))


def test_segment_crop_all_black():
    with pytest.raises(NoObjectError):
        segment_crop(_rgb(np.zeros((5, 5))))


def test_segment_crop_bright_square():
    g = np.full((20, 20), 10)
    g[7:13, 7:13] = 220
    out = segment_crop(_rgb(g))
    assert (out.height, out.width) == (6, 6)
    assert (out.pixels == 220).all()


def test_segment_crop_tight_image_unchanged():
    img = _rgb(np.full((7, 9), 200))
    assert segment_crop(img) == img


def test_segment_crop_keeps_rgb_values():
    px = np.zeros((3, 3, 3), np.uint8)
    px[1, 1] = (250, 200, 100)
    assert segment_crop(RgbImage(px)).pixels.tolist() == [[[250, 200, 100]]]


@given(gray_arrays(max_side=16))
def test_segment_crop_area_never_grows(arr):
    img = _rgb(arr)
    try:
        out = segment_crop(img)
    except NoObjectError:
        assert (arr < 125).all()
        return
    assert out.height * out.width <= img.height * img.width
