"""First-order statistics of the gray-level histogram.

The five features (mean, entropy, variance, skewness, excess kurtosis) are
computed from the normalized histogram, not from the pixels directly.
"""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass

import numpy as np

from .errors import DegenerateHistogramError
from .raster import LEVELS, GrayImage, Pmf, compute_histogram, to_pmf

FEATURE_ORDER = ("mean", "entropy", "variance", "skewness", "kurtosis")

_LEVELS = np.arange(LEVELS, dtype=np.float64)


@dataclass(frozen=True)
class FeatureVector:
    mean: float
    entropy: float
    variance: float
    skewness: float
    kurtosis: float

    def as_tuple(self) -> tuple[float, ...]:
        return astuple(self)


def fos_mean(pmf: Pmf) -> float:
    return math.fsum(_LEVELS * pmf.probs)


def fos_entropy(pmf: Pmf) -> float:
    """Shannon entropy in bits; empty bins contribute nothing."""
    p = pmf.probs[pmf.probs > 0]
    return max(0.0, -math.fsum(p * np.log2(p)))


def _central_moment(pmf: Pmf, mu: float, k: int) -> float:
    return math.fsum((_LEVELS - mu) ** k * pmf.probs)


def fos_variance(pmf: Pmf, mu: float) -> float:
    return _central_moment(pmf, mu, 2)


def _check_sigma(sigma: float) -> None:
    if not sigma > 0:
        raise DegenerateHistogramError("zero variance: skewness/kurtosis undefined")


def fos_skewness(pmf: Pmf, mu: float, sigma: float) -> float:
    _check_sigma(sigma)
    return _central_moment(pmf, mu, 3) / sigma**3


def fos_kurtosis(pmf: Pmf, mu: float, sigma: float) -> float:
    """Excess kurtosis (fourth standardized moment minus 3)."""
    _check_sigma(sigma)
    return _central_moment(pmf, mu, 4) / sigma**4 - 3.0


def features_from_pmf(pmf: Pmf) -> FeatureVector:
    mu = fos_mean(pmf)
    var = fos_variance(pmf, mu)
    sigma = math.sqrt(var)
    return FeatureVector(
        mean=mu,
        entropy=fos_entropy(pmf),
        variance=var,
        skewness=fos_skewness(pmf, mu, sigma),
        kurtosis=fos_kurtosis(pmf, mu, sigma),
    )


def extract_features(image: GrayImage) -> FeatureVector:
    return features_from_pmf(to_pmf(compute_histogram(image)))
