"""Soft-margin linear SVM trained with sequential minimal optimization.

The solver maximizes the dual

    sum_j a_j - 1/2 sum_{j,k} a_j a_k y_j y_k (x_j . x_k)

subject to ``0 <= a_j <= c`` and ``sum_j a_j y_j = 0``. Dual coefficients are
kept on a power-of-two grid (spacing ``2**-44`` relative to ``c``) so every
pairwise update is exact in floating point and the equality constraint holds
with zero residual rather than to within round-off.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import TrainingDataError
from .features import FEATURE_ORDER

log = logging.getLogger(__name__)

FERTILE, INFERTILE = 1, -1
LABEL_NAMES = {FERTILE: "fertile", INFERTILE: "infertile"}
LABEL_VALUES = {name: value for value, name in LABEL_NAMES.items()}


@dataclass(frozen=True)
class LabeledSample:
    x: tuple[float, ...]
    y: int

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        if self.y not in (FERTILE, INFERTILE):
            raise TrainingDataError(f"label must be +1 or -1, got {self.y!r}")


@dataclass(frozen=True)
class TrainConfig:
    c: float = 1.0
    kkt_tol: float = 1e-3
    eps: float = 1e-8
    max_passes: int = 1000
    seed: int = 0
    standardize: bool = False

    def __post_init__(self):
        if not self.c > 0:
            raise TrainingDataError(f"c must be positive, got {self.c}")
        if not (self.kkt_tol > 0 and self.eps > 0):
            raise TrainingDataError("tolerances must be positive")
        if self.max_passes < 1:
            raise TrainingDataError("max_passes must be >= 1")


@dataclass(frozen=True, eq=False)
class SvmModel:
    weights: np.ndarray
    bias: float
    c: float
    support_x: np.ndarray
    support_y: np.ndarray
    support_alpha: np.ndarray
    # full per-training-sample coefficients; None for models loaded from disk
    alphas: np.ndarray | None = None
    converged: bool = True
    passes: int = 0
    standardize: bool = False
    feature_means: np.ndarray | None = None
    feature_scales: np.ndarray | None = None
    feature_order: tuple[str, ...] = field(default=FEATURE_ORDER)

    @property
    def dim(self) -> int:
        return len(self.weights)

    def transform(self, x) -> np.ndarray:
        """Map raw features into the space the model was trained in."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.dim:
            raise ValueError(f"expected {self.dim} features, got {x.shape[-1]}")
        if self.standardize:
            return (x - self.feature_means) / self.feature_scales
        return x


def _as_arrays(samples: Sequence[LabeledSample]) -> tuple[np.ndarray, np.ndarray]:
    if not samples:
        raise TrainingDataError("no samples")
    dims = {len(s.x) for s in samples}
    if len(dims) != 1:
        raise TrainingDataError(f"inconsistent feature dimensions {sorted(dims)}")
    X = np.array([s.x for s in samples], dtype=np.float64)
    y = np.array([s.y for s in samples], dtype=np.float64)
    return X, y


def dual_objective(samples: Sequence[LabeledSample], alphas) -> float:
    alphas = np.asarray(alphas, dtype=np.float64)
    if len(alphas) != len(samples):
        raise ValueError(f"{len(alphas)} coefficients for {len(samples)} samples")
    if len(samples) == 0:
        return 0.0
    X, y = _as_arrays(samples)
    ay = alphas * y
    v = ay @ X
    return float(alphas.sum() - 0.5 * (v @ v))


def _alpha_grid(c: float, n: int) -> float:
    # values are multiples of the grid and bounded by 2**e >= c; any partial
    # sum of n of them then fits in 53 bits and is exact
    e = math.frexp(c)[1]
    bits = min(44, 52 - math.ceil(math.log2(n + 1)))
    return math.ldexp(1.0, e - bits)


def _bias(alphas, y, margins_wo_bias, c_box):
    """Bias from free support vectors, or the midpoint of the feasible interval."""
    free = (alphas > 0) & (alphas < c_box)
    if free.any():
        return float(np.mean(y[free] - margins_wo_bias[free]))
    # bound-only solutions: y f >= 1 at a=0, y f <= 1 at a=c
    target = y - margins_wo_bias
    at_zero = alphas == 0
    lower_mask = (at_zero & (y > 0)) | (~at_zero & (y < 0))
    upper_mask = (at_zero & (y < 0)) | (~at_zero & (y > 0))
    lo = target[lower_mask].max() if lower_mask.any() else -math.inf
    hi = target[upper_mask].min() if upper_mask.any() else math.inf
    if math.isinf(lo) and math.isinf(hi):
        return 0.0
    if math.isinf(lo):
        return float(hi)
    if math.isinf(hi):
        return float(lo)
    return float((lo + hi) / 2)


def _kkt_residuals(alphas, y, f, c):
    margin = y * f
    at_upper = alphas >= c * (1 - 1e-12)
    res = np.where(alphas <= 0, np.maximum(0.0, 1 - margin), np.abs(margin - 1))
    return np.where(at_upper & (alphas > 0), np.maximum(0.0, margin - 1), res)


def _standardizer(X):
    means = X.mean(axis=0)
    scales = X.std(axis=0)
    scales[scales == 0] = 1.0
    return means, scales


def train_smo(samples: Sequence[LabeledSample], cfg: TrainConfig | None = None) -> SvmModel:
    """Train a linear SVM with SMO.

    Each step updates the pair made of the maximal KKT violator and the
    partner with the best second-order gain, solved analytically and clipped
    to the box. Training stops once the violating-pair gap is at most
    ``kkt_tol``, when a step falls below ``eps``, or after ``max_passes * n``
    pair updates. The returned model has ``converged=False`` when the final
    per-sample KKT violation still exceeds ``kkt_tol``.
    """
    cfg = cfg or TrainConfig()
    X, y = _as_arrays(samples)
    n = len(y)
    if n < 2 or len(set(y.tolist())) < 2:
        raise TrainingDataError("training needs at least one sample of each class")
    if not np.isfinite(X).all():
        raise TrainingDataError("non-finite feature values")

    means = scales = None
    if cfg.standardize:
        means, scales = _standardizer(X)
        X = (X - means) / scales

    K = X @ X.T
    Q = (y[:, None] * y[None, :]) * K
    g = _alpha_grid(cfg.c, n)
    C = math.floor(cfg.c / g) * g
    tol = cfg.kkt_tol
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of 1/2 a'Qa - sum(a), the negated dual
    # a seeded scan order decides ties between equally good candidates
    order = np.random.default_rng(cfg.seed).permutation(n)
    Ko, Qo, yo = K[np.ix_(order, order)], Q[np.ix_(order, order)], y[order]
    diag = np.diag(Ko)

    updates = 0
    budget = cfg.max_passes * n
    while updates < budget:
        if updates % n == 0:
            grad = Qo @ alpha - 1.0  # refresh against drift once per pass
        up = ((yo > 0) & (alpha < C)) | ((yo < 0) & (alpha > 0))
        low = ((yo > 0) & (alpha > 0)) | ((yo < 0) & (alpha < C))
        score = -yo * grad
        i = int(np.flatnonzero(up)[np.argmax(score[up])])
        if score[i] - score[low].min() <= tol:
            break
        cand = np.flatnonzero(low & (score < score[i]))
        gap = score[i] - score[cand]
        curv = np.maximum(diag[i] + diag[cand] - 2 * Ko[i, cand], 1e-12)
        j = int(cand[np.argmax(gap * gap / curv)])

        # a_i += y_i t, a_j -= y_j t keeps sum(a y) fixed
        eta = max(diag[i] + diag[j] - 2 * Ko[i, j], 1e-12)
        room_i = C - alpha[i] if yo[i] > 0 else alpha[i]
        room_j = alpha[j] if yo[j] > 0 else C - alpha[j]
        t = min((score[i] - score[j]) / eta, room_i, room_j)
        t = round(t / g) * g
        if t < cfg.eps * (alpha[i] + alpha[j] + cfg.eps):
            break
        alpha[i] += yo[i] * t
        alpha[j] -= yo[j] * t
        grad += Qo[:, i] * (yo[i] * t) - Qo[:, j] * (yo[j] * t)
        updates += 1
        assert 0 <= alpha[i] <= C and 0 <= alpha[j] <= C
        assert float(np.sum(alpha * yo)) == 0.0

    alpha = alpha[np.argsort(order)]
    passes = math.ceil(updates / n)

    ay = alpha * y
    w = ay @ X
    scores = X @ w
    bias = _bias(alpha, y, scores, C)
    violation = float(_kkt_residuals(alpha, y, scores + bias, cfg.c).max())
    converged = violation <= tol
    if not converged:
        log.warning("SMO stopped after %d passes with KKT violation %.3g > %.3g",
                    passes, violation, tol)

    sv = alpha > 0
    return SvmModel(
        weights=w,
        bias=bias,
        c=cfg.c,
        support_x=X[sv].copy(),
        support_y=y[sv].astype(np.int64),
        support_alpha=alpha[sv].copy(),
        alphas=alpha.copy(),
        converged=converged,
        passes=passes,
        standardize=cfg.standardize,
        feature_means=means,
        feature_scales=scales,
    )


def decision_value(model: SvmModel, x) -> float:
    """``w . x + b`` in the model's training space."""
    return float(model.transform(x) @ model.weights + model.bias)


def decision_value_sv(model: SvmModel, x) -> float:
    """Support-vector form ``sum_j a_j y_j (x . x_j) + b``."""
    z = model.transform(x)
    return float((model.support_alpha * model.support_y) @ (model.support_x @ z) + model.bias)


def predict(model: SvmModel, x) -> int:
    """+1 (fertile) for a positive decision value, otherwise -1; ties go to -1."""
    return FERTILE if decision_value(model, x) > 0 else INFERTILE


def predict_label(model: SvmModel, x) -> str:
    return LABEL_NAMES[predict(model, x)]


def kkt_violation(model: SvmModel, samples: Sequence[LabeledSample]) -> float:
    """Largest KKT residual of the model's coefficients over its training samples."""
    if model.alphas is None or len(model.alphas) != len(samples):
        raise ValueError("model carries no per-sample coefficients for these samples")
    X, y = _as_arrays(samples)
    f = model.transform(X) @ model.weights + model.bias
    return float(_kkt_residuals(np.asarray(model.alphas), y, f, model.c).max())


def primal_objective(model: SvmModel, samples: Sequence[LabeledSample]) -> float:
    X, y = _as_arrays(samples)
    f = model.transform(X) @ model.weights + model.bias
    hinge = np.maximum(0.0, 1 - y * f)
    return float(0.5 * model.weights @ model.weights + model.c * hinge.sum())


# --- persistence ------------------------------------------------------------

def model_to_dict(model: SvmModel) -> dict:
    data = {
        "weights": [float(v) for v in model.weights],
        "bias": float(model.bias),
        "c": float(model.c),
        "support_vectors": [
            {"x": [float(v) for v in x], "y": int(y), "alpha": float(a)}
            for x, y, a in zip(model.support_x, model.support_y, model.support_alpha)
        ],
        "feature_order": list(model.feature_order),
        "standardize": bool(model.standardize),
        "converged": bool(model.converged),
    }
    if model.standardize:
        data["feature_means"] = [float(v) for v in model.feature_means]
        data["feature_scales"] = [float(v) for v in model.feature_scales]
    return data


def model_from_dict(data: dict) -> SvmModel:
    svs = data.get("support_vectors", [])
    dim = len(data["weights"])
    standardize = bool(data.get("standardize", False))
    return SvmModel(
        weights=np.array(data["weights"], dtype=np.float64),
        bias=float(data["bias"]),
        c=float(data["c"]),
        support_x=np.array([sv["x"] for sv in svs], dtype=np.float64).reshape(-1, dim),
        support_y=np.array([sv["y"] for sv in svs], dtype=np.int64),
        support_alpha=np.array([sv["alpha"] for sv in svs], dtype=np.float64),
        converged=bool(data.get("converged", True)),
        standardize=standardize,
        feature_means=np.array(data["feature_means"]) if standardize else None,
        feature_scales=np.array(data["feature_scales"]) if standardize else None,
        feature_order=tuple(data.get("feature_order", FEATURE_ORDER)),
    )


def save_model(model: SvmModel, path) -> None:
    # json writes floats with repr(), the shortest string that round-trips exactly
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n")


def load_model(path) -> SvmModel:
    return model_from_dict(json.loads(Path(path).read_text()))
