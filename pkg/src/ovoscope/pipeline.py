"""End-to-end composition: manifest -> crops -> enhanced gray -> features -> SVM."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .enhancement import ENHANCE_MODES, ClaheConfig, enhance
from .errors import ConfigError, NetpbmError, OvoscopeError
from .features import FEATURE_ORDER, FeatureVector, extract_features
from .raster import GrayImage, RgbImage, read_image, to_grayscale
from .segmentation import DEFAULT_THRESHOLD, segment_crop
from .svm import LABEL_VALUES, LabeledSample, TrainConfig

log = logging.getLogger(__name__)

LABELS = ("fertile", "infertile", "unknown")
CSV_HEADER = ("id",) + FEATURE_ORDER + ("label",)


@dataclass(frozen=True)
class ManifestEntry:
    path: Path
    label: str

    def __post_init__(self):
        if self.label not in LABELS:
            raise ConfigError(f"unknown label {self.label!r} for {self.path}")


@dataclass(frozen=True)
class PipelineConfig:
    threshold: int = DEFAULT_THRESHOLD
    clahe: ClaheConfig = field(default_factory=ClaheConfig)
    enhance_mode: str = "clahe-he"
    svm: TrainConfig = field(default_factory=TrainConfig)
    train_fraction: float = 0.5
    split_seed: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.enhance_mode not in ENHANCE_MODES:
            raise ConfigError(f"enhance mode must be one of {ENHANCE_MODES}")
        if not 0 < self.train_fraction < 1:
            raise ConfigError("train_fraction must lie in (0, 1)")
        if not 0 <= self.threshold <= 255:
            raise ConfigError("threshold must lie in [0, 255]")


class ImageProcessingError(OvoscopeError):
    """A per-image stage failed; the message names the file."""

    def __init__(self, path, cause: Exception):
        super().__init__(f"{path}: {cause}")
        self.path = path
        self.cause = cause


# --- manifests --------------------------------------------------------------

def load_manifest(path) -> list[ManifestEntry]:
    """Read a JSON manifest; relative paths resolve against its directory."""
    path = Path(path)
    root = path.parent
    entries = []
    for item in json.loads(path.read_text()):
        p = Path(item["path"])
        entries.append(ManifestEntry(p if p.is_absolute() else root / p, item.get("label", "unknown")))
    return entries


def save_manifest(entries, path) -> None:
    path = Path(path)
    root = path.parent.resolve()
    items = []
    for e in entries:
        p = Path(e.path).resolve()
        try:
            p = p.relative_to(root)
        except ValueError:
            pass
        items.append({"path": p.as_posix(), "label": e.label})
    path.write_text(json.dumps(items, indent=2) + "\n")


def _train_quota(counts: list[int], fraction: float) -> list[int]:
    """Per-class training counts by largest remainder.

    The total is ``fraction * n`` rounded half-up and kept within [1, n - 1];
    ties between equal remainders go to the earlier class.
    """
    n = sum(counts)
    total = min(max(math.floor(fraction * n + 0.5), 1), n - 1)
    exact = [total * c / n for c in counts]
    quota = [math.floor(e) for e in exact]
    by_remainder = sorted(range(len(counts)), key=lambda k: (-(exact[k] - quota[k]), k))
    for k in by_remainder[:total - sum(quota)]:
        quota[k] += 1
    return quota


def split(entries, seed: int = 1, train_fraction: float = 0.5):
    """Stratified seeded split into (train, test).

    Each class is shuffled independently and its first quota entries go to
    training. Both halves are then shuffled so classes interleave.
    """
    by_class = {}
    for e in entries:
        by_class.setdefault(e.label, []).append(e)
    missing = [c for c in ("fertile", "infertile") if c not in by_class]
    if missing:
        raise ConfigError(f"split needs both classes; missing {missing}")
    if set(by_class) - {"fertile", "infertile"}:
        raise ConfigError("split requires labelled entries only")

    rng = np.random.default_rng(seed)
    groups = [by_class["fertile"], by_class["infertile"]]
    quota = _train_quota([len(g) for g in groups], train_fraction)
    train, test = [], []
    for group, k in zip(groups, quota):
        order = rng.permutation(len(group))
        train += [group[i] for i in order[:k]]
        test += [group[i] for i in order[k:]]
    train = [train[i] for i in rng.permutation(len(train))]
    test = [test[i] for i in rng.permutation(len(test))]
    return train, test


# --- per-image processing ---------------------------------------------------

def preprocess_image(image, cfg: PipelineConfig) -> GrayImage:
    if isinstance(image, RgbImage):
        gray = to_grayscale(segment_crop(image, cfg.threshold))
    else:
        # gray inputs take the same route through a replicated RGB view
        rgb = RgbImage(np.repeat(image.pixels[..., None], 3, axis=2))
        gray = to_grayscale(segment_crop(rgb, cfg.threshold))
    return enhance(gray, cfg.enhance_mode, cfg.clahe)


def preprocess_one(path, cfg: PipelineConfig) -> GrayImage:
    """Decode, segment and crop, convert to gray, enhance."""
    try:
        image = read_image(path)
    except (OSError, NetpbmError) as exc:
        raise ImageProcessingError(path, exc) from exc
    try:
        return preprocess_image(image, cfg)
    except OvoscopeError as exc:
        raise ImageProcessingError(path, exc) from exc


def features_one(path, cfg: PipelineConfig) -> FeatureVector:
    gray = preprocess_one(path, cfg)
    try:
        return extract_features(gray)
    except OvoscopeError as exc:
        raise ImageProcessingError(path, exc) from exc


@dataclass
class FeatureRow:
    id: str
    features: FeatureVector
    label: str
    predicted: str | None = None


def extract_all(entries, cfg: PipelineConfig):
    """Feature rows in manifest order plus the failures that were skipped."""
    def work(entry):
        try:
            return features_one(entry.path, cfg)
        except ImageProcessingError as exc:
            return exc

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(work, entries))
    else:
        results = [work(e) for e in entries]

    rows, failures = [], []
    for entry, result in zip(entries, results):
        if isinstance(result, ImageProcessingError):
            log.error("skipping %s", result)
            failures.append(result)
        else:
            rows.append(FeatureRow(Path(entry.path).stem, result, entry.label))
    return rows, failures


# --- feature CSV ------------------------------------------------------------

def rows_to_csv(rows, with_predicted: bool = False) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = CSV_HEADER + (("predicted",) if with_predicted else ())
    writer.writerow(header)
    for r in rows:
        # repr() is the shortest exact decimal form of a float
        values = [repr(float(v)) for v in r.features.as_tuple()]
        line = [r.id, *values, r.label]
        if with_predicted:
            line.append(r.predicted or "")
        writer.writerow(line)
    return buf.getvalue()


def write_csv(rows, path, with_predicted: bool = False) -> None:
    Path(path).write_text(rows_to_csv(rows, with_predicted))


def read_csv(path) -> list[FeatureRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in CSV_HEADER if c not in (reader.fieldnames or ())]
        if missing:
            raise ConfigError(f"{path}: missing columns {missing}")
        rows = []
        for rec in reader:
            label = rec["label"]
            if label not in LABELS:
                raise ConfigError(f"{path}: unknown label {label!r}")
            try:
                fv = FeatureVector(*(float(rec[k]) for k in FEATURE_ORDER))
            except ValueError as exc:
                raise ConfigError(f"{path}: bad number in row {rec['id']}: {exc}") from exc
            rows.append(FeatureRow(rec["id"], fv, label, rec.get("predicted") or None))
    return rows


def to_samples(rows) -> list[LabeledSample]:
    out = []
    for r in rows:
        if r.label not in LABEL_VALUES:
            raise ConfigError(f"row {r.id} has no training label ({r.label})")
        out.append(LabeledSample(r.features.as_tuple(), LABEL_VALUES[r.label]))
    return out
