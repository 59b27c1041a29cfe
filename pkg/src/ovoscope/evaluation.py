"""Confusion matrix, accuracy and the incremental scenario evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Sequence

from .svm import SvmModel, LabeledSample, predict, LABEL_NAMES


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def correct(self) -> int:
        return self.tp + self.tn

    def as_dict(self) -> dict:
        return {"tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn}


def confusion(predictions: Sequence, truths: Sequence, positive="fertile") -> ConfusionMatrix:
    if len(predictions) != len(truths):
        raise ValueError(f"{len(predictions)} predictions for {len(truths)} truths")
    if not predictions:
        raise ValueError("cannot build a confusion matrix from no samples")
    tp = tn = fp = fn = 0
    for pred, truth in zip(predictions, truths):
        if truth == positive:
            if pred == positive:
                tp += 1
            else:
                fn += 1
        elif pred == positive:
            fp += 1
        else:
            tn += 1
    return ConfusionMatrix(tp, tn, fp, fn)


def accuracy(cm: ConfusionMatrix) -> float:
    """Percentage of correct predictions, ``100 * (TP + TN) / total``."""
    if cm.total == 0:
        raise ValueError("accuracy of an empty confusion matrix")
    return 100.0 * cm.correct / cm.total


def percent_str(value: float, places: int = 2) -> str:
    """Render a percentage with round-half-up at ``places`` decimals."""
    q = Decimal(1).scaleb(-places)
    return str(Decimal(repr(float(value))).quantize(q, rounding=ROUND_HALF_UP))


def mean_accuracy(accuracies: Sequence[float]) -> float:
    if not accuracies:
        raise ValueError("no scenario accuracies to average")
    return sum(accuracies) / len(accuracies)


@dataclass(frozen=True)
class Scenario:
    n: int
    correct: int

    @property
    def accuracy(self) -> float:
        return 100.0 * self.correct / self.n


@dataclass(frozen=True)
class ScenarioReport:
    scenarios: tuple[Scenario, ...]
    confusion: ConfusionMatrix = field(default_factory=ConfusionMatrix)

    @property
    def scenario_mean(self) -> float:
        """Unweighted mean of the per-scenario accuracies."""
        return mean_accuracy([s.accuracy for s in self.scenarios])

    @property
    def pooled(self) -> float:
        return accuracy(self.confusion)

    def as_dict(self) -> dict:
        return {
            "scenarios": [
                {"n": s.n, "correct": s.correct, "accuracy": s.accuracy} for s in self.scenarios
            ],
            "scenario_mean": self.scenario_mean,
            "pooled": self.pooled,
            "confusion": self.confusion.as_dict(),
        }

    def table(self) -> str:
        cm = self.confusion
        lines = [f"{'Number of Data':>14}  {'Detection':>9}  {'Accuracy (%)':>12}"]
        for s in self.scenarios:
            lines.append(f"{s.n:>14}  {s.correct:>9}  {percent_str(s.accuracy) + '%':>12}")
        lines.append(f"{'Average of accuracy':<27}{percent_str(self.scenario_mean) + '%':>12}")
        lines.append(f"{'Pooled accuracy':<27}{percent_str(self.pooled) + '%':>12}")
        lines.append(f"TP={cm.tp} TN={cm.tn} FP={cm.fp} FN={cm.fn}")
        return "\n".join(lines)


def prefix_sizes(total: int, step: int) -> list[int]:
    """step, 2*step, ... and finally ``total`` if it is not a multiple of step."""
    if step < 1:
        raise ValueError(f"step must be >= 1, got {step}")
    if total < 1:
        raise ValueError("empty test set")
    if total < step:
        raise ValueError(f"test set of {total} is smaller than step {step}")
    sizes = list(range(step, total + 1, step))
    if not sizes or sizes[-1] != total:
        sizes.append(total)
    return sizes


def scenario_report(predictions: Sequence, truths: Sequence, step: int,
                    positive="fertile") -> ScenarioReport:
    """Score nested prefixes of an ordered prediction list."""
    sizes = prefix_sizes(len(truths), step)
    hits = [p == t for p, t in zip(predictions, truths)]
    scenarios = tuple(Scenario(n, sum(hits[:n])) for n in sizes)
    return ScenarioReport(scenarios, confusion(predictions, truths, positive))


def run_scenarios(model: SvmModel, test_set: Sequence[LabeledSample], step: int = 10) -> ScenarioReport:
    if not test_set:
        raise ValueError("empty test set")
    preds = [LABEL_NAMES[predict(model, s.x)] for s in test_set]
    truths = [LABEL_NAMES[s.y] for s in test_set]
    return scenario_report(preds, truths, step)
