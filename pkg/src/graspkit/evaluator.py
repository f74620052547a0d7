"""Rectangle-metric grasp evaluation and throughput measurement.

A prediction counts as correct when its angle is within the angular
tolerance (default 30 deg, wrapped modulo pi) of some ground-truth grasp
AND the Jaccard index of the two oriented rectangles is strictly greater
than the threshold (default 0.25).  Because the center-form representation
drops the rectangle height, predictions always evaluate with the dataset's
published average height; ground truth keeps its annotated height when
present.
"""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass, field

from .geometry import OrientedRect, angle_diff, rotated_iou


class PairingError(ValueError):
    """Prediction and truth sets do not cover the same image ids."""


@dataclass(frozen=True)
class MatchCriteria:
    """Thresholds of the rectangle metric plus the evaluation height."""

    max_angle_diff: float = math.pi / 6
    min_jaccard: float = 0.25
    eval_height: float = 23.33

    def __post_init__(self):
        if not 0 < self.min_jaccard < 1:
            raise ValueError(f"min_jaccard must lie in (0, 1), got {self.min_jaccard}")
        if not 0 < self.max_angle_diff <= math.pi / 2:
            raise ValueError(f"max_angle_diff must lie in (0, pi/2], got {self.max_angle_diff}")


@dataclass
class ImageResult:
    image_id: str
    matched: bool
    best_jaccard: float
    best_angle_diff: float | None

    def to_dict(self):
        return {
            "image_id": self.image_id,
            "matched": self.matched,
            "best_jaccard": self.best_jaccard,
            "best_angle_diff": self.best_angle_diff,
        }


@dataclass
class EvalReport:
    total: int
    correct: int
    accuracy: float
    per_image: list = field(default_factory=list)
    fps: float | None = None

    def to_dict(self):
        return {
            "total": self.total,
            "correct": self.correct,
            "accuracy": self.accuracy,
            "fps": self.fps,
            "per_image": [r.to_dict() for r in self.per_image],
        }


def _eval_rects(pred, truth, criteria):
    pr = OrientedRect((pred.x, pred.y), pred.w, criteria.eval_height, pred.theta)
    th = truth.h if truth.h is not None else criteria.eval_height
    tr = OrientedRect((truth.x, truth.y), truth.w, th, truth.theta)
    return pr, tr


def is_match(pred, truth, criteria):
    """True iff angle within tolerance and rotated IoU above the threshold."""
    if angle_diff(pred.theta, truth.theta) > criteria.max_angle_diff:
        return False
    pr, tr = _eval_rects(pred, truth, criteria)
    return rotated_iou(pr, tr) > criteria.min_jaccard


def _image_stats(preds, truths, criteria):
    matched = False
    best_j = 0.0
    best_a = None
    for p in preds:
        for t in truths:
            a = angle_diff(p.theta, t.theta)
            pr, tr = _eval_rects(p, t, criteria)
            j = rotated_iou(pr, tr)
            best_j = max(best_j, j)
            best_a = a if best_a is None else min(best_a, a)
            if a <= criteria.max_angle_diff and j > criteria.min_jaccard:
                matched = True
    return matched, best_j, best_a


def evaluate_dataset(predictions, truths, criteria, policy="top1"):
    """Aggregate the match metric over a dataset.

    ``predictions`` maps image id to a ranked grasp list, ``truths`` to the
    annotation list.  Under ``top1`` an image is correct iff its first
    prediction matches any ground truth; under ``topn`` any listed
    prediction may match.  Empty prediction lists count as incorrect.
    """
    if policy not in ("top1", "topn"):
        raise ValueError(f"unknown policy {policy!r}")
    pred_ids = set(predictions)
    truth_ids = set(truths)
    if pred_ids != truth_ids:
        missing = sorted(truth_ids - pred_ids)
        extra = sorted(pred_ids - truth_ids)
        raise PairingError(
            f"image ids do not pair up: missing predictions for {missing}, "
            f"predictions without truth for {extra}"
        )
    per_image = []
    correct = 0
    for image_id in sorted(truth_ids):
        preds = list(predictions[image_id])
        if policy == "top1":
            preds = preds[:1]
        matched, best_j, best_a = _image_stats(preds, truths[image_id], criteria)
        if matched:
            correct += 1
        per_image.append(ImageResult(image_id, matched, best_j, best_a))
    total = len(per_image)
    accuracy = correct / total if total else 0.0
    return EvalReport(total=total, correct=correct, accuracy=accuracy, per_image=per_image)


def measure_fps(pipeline, inputs, warmup=5, timed=50, repeats=3):
    """Median-of-repeats frames per second of ``pipeline`` over ``inputs``.

    Runs at least 5 warm-up and 50 timed calls per repetition, cycling the
    input list, and reports timed count / wall-clock seconds.
    """
    if warmup < 5:
        raise ValueError(f"need >= 5 warm-up runs, got {warmup}")
    if timed < 50:
        raise ValueError(f"need >= 50 timed runs, got {timed}")
    if repeats < 1:
        raise ValueError(f"need >= 1 repetition, got {repeats}")
    inputs = list(inputs)
    if not inputs:
        raise ValueError("no inputs to time")
    rates = []
    for _ in range(repeats):
        for i in range(warmup):
            pipeline(inputs[i % len(inputs)])
        t0 = time.perf_counter()
        for i in range(timed):
            pipeline(inputs[i % len(inputs)])
        elapsed = time.perf_counter() - t0
        rates.append(timed / elapsed)
    return statistics.median(rates)
