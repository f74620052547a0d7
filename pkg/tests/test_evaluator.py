"""Rectangle metric semantics, dataset aggregation and fps measurement."""

import math
import time

import numpy as np
import pytest

from graspkit import (
    Grasp,
    MatchCriteria,
    PairingError,
    evaluate_dataset,
    is_match,
    measure_fps,
)

CORNELL_CRIT = MatchCriteria(eval_height=23.33)
AJD_CRIT = MatchCriteria(eval_height=20.0)


def test_identity_matches():
    g = Grasp(100, 100, 0.3, 40, h=23.33)
    assert is_match(g, g, CORNELL_CRIT)


@pytest.mark.parametrize("crit", [CORNELL_CRIT, AJD_CRIT])
def test_rotation_threshold(crit):
    truth = Grasp(100, 100, 0.0, 40, h=crit.eval_height)
    off31 = Grasp(100, 100, math.radians(31), 40)
    assert not is_match(off31, truth, crit)  # 31 deg > 30 deg
    off29 = Grasp(100, 100, math.radians(29), 40)
    assert is_match(off29, truth, crit)  # within 30 deg, large overlap


@pytest.mark.parametrize("crit", [CORNELL_CRIT, AJD_CRIT])
def test_contained_half_width_rect(crit):
    truth = Grasp(100, 100, 0.0, 40, h=crit.eval_height)
    pred = Grasp(100, 100, 0.0, 20)  # half the width, same h -> IoU exactly 0.5
    assert is_match(pred, truth, crit)


def test_jaccard_threshold_strict():
    # width ratio 1/4 -> contained rect IoU exactly 0.25, NOT greater
    # (h = 20 keeps all shoelace arithmetic exact in binary floating point)
    truth = Grasp(100, 100, 0.0, 40, h=20.0)
    pred = Grasp(100, 100, 0.0, 10)
    assert not is_match(pred, truth, AJD_CRIT)


def test_angle_wraps_modulo_pi():
    truth = Grasp(50, 50, math.radians(89), 30, h=20)
    pred = Grasp(50, 50, math.radians(-89), 30)
    assert is_match(pred, truth, AJD_CRIT)  # wrapped distance 2 deg


def test_truth_keeps_annotated_height():
    truth = Grasp(100, 100, 0.0, 40, h=200.0)  # tall annotated rect
    pred = Grasp(100, 100, 0.0, 40)  # evaluates at h = 23.33
    # IoU = 23.33/200 = 0.117 < 0.25
    assert not is_match(pred, truth, CORNELL_CRIT)


def test_scale_invariance():
    rng = np.random.default_rng(3)
    for _ in range(30):
        t = Grasp(float(rng.uniform(40, 60)), float(rng.uniform(40, 60)),
                  float(rng.uniform(-1.5, 1.5)), float(rng.uniform(10, 30)), h=20.0)
        p = Grasp(t.x + float(rng.uniform(-8, 8)), t.y + float(rng.uniform(-8, 8)),
                  t.theta, t.w * float(rng.uniform(0.7, 1.3)))
        s = float(rng.uniform(0.5, 3.0))
        crit = MatchCriteria(eval_height=20.0)
        crit_scaled = MatchCriteria(eval_height=20.0 * s)
        t2 = Grasp(t.x * s, t.y * s, t.theta, t.w * s, h=t.h * s)
        p2 = Grasp(p.x * s, p.y * s, p.theta, p.w * s)
        assert is_match(p, t, crit) == is_match(p2, t2, crit_scaled)


def _dataset(n_images, n_correct):
    preds, truths = {}, {}
    for i in range(n_images):
        gid = f"img{i:02d}"
        truth = Grasp(100, 100, 0.2, 40, h=23.33)
        truths[gid] = [truth]
        if i < n_correct:
            preds[gid] = [Grasp(100, 100, 0.2, 40)]
        else:
            preds[gid] = [Grasp(100, 100, 0.2 - math.radians(45), 40)]
    return preds, truths


def test_evaluate_all_match():
    preds, truths = _dataset(10, 10)
    report = evaluate_dataset(preds, truths, CORNELL_CRIT)
    assert report.accuracy == 1.0 and report.correct == 10


def test_evaluate_counts():
    preds, truths = _dataset(10, 9)
    report = evaluate_dataset(preds, truths, CORNELL_CRIT)
    assert report.accuracy == pytest.approx(0.9)
    assert report.total == 10


def test_evaluate_empty_predictions_incorrect():
    preds = {"a": []}
    truths = {"a": [Grasp(10, 10, 0.0, 10, h=20)]}
    report = evaluate_dataset(preds, truths, AJD_CRIT)
    assert report.accuracy == 0.0
    assert report.per_image[0].best_angle_diff is None


def test_evaluate_top1_vs_topn():
    truth = Grasp(100, 100, 0.0, 40, h=23.33)
    bad = Grasp(100, 100, math.radians(45), 40)
    good = Grasp(100, 100, 0.0, 40)
    preds = {"a": [bad, good]}
    truths = {"a": [truth]}
    assert evaluate_dataset(preds, truths, CORNELL_CRIT, policy="top1").accuracy == 0.0
    assert evaluate_dataset(preds, truths, CORNELL_CRIT, policy="topn").accuracy == 1.0


def test_evaluate_orphan_ids():
    preds, truths = _dataset(3, 3)
    del preds["img01"]
    with pytest.raises(PairingError, match="img01"):
        evaluate_dataset(preds, truths, CORNELL_CRIT)


def test_evaluate_permutation_invariant():
    preds, truths = _dataset(8, 5)
    base = evaluate_dataset(preds, truths, CORNELL_CRIT).accuracy
    items = list(preds.items())[::-1]
    assert evaluate_dataset(dict(items), truths, CORNELL_CRIT).accuracy == base


def test_measure_fps_sleep_fixture():
    fps = measure_fps(lambda _: time.sleep(0.02), [None], warmup=5, timed=50, repeats=3)
    assert fps == pytest.approx(50.0, abs=5.0)


def test_measure_fps_zero_work():
    assert measure_fps(lambda _: None, [None]) > 1000.0


def test_measure_fps_full_grouping_pipeline():
    # throughput of the real decode+group path on a 57x57x18 ideal bundle;
    # recorded for reference, no target asserted (hardware-specific)
    from graspkit import CORNELL, EncoderConfig, group, ideal_bundle
    from helpers import random_separated_grasps

    rng = np.random.default_rng(64)
    config = EncoderConfig(228, 228, 18, 4)
    bundle = ideal_bundle(random_separated_grasps(rng, 5), config, seed=64)
    fps = measure_fps(lambda b: group(b, CORNELL.thresholds, k=100), [bundle])
    print(f"group() pipeline throughput: {fps:.1f} fps")
    assert fps > 0.0


def test_measure_fps_validates_protocol():
    with pytest.raises(ValueError):
        measure_fps(lambda _: None, [None], warmup=2)
    with pytest.raises(ValueError):
        measure_fps(lambda _: None, [None], timed=10)


def test_criteria_validation():
    with pytest.raises(ValueError):
        MatchCriteria(min_jaccard=0.0)
    with pytest.raises(ValueError):
        MatchCriteria(max_angle_diff=2.0)
