"""The rectangle evaluation metric: 30-degree + Jaccard > 0.25 semantics.

Run: python3 demos/05_evaluation_metric.py
"""

import math

from graspkit import Grasp, MatchCriteria, evaluate_dataset, is_match

crit = MatchCriteria(eval_height=23.33)  # Cornell-style evaluation height
truth = Grasp(100.0, 100.0, 0.0, 40.0, h=23.33)

cases = [
    ("identical", Grasp(100.0, 100.0, 0.0, 40.0)),
    ("rotated 29 deg", Grasp(100.0, 100.0, math.radians(29), 40.0)),
    ("rotated 31 deg", Grasp(100.0, 100.0, math.radians(31), 40.0)),
    ("half width (IoU 0.5)", Grasp(100.0, 100.0, 0.0, 20.0)),
    ("fifth width (IoU 0.2)", Grasp(100.0, 100.0, 0.0, 8.0)),
    ("shifted 30 px", Grasp(130.0, 100.0, 0.0, 40.0)),
]
for name, pred in cases:
    print(f"{name:26s} -> {'match' if is_match(pred, truth, crit) else 'no match'}")

# Dataset aggregation: top-1 policy scores an image by its best-ranked
# prediction against any ground-truth grasp.
preds = {
    "img0": [Grasp(100, 100, 0.0, 40)],
    "img1": [Grasp(100, 100, math.radians(45), 40)],
    "img2": [],
}
truths = {k: [truth] for k in preds}
report = evaluate_dataset(preds, truths, crit, policy="top1")
print(f"\naccuracy {report.accuracy:.3f} ({report.correct}/{report.total} images)")
for r in report.per_image:
    print(f"  {r.image_id}: matched={r.matched}  best IoU {r.best_jaccard:.2f}")
