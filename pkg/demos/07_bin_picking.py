"""Seeded bin-picking simulation with the detect -> score -> attempt loop.

Run: python3 demos/07_bin_picking.py
"""

from graspkit import (
    CORNELL,
    GripperModel2D,
    make_scene,
    oracle_detector,
    pipeline_detector,
    run_bin_picking,
)

model = GripperModel2D()

# Five blocks on a jittered grid; the oracle detector proposes each block's
# ideal grasp, so the bin clears in exactly five attempts.
scene = make_scene(seed=42, n_objects=5)
print(f"scene: {scene.image_width}x{scene.image_height} px, "
      f"{len(scene.blocks)} blocks at {[b.center for b in scene.blocks]}")

log = run_bin_picking(scene, oracle_detector(scene), model)
print(f"oracle detector:   {log.successes}/{len(log.attempts)} attempts succeeded, "
      f"SR {log.success_rate:.0f}%, PC {log.percent_cleared:.0f}%")

# Same trial, but detections now flow through the full perception pipeline:
# annotations -> ideal heatmap bundle -> decode -> group.
scene = make_scene(seed=42, n_objects=5)
detector = pipeline_detector(scene, CORNELL.thresholds, num_classes=18, seed=42)
log = run_bin_picking(scene, detector, model)
print(f"pipeline detector: {log.successes}/{len(log.attempts)} attempts succeeded, "
      f"SR {log.success_rate:.0f}%, PC {log.percent_cleared:.0f}%")

# A detector that keeps proposing the same unreachable grasp triggers the
# stop rule: five consecutive failures on one object.
scene = make_scene(seed=42, n_objects=5)
from graspkit import Grasp

log = run_bin_picking(scene, lambda d: [Grasp(5.0, 5.0, 0.0, 30.0)], model)
print(f"stubborn detector: stopped after {len(log.attempts)} attempts, "
      f"PC {log.percent_cleared:.0f}%")
