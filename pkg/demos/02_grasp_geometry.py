"""Grasp representations: keypoint pairs, center form, classes, rotated IoU.

Run: python3 demos/02_grasp_geometry.py
"""

import math

from graspkit import (
    KeypointPair,
    OrientedRect,
    angle_to_class,
    class_to_angle,
    grasp_to_pair,
    pair_to_grasp,
    rotated_iou,
)

# Two keypoints (left-middle, right-middle) define a grasp.  The center
# form is (x, y, theta, w): midpoint, axis angle, jaw opening.
pair = KeypointPair.of((3, 7), (9, 4))
g = pair_to_grasp(pair)
print(f"keypoints {pair.left} / {pair.right}")
print(f"  -> center ({g.x}, {g.y}), theta {math.degrees(g.theta):.2f} deg, w {g.w:.4f}")

back = grasp_to_pair(g)
print(f"  -> back to keypoints {back.left} / {back.right}")

# Orientation classes quantize (-90, 90] into |C| bins; class c represents
# the angle pi*c/|C| - pi/2.  Assignment snaps to the nearest representative
# with wraparound, so +89 deg is close to the -90 deg class.
for theta_deg in (0, 30, 89, -89):
    c = angle_to_class(math.radians(theta_deg), 18)
    rep = math.degrees(class_to_angle(c, 18))
    print(f"theta {theta_deg:+4d} deg -> class {c:2d} (representative {rep:+.0f} deg)")

# The evaluation metric needs intersection-over-union of rotated rectangles,
# computed by exact convex clipping.
a = OrientedRect((0.0, 0.0), 1.0, 1.0, 0.0)
b = OrientedRect((0.5, 0.0), 1.0, 1.0, 0.0)
print(f"unit squares offset by 0.5: IoU = {rotated_iou(a, b):.6f} (exactly 1/3)")
tilted = OrientedRect((0.0, 0.0), 1.0, 1.0, math.radians(45))
print(f"same square tilted 45 deg:  IoU = {rotated_iou(a, tilted):.6f}")
