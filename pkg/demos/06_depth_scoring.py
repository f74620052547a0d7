"""Depth-based grasp quality: collision, occupancy and height scores.

Run: python3 demos/06_depth_scoring.py
"""

import math

import numpy as np

from graspkit import DepthImage, Grasp, GripperModel2D, gripper_regions, score_grasps

# A 300x300 top-down depth image (mm): flat table at 1000 mm with one
# 40x40 px block standing 40 mm proud, plus a second taller block.
surface = 1000.0
depth = np.full((300, 300), surface, np.float32)
depth[130:170, 130:170] = surface - 40.0
depth[60:100, 200:240] = surface - 70.0
scene = DepthImage.flat_surface(depth, surface)

model = GripperModel2D()  # 17 mm fingers, 200 mm max open, 1 px per mm

candidates = [
    Grasp(150.0, 150.0, 0.0, 52.0),          # clean grasp on the low block
    Grasp(220.0, 80.0, math.pi / 2, 52.0),   # clean grasp on the tall block
    Grasp(150.0, 150.0, 0.0, 10.0),          # too narrow: fingers land on the block
    Grasp(40.0, 260.0, 0.0, 40.0),           # empty table: nothing to hold
]

(fr, fc), (ir, ic) = gripper_regions(candidates[0], model, scene.shape)
print(f"gripper footprint: {fr.size} finger px, {ir.size} interior px\n")

print(f"{'grasp':30s} {'collision':>9s} {'occupancy':>9s} {'height':>7s} {'total':>6s}")
for g, s in score_grasps(candidates, scene, model):
    label = f"({g.x:.0f},{g.y:.0f}) th={math.degrees(g.theta):.0f} w={g.w:.0f}"
    print(f"{label:30s} {s.collision:9.3f} {s.occupancy:9.3f} {s.height:7.3f} {s.total:6.3f}")

print("\nthe tall block ranks first: same clean collision/occupancy, higher elevation")
