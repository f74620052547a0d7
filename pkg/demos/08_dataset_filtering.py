"""Coverage-ratio filtering and RG-D whitening for dataset curation.

Run: python3 demos/08_dataset_filtering.py
"""

import numpy as np

from graspkit import (
    AJD_STATS,
    CORNELL_STATS,
    Grasp,
    classify_annotation,
    compose_rgd,
    coverage_ratio,
    invert_rgd,
)

# An object mask and three annotation qualities: dense, partial, sparse.
mask = np.zeros((80, 80), np.float32)
mask[20:60, 20:60] = 1.0

dense = [Grasp(40, 40, 0.0, 50, h=50)]
partial = [Grasp(30, 40, 0.0, 20, h=40)]
sparse = [Grasp(25, 25, 0.0, 6, h=6)]

for name, grasps in [("dense", dense), ("partial", partial), ("sparse", sparse)]:
    ratio = coverage_ratio(grasps, mask)
    decision = classify_annotation(ratio)
    print(f"{name:8s} coverage {ratio:.2f} -> {decision.decision}")

# RG-D composition: depth replaces blue, channels rescale to [0, 1], then
# whiten with the published per-dataset statistics.
rng = np.random.default_rng(0)
rgb = rng.uniform(0, 255, size=(3, 4, 4))
depth = rng.uniform(0, 255, size=(4, 4))

for stats in (CORNELL_STATS, AJD_STATS):
    out = compose_rgd(rgb, depth, stats)
    back = invert_rgd(out, stats)
    err = max(np.abs(back[:2] - rgb[:2]).max(), np.abs(back[2] - depth).max())
    print(f"{stats.profile:8s} whitened range [{out.min():+.2f}, {out.max():+.2f}], "
          f"inverse error {err:.1e}")
