"""GKTB tensor bundles: build one, write it, read it back bit-exactly.

Run: python3 demos/01_bundle_roundtrip.py
"""

import io

import numpy as np

from graspkit import HeatmapBundle, ValueRangeError, read_bundle, write_bundle

rng = np.random.default_rng(0)

# A bundle is everything a keypoint detector would emit for one image:
# per-class left/right heatmaps, one center heatmap, offset and embedding
# planes.  Here: 18 orientation classes on a 57x57 grid (downsample 4).
bundle = HeatmapBundle(
    left=rng.random((18, 57, 57), dtype=np.float32),
    right=rng.random((18, 57, 57), dtype=np.float32),
    center=rng.random((57, 57), dtype=np.float32),
    offsetL=rng.random((2, 57, 57), dtype=np.float32),
    offsetR=rng.random((2, 57, 57), dtype=np.float32),
    embedL=rng.normal(size=(57, 57)).astype(np.float32),
    embedR=rng.normal(size=(57, 57)).astype(np.float32),
    num_classes=18,
    downsample_ratio=4,
)

buf = io.BytesIO()
nbytes = write_bundle(bundle, buf)
print(f"serialized {nbytes} bytes ({nbytes / 1024:.0f} KiB)")

buf.seek(0)
back = read_bundle(buf)
print("value-identical after round trip:", back.equals(bundle))

buf2 = io.BytesIO()
write_bundle(back, buf2)
print("byte-identical re-serialization: ", buf2.getvalue() == buf.getvalue())

# Validation happens at the load/store boundary.  Heatmaps outside [0, 1]
# or offsets reaching 1.0 are rejected with a named error.
bundle.left[0, 0, 0] = 1.5
try:
    write_bundle(bundle, io.BytesIO())
except ValueRangeError as exc:
    print("rejected invalid bundle:", exc)
