"""The training loss suite and its finite-difference gradient check.

Run: python3 demos/03_losses_and_gradients.py
"""

import numpy as np

from graspkit import (
    detection_loss,
    gradient_check,
    offset_loss,
    pull_loss,
    push_loss,
    total_loss,
)

rng = np.random.default_rng(1)

# Focal detection loss over a 2-class heatmap stack.  Ground-truth peaks
# are exact ones; Gaussian-rendered neighbors get a reduced penalty.
truth = rng.uniform(0.0, 0.8, size=(2, 6, 6))
truth[0, 2, 3] = 1.0
truth[1, 4, 1] = 1.0
pred = rng.uniform(0.05, 0.95, size=(2, 6, 6))
det, det_grad = detection_loss(pred, truth, n_grasps=2)
print(f"detection loss {det:.4f}, gradient norm {np.linalg.norm(det_grad):.4f}")

# Embedding pull/push: pull each pair's two values together, push different
# pairs' means at least 1 apart.
pairs = np.array([[0.1, 0.3], [2.0, 2.2], [2.4, 2.6]])
pull, _ = pull_loss(pairs)
push, _ = push_loss(pairs)
print(f"pull {pull:.4f} (pair spread), push {push:.4f} (means 2.1 and 2.5 too close)")

# Sub-pixel offset regression with smooth L1.
off, _ = offset_loss([[0.5, 0.0], [0.1, 0.2]], [[0.0, 0.0], [0.1, 0.2]])
print(f"offset loss {off:.4f}")

print(f"total   loss {total_loss(det, det, pull, push, off):.4f} (unit weights)")

# Every loss ships an analytic gradient; central finite differences verify
# them to ~1e-4 relative at smooth points.
report = gradient_check(lambda x: detection_loss(x, truth, 2), pred)
print(f"gradient check: max error {report.max_error:.2e} over "
      f"{report.n_coordinates} coordinates -> {'PASS' if report.passed else 'FAIL'}")
