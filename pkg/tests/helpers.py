"""Shared test fixtures: independent oracles and seeded generators."""

import math

import numpy as np

from graspkit import Grasp, HeatmapBundle, OrientedRect, wrap_angle


def iou_rasterized(rect_a, rect_b, resolution=1000):
    """Rasterization oracle for rotated-rectangle IoU.

    Samples a resolution x resolution point grid over the joint bounding
    box and counts membership; independent of the polygon-clipping path.
    """
    corners = np.vstack([rect_a.corners(), rect_b.corners()])
    lo = corners.min(axis=0) - 1e-6
    hi = corners.max(axis=0) + 1e-6
    xs = np.linspace(lo[0], hi[0], resolution, dtype=np.float32)
    ys = np.linspace(lo[1], hi[1], resolution, dtype=np.float32)

    def inside(rect):
        cx, cy = rect.center
        c, s = math.cos(rect.theta), math.sin(rect.theta)
        dx = xs - np.float32(cx)
        dy = ys - np.float32(cy)
        u = np.float32(c) * dx[None, :] + np.float32(s) * dy[:, None]
        v = np.float32(c) * dy[:, None] - np.float32(s) * dx[None, :]
        np.abs(u, out=u)
        np.abs(v, out=v)
        return (u <= rect.width / 2) & (v <= rect.height / 2)

    in_a = inside(rect_a)
    in_b = inside(rect_b)
    union = np.count_nonzero(in_a | in_b)
    if union == 0:
        return 0.0
    return np.count_nonzero(in_a & in_b) / union


def naive_detection_loss(pred, truth, n_grasps, alpha=2.0, beta=4.0, eps=1e-12):
    """Literal double-loop transcription of the per-pixel focal loss."""
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.ndim == 2:
        pred = pred[None]
        truth = truth[None]
    total = 0.0
    for c in range(pred.shape[0]):
        for i in range(pred.shape[1]):
            for j in range(pred.shape[2]):
                yhat = min(max(pred[c, i, j], eps), 1.0 - eps)
                y = truth[c, i, j]
                if y == 1.0:
                    total += (1.0 - yhat) ** alpha * math.log(yhat)
                else:
                    total += (1.0 - y) ** beta * yhat**alpha * math.log(1.0 - yhat)
    return -total / max(int(n_grasps), 1)


def random_rect(rng, span=5.0):
    return OrientedRect(
        center=(float(rng.uniform(-span, span)), float(rng.uniform(-span, span))),
        width=float(rng.uniform(0.5, 4.0)),
        height=float(rng.uniform(0.5, 4.0)),
        theta=float(rng.uniform(-math.pi / 2, math.pi / 2)),
    )


def random_separated_grasps(rng, n, image=228, grid=3, w_range=(20.0, 36.0)):
    """1..grid^2 grasps whose keypoints stay > 4R pixels apart pairwise."""
    cell = image // grid
    cells = rng.permutation(grid * grid)[:n]
    grasps = []
    for cellno in cells:
        row, col = divmod(int(cellno), grid)
        cx = col * cell + cell / 2 + float(rng.uniform(-4, 4))
        cy = row * cell + cell / 2 + float(rng.uniform(-4, 4))
        theta = wrap_angle(float(rng.uniform(-math.pi / 2, math.pi / 2)))
        w = float(rng.uniform(*w_range))
        grasps.append(Grasp(cx, cy, theta, w))
    return grasps


def random_bundle(rng, max_classes=5, max_dim=12):
    """A valid random bundle (uniform heatmaps, offsets in [0,1), normal embeds)."""
    c = int(rng.integers(1, max_classes))
    h = int(rng.integers(2, max_dim))
    w = int(rng.integers(2, max_dim))
    return HeatmapBundle(
        left=rng.random((c, h, w), dtype=np.float32),
        right=rng.random((c, h, w), dtype=np.float32),
        center=rng.random((h, w), dtype=np.float32),
        offsetL=rng.random((2, h, w), dtype=np.float32),
        offsetR=rng.random((2, h, w), dtype=np.float32),
        embedL=rng.normal(size=(h, w)).astype(np.float32),
        embedR=rng.normal(size=(h, w)).astype(np.float32),
        num_classes=c,
        downsample_ratio=int(rng.integers(1, 8)),
    )


def grouping_bundle(rng, num_classes=6, dim=24, ratio=4):
    """Random but structured bundle that yields plenty of grasp candidates."""
    return HeatmapBundle(
        left=rng.random((num_classes, dim, dim), dtype=np.float32),
        right=rng.random((num_classes, dim, dim), dtype=np.float32),
        center=rng.random((dim, dim), dtype=np.float32),
        offsetL=rng.random((2, dim, dim), dtype=np.float32),
        offsetR=rng.random((2, dim, dim), dtype=np.float32),
        embedL=rng.normal(0.0, 1.0, size=(dim, dim)).astype(np.float32),
        embedR=rng.normal(0.0, 1.0, size=(dim, dim)).astype(np.float32),
        num_classes=num_classes,
        downsample_ratio=ratio,
    )


def grasp_key(g, digits=9):
    return (round(g.x, digits), round(g.y, digits), round(g.theta, digits), round(g.w, digits))


def recovered_fraction(truths, found, eval_height, max_angle):
    """Fraction of truth grasps matched by some found grasp at IoU > 0.9."""
    from graspkit import angle_diff, rotated_iou

    hit = 0
    for t in truths:
        t_rect = OrientedRect((t.x, t.y), t.w, eval_height, t.theta)
        for f in found:
            f_rect = OrientedRect((f.x, f.y), f.w, eval_height, f.theta)
            if rotated_iou(t_rect, f_rect) > 0.9 and angle_diff(t.theta, f.theta) < max_angle:
                hit += 1
                break
    return hit / len(truths) if truths else 1.0
