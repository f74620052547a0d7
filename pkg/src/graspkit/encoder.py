"""Render annotation grasps into heatmap training targets.

Each surviving grasp splats an unnormalized Gaussian (peak exactly 1 at the
floor-quantized heatmap pixel) onto the left/right plane of its orientation
class and onto the single center plane; overlapping Gaussians combine by
elementwise max.  Sub-pixel offsets are stored densely at the keypoint
pixels.  Dense annotations are deduplicated first-wins: a grasp whose left
or right heatmap pixel collides with an earlier grasp's same-role pixel on
the same class plane is dropped entirely.

:func:`ideal_bundle` additionally fills the embedding planes so that the
bundle decodes back to its annotations, which makes it the oracle for
end-to-end decoder/grouper tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bundle import HeatmapBundle
from .geometry import angle_to_class, grasp_to_pair
from .losses import ground_truth_offset

# largest float32 strictly below 1.0; keeps stored offsets inside [0, 1)
_OFFSET_CEIL = np.float32(1.0 - 2.0**-24)


class AnnotationError(ValueError):
    """An annotation grasp cannot be encoded (e.g. keypoint off-image)."""


class CapacityError(ValueError):
    """More grasps than the decoder's top-k budget can represent."""


@dataclass(frozen=True)
class EncoderConfig:
    """Geometry of the target tensors.

    Heatmap dims are ceil(image dims / downsample_ratio).  When
    ``gaussian_sigma`` is None each grasp uses the scale-adaptive
    sigma = max(1, w / (3 * R)); splats are truncated at 3 sigma.
    """

    image_height: int
    image_width: int
    num_classes: int
    downsample_ratio: int = 4
    gaussian_sigma: float | None = None

    @property
    def heatmap_shape(self):
        r = self.downsample_ratio
        return (-(-self.image_height // r), -(-self.image_width // r))


@dataclass(frozen=True)
class EncodedGrasp:
    """Index entry for one surviving grasp: heatmap pixels are (row, col),
    offsets are (ox, oy) fractional parts of (x/R, y/R)."""

    index: int
    class_index: int
    left_pixel: tuple
    right_pixel: tuple
    center_pixel: tuple
    left_offset: tuple
    right_offset: tuple


def _splat(plane, row, col, sigma):
    """Max-combine a truncated Gaussian bump, peak 1.0 at (row, col)."""
    radius = int(math.ceil(3.0 * sigma))
    h, w = plane.shape
    r0, r1 = max(0, row - radius), min(h - 1, row + radius)
    c0, c1 = max(0, col - radius), min(w - 1, col + radius)
    rows = np.arange(r0, r1 + 1)
    cols = np.arange(c0, c1 + 1)
    d2 = (rows[:, None] - row) ** 2 + (cols[None, :] - col) ** 2
    bump = np.exp(-d2 / (2.0 * sigma * sigma)).astype(np.float32)
    np.maximum(plane[r0 : r1 + 1, c0 : c1 + 1], bump, out=plane[r0 : r1 + 1, c0 : c1 + 1])


def encode_targets(grasps, config):
    """Encode an ordered annotation list into bundle-shaped targets.

    Returns ``(bundle, index)`` where the bundle's embedding planes are
    zero and ``index`` lists one :class:`EncodedGrasp` per surviving grasp
    in file order.
    """
    hm_h, hm_w = config.heatmap_shape
    r = config.downsample_ratio
    n_cls = config.num_classes
    left = np.zeros((n_cls, hm_h, hm_w), dtype=np.float32)
    right = np.zeros((n_cls, hm_h, hm_w), dtype=np.float32)
    center = np.zeros((hm_h, hm_w), dtype=np.float32)
    off_l = np.zeros((2, hm_h, hm_w), dtype=np.float32)
    off_r = np.zeros((2, hm_h, hm_w), dtype=np.float32)

    seen_left = set()
    seen_right = set()
    index = []
    for gi, g in enumerate(grasps):
        pair = grasp_to_pair(g)
        for px, py in (pair.left, pair.right):
            if not (0 <= px < config.image_width and 0 <= py < config.image_height):
                raise AnnotationError(
                    f"grasp {gi}: keypoint ({px:.2f}, {py:.2f}) outside "
                    f"{config.image_width}x{config.image_height} image"
                )
        cls = angle_to_class(g.theta, n_cls)
        (lx, ly), (rx, ry) = pair.left, pair.right
        lrow, lcol = int(ly // r), int(lx // r)
        rrow, rcol = int(ry // r), int(rx // r)
        lkey = (cls, lrow, lcol)
        rkey = (cls, rrow, rcol)
        if lkey in seen_left or rkey in seen_right:
            continue  # first grasp at this pixel wins
        seen_left.add(lkey)
        seen_right.add(rkey)

        sigma = config.gaussian_sigma
        if sigma is None:
            sigma = max(1.0, g.w / (3.0 * r))
        _splat(left[cls], lrow, lcol, sigma)
        _splat(right[cls], rrow, rcol, sigma)
        crow, ccol = int(g.y // r), int(g.x // r)
        _splat(center, crow, ccol, sigma)

        lox, loy = ground_truth_offset((lx, ly), r)
        rox, roy = ground_truth_offset((rx, ry), r)
        off_l[0, lrow, lcol] = min(np.float32(lox), _OFFSET_CEIL)
        off_l[1, lrow, lcol] = min(np.float32(loy), _OFFSET_CEIL)
        off_r[0, rrow, rcol] = min(np.float32(rox), _OFFSET_CEIL)
        off_r[1, rrow, rcol] = min(np.float32(roy), _OFFSET_CEIL)
        index.append(
            EncodedGrasp(
                index=gi,
                class_index=cls,
                left_pixel=(lrow, lcol),
                right_pixel=(rrow, rcol),
                center_pixel=(crow, ccol),
                left_offset=(lox, loy),
                right_offset=(rox, roy),
            )
        )

    bundle = HeatmapBundle(
        left=left,
        right=right,
        center=center,
        offsetL=off_l,
        offsetR=off_r,
        embedL=np.zeros((hm_h, hm_w), dtype=np.float32),
        embedR=np.zeros((hm_h, hm_w), dtype=np.float32),
        num_classes=n_cls,
        downsample_ratio=r,
    )
    return bundle, index


# Background embedding levels.  Keypoint pixels carry per-grasp values that
# start >= 2 with pairwise gaps >= 1.5, so no pairing that involves a
# background pixel (or two different grasps) can pass an embedding-distance
# filter with threshold <= 1.
_BG_EMBED_LEFT = 0.0
_BG_EMBED_RIGHT = -1000.0


def ideal_bundle(grasps, config, seed=0, max_grasps=100):
    """Noise-free bundle whose decoding recovers the given annotations.

    Keypoint and center peaks are exact unit maxima, offsets are exact, and
    each grasp's left/right embeddings are equal to each other while pair
    means of different grasps stay >= 1.5 apart (deterministic per seed).
    """
    grasps = list(grasps)
    if len(grasps) > max_grasps:
        raise CapacityError(f"{len(grasps)} grasps exceed the top-{max_grasps} decoding budget")
    bundle, index = encode_targets(grasps, config)
    embed_l = np.full(bundle.embedL.shape, _BG_EMBED_LEFT, dtype=np.float32)
    embed_r = np.full(bundle.embedR.shape, _BG_EMBED_RIGHT, dtype=np.float32)
    rng = np.random.default_rng(seed)
    base = rng.uniform(2.0, 2.5)
    ranks = rng.permutation(len(index))
    for enc, rank in zip(index, ranks):
        value = np.float32(base + 1.5 * rank)
        embed_l[enc.left_pixel] = value
        embed_r[enc.right_pixel] = value
    bundle.embedL = embed_l
    bundle.embedR = embed_r
    return bundle
