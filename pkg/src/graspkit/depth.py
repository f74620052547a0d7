"""Model-based grasp scoring on top-down depth images.

The gripper projects to three rectangles in the image plane: two finger
footprints placed outside the keypoints along the grasp axis and the
interior area spanning between them.  Three scores, each in [0, 1], judge a
grasp against a depth image (millimeters, larger = farther from the
camera):

    collision  s_c = mean over finger pixels of H(d(p) - d(p_c))
    occupancy  s_o = mean over interior pixels of H(d_S(p_c) - d(p))
    height     s_h = |d(p_c) - d_S(p_c)| / |d_S(p_c)|, clamped to [0, 1]

with p_c the grasp center, d_S the supporting-surface depth map and H the
strict Heaviside step (H(0) = 0).  The total is the plain sum s_c+s_o+s_h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bundle import read_gktb, write_gktb


class GripperCapacityError(ValueError):
    """Grasp opening exceeds the gripper's maximal open width."""


class DegenerateRegionError(ValueError):
    """A gripper region rasterized to zero pixels after clipping."""


@dataclass
class DepthImage:
    """Depth grid plus the supporting-surface depth map, both millimeters."""

    depth: np.ndarray
    surface: np.ndarray

    def __post_init__(self):
        self.depth = np.asarray(self.depth, dtype=np.float32)
        self.surface = np.asarray(self.surface, dtype=np.float32)
        if self.depth.shape != self.surface.shape:
            raise ValueError(
                f"depth {self.depth.shape} and surface {self.surface.shape} shapes differ"
            )
        if self.depth.ndim != 2:
            raise ValueError(f"depth image must be 2-D, got ndim={self.depth.ndim}")
        if not (self.depth > 0).all() or not (self.surface > 0).all():
            raise ValueError("depths must be strictly positive millimeters")

    @classmethod
    def flat_surface(cls, depth, surface_mm):
        depth = np.asarray(depth, dtype=np.float32)
        return cls(depth, np.full(depth.shape, float(surface_mm), dtype=np.float32))

    @property
    def shape(self):
        return self.depth.shape


@dataclass(frozen=True)
class GripperModel2D:
    """Projected parallel-jaw gripper.

    finger_length_mm extends along the closing axis beyond each keypoint,
    finger_thickness_mm across it; pixels_per_mm scales physical millimeters
    to image pixels.
    """

    finger_thickness_mm: float = 17.0
    max_open_mm: float = 200.0
    finger_length_mm: float = 40.0
    pixels_per_mm: float = 1.0

    def __post_init__(self):
        if self.finger_thickness_mm <= 0 or self.finger_length_mm <= 0:
            raise ValueError("finger dimensions must be positive")
        if self.max_open_mm <= 0 or self.pixels_per_mm <= 0:
            raise ValueError("max_open_mm and pixels_per_mm must be positive")


@dataclass(frozen=True)
class GraspScore:
    """Per-grasp quality terms; ``total`` is their exact sum, or -1.0 for
    grasps whose regions degenerated (components are NaN then)."""

    collision: float
    occupancy: float
    height: float
    total: float

    @classmethod
    def compute(cls, collision, occupancy, height):
        return cls(collision, occupancy, height, collision + occupancy + height)

    @classmethod
    def failed(cls):
        return cls(math.nan, math.nan, math.nan, -1.0)

    @property
    def valid(self):
        return self.total >= 0.0

    def to_dict(self):
        def _num(v):
            return None if math.isnan(v) else float(v)

        return {
            "collision": _num(self.collision),
            "occupancy": _num(self.occupancy),
            "height": _num(self.height),
            "total": float(self.total),
        }


def _center_pixel(g, shape):
    h, w = shape
    row = min(max(int(round(g.y)), 0), h - 1)
    col = min(max(int(round(g.x)), 0), w - 1)
    return row, col


def gripper_regions(g, model, shape):
    """Rasterize finger and interior rectangles to pixel index sets.

    Returns ``((finger_rows, finger_cols), (interior_rows, interior_cols))``
    clipped to the image.  Pixels are included by a center-in-rectangle
    test in the grasp frame; the sets are disjoint by construction.
    """
    h, w = shape
    if not (0 <= g.x < w and 0 <= g.y < h):
        raise ValueError(f"grasp center ({g.x:.1f}, {g.y:.1f}) outside {w}x{h} image")
    ppmm = model.pixels_per_mm
    if g.w / ppmm > model.max_open_mm:
        raise GripperCapacityError(
            f"grasp opening {g.w / ppmm:.1f} mm exceeds max open {model.max_open_mm} mm"
        )
    finger_len = model.finger_length_mm * ppmm
    thickness = model.finger_thickness_mm * ppmm
    half_w = g.w / 2.0

    reach = half_w + finger_len
    half_t = thickness / 2.0
    radius = math.hypot(reach, half_t)
    r0 = max(0, int(math.floor(g.y - radius)))
    r1 = min(h - 1, int(math.ceil(g.y + radius)))
    c0 = max(0, int(math.floor(g.x - radius)))
    c1 = min(w - 1, int(math.ceil(g.x + radius)))
    rows = np.arange(r0, r1 + 1)
    cols = np.arange(c0, c1 + 1)
    yy = rows[:, None] - g.y
    xx = cols[None, :] - g.x
    cos_t, sin_t = math.cos(g.theta), math.sin(g.theta)
    u = cos_t * xx + sin_t * yy       # along the closing axis
    v = -sin_t * xx + cos_t * yy      # across it
    across = np.abs(v) <= half_t
    finger = across & (
        ((u >= half_w) & (u <= half_w + finger_len))
        | ((u <= -half_w) & (u >= -half_w - finger_len))
    )
    interior = across & (np.abs(u) < half_w)
    fr, fc = np.nonzero(finger)
    ir, ic = np.nonzero(interior)
    return (rows[fr], cols[fc]), (rows[ir], cols[ic])


def collision_score(g, depth_image, model, regions=None):
    """Fraction of finger pixels strictly deeper than the grasp center."""
    fingers, _ = regions if regions is not None else gripper_regions(g, model, depth_image.shape)
    fr, fc = fingers
    if fr.size == 0:
        raise DegenerateRegionError("finger region clipped to zero pixels")
    d_center = depth_image.depth[_center_pixel(g, depth_image.shape)]
    return float(np.mean(depth_image.depth[fr, fc] > d_center))


def occupancy_score(g, depth_image, model, regions=None):
    """Fraction of interior pixels strictly above the surface at the center."""
    _, interior = regions if regions is not None else gripper_regions(g, model, depth_image.shape)
    ir, ic = interior
    if ir.size == 0:
        raise DegenerateRegionError("interior region clipped to zero pixels")
    d_surface = depth_image.surface[_center_pixel(g, depth_image.shape)]
    return float(np.mean(depth_image.depth[ir, ic] < d_surface))


def height_score(g, depth_image):
    """Normalized elevation of the center point off the surface, in [0, 1]."""
    pc = _center_pixel(g, depth_image.shape)
    d_surface = float(depth_image.surface[pc])
    if d_surface <= 0:
        raise ValueError(f"surface depth at center must be positive, got {d_surface}")
    raw = abs(float(depth_image.depth[pc]) - d_surface) / abs(d_surface)
    return min(1.0, max(0.0, raw))


def score_grasp(g, depth_image, model):
    """All three scores for one grasp; raises on capacity/degenerate cases."""
    regions = gripper_regions(g, model, depth_image.shape)
    return GraspScore.compute(
        collision_score(g, depth_image, model, regions),
        occupancy_score(g, depth_image, model, regions),
        height_score(g, depth_image),
    )


def score_grasps(grasps, depth_image, model):
    """Score a ranked grasp list and re-rank by total (stable on ties).

    Grasps whose regions cannot be scored are demoted to total -1 instead
    of aborting the batch.
    """
    grasps = list(grasps)
    if not grasps:
        raise ValueError("empty grasp list")
    scored = []
    for g in grasps:
        try:
            scored.append((g, score_grasp(g, depth_image, model)))
        except (GripperCapacityError, DegenerateRegionError, ValueError):
            scored.append((g, GraspScore.failed()))
    scored.sort(key=lambda pair: -pair[1].total)
    return scored


def write_depth_gktb(depth_image, dest, include_surface=True):
    """Store a depth image as a GKTB file with plane name "depth".

    The surface map travels as an optional second plane "surface"; readers
    without it fall back to a constant surface.
    """
    planes = [("depth", depth_image.depth[None])]
    if include_surface:
        planes.append(("surface", depth_image.surface[None]))
    return write_gktb(dest, planes, num_classes=0, downsample_ratio=1)


def read_depth_gktb(src, surface_mm=None):
    """Load a depth image from a GKTB file.

    Requires a "depth" plane.  The surface comes from a "surface" plane if
    present, else from ``surface_mm``, else from the deepest depth pixel.
    """
    _, planes = read_gktb(src)
    by_name = dict(planes)
    if "depth" not in by_name:
        raise ValueError(f"no 'depth' plane in file (found {sorted(by_name)})")
    depth = by_name["depth"][0]
    if "surface" in by_name:
        return DepthImage(depth, by_name["surface"][0])
    level = float(surface_mm) if surface_mm is not None else float(depth.max())
    return DepthImage.flat_surface(depth, level)


def select_dynamic(previous, candidates, tau_close=30.0):
    """Track a moving target: pick the candidate closest to the previous
    grasp center if that distance is below tau_close, else keep the
    previous grasp (the object is presumed occluded)."""
    best = None
    best_d = math.inf
    for cand in candidates:
        d = math.hypot(cand.x - previous.x, cand.y - previous.y)
        if d < best_d:
            best, best_d = cand, d
    if best is not None and best_d < tau_close:
        return best
    return previous
