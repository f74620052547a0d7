"""Grasp representations and rotated-rectangle geometry.

A planar grasp is either a keypoint pair (left-middle / right-middle points
in image coordinates) or the equivalent center form (x, y, theta, w) with an
optional rectangle height used only for evaluation.  Angles are radians in
the gripper-symmetric range (-pi/2, pi/2], pixel frame with y growing
downward, theta measured from the +x axis.

Annotation files are JSON lines, one grasp per record:
``{"x": .., "y": .., "theta_deg": .., "w": .., "h": ..|null}``.
Angles are degrees on disk and radians in memory.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

HALF_PI = math.pi / 2


class DegenerateGraspError(ValueError):
    """Keypoint pair with coincident points cannot define a grasp."""


def wrap_angle(theta):
    """Fold an angle (radians) into (-pi/2, pi/2] modulo pi.

    Works on scalars and arrays; parallel-jaw symmetry identifies angles
    that differ by pi, and -pi/2 maps to +pi/2 so each grasp has one
    canonical angle.
    """
    t = np.asarray(theta, dtype=float)
    t = t - np.round(t / math.pi) * math.pi
    t = np.where(t <= -HALF_PI, t + math.pi, t)
    t = np.where(t > HALF_PI, t - math.pi, t)
    if np.ndim(theta) == 0:
        return float(t)
    return t


def angle_diff(a, b):
    """Wrapped angular distance modulo pi, in [0, pi/2].

    -89 deg and +89 deg are 2 deg apart under gripper symmetry.
    """
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    d = np.abs(d - np.round(d / math.pi) * math.pi)
    if np.ndim(a) == 0 and np.ndim(b) == 0:
        return float(d)
    return d


@dataclass(frozen=True)
class KeypointPair:
    """Left-middle / right-middle grasp keypoints, canonically ordered.

    Canonical order: left.x < right.x, or equal x and left.y < right.y.
    Coincident points are rejected.
    """

    left: tuple
    right: tuple

    def __post_init__(self):
        lx, ly = (float(v) for v in self.left)
        rx, ry = (float(v) for v in self.right)
        object.__setattr__(self, "left", (lx, ly))
        object.__setattr__(self, "right", (rx, ry))
        if (lx, ly) == (rx, ry):
            raise DegenerateGraspError(f"coincident keypoints {self.left}")
        if not ((lx, ly) < (rx, ry)):
            raise ValueError(f"pair not in canonical order: left={self.left}, right={self.right}")

    @classmethod
    def of(cls, p, q):
        """Build a canonical pair from two points in either order."""
        p = (float(p[0]), float(p[1]))
        q = (float(q[0]), float(q[1]))
        if p == q:
            raise DegenerateGraspError(f"coincident keypoints {p}")
        return cls(min(p, q), max(p, q))


@dataclass(frozen=True)
class Grasp:
    """Center-form grasp: center (x, y), angle theta in (-pi/2, pi/2],
    jaw opening w in pixels, optional rectangle height h (evaluation only)."""

    x: float
    y: float
    theta: float
    w: float
    h: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.theta)):
            raise ValueError(f"non-finite grasp fields ({self.x}, {self.y}, {self.theta})")
        if not (-HALF_PI < self.theta <= HALF_PI):
            raise ValueError(f"theta {self.theta} outside (-pi/2, pi/2]; wrap it first")
        if not (self.w > 0):
            raise ValueError(f"grasp width must be positive, got {self.w}")
        if self.h is not None and not (self.h > 0):
            raise ValueError(f"grasp height must be positive, got {self.h}")


def pair_to_grasp(pair):
    """Convert a keypoint pair to center form.

    Center is the midpoint, w the Euclidean keypoint distance, theta the
    angle of (right - left) from the +x axis folded into (-pi/2, pi/2].
    """
    lx, ly = pair.left
    rx, ry = pair.right
    dx, dy = rx - lx, ry - ly
    w = math.hypot(dx, dy)
    if w == 0.0:
        raise DegenerateGraspError(f"coincident keypoints {pair.left}")
    return Grasp((lx + rx) / 2, (ly + ry) / 2, wrap_angle(math.atan2(dy, dx)), w)


def grasp_to_pair(g):
    """Inverse of :func:`pair_to_grasp`; result satisfies canonical order."""
    hx = 0.5 * g.w * math.cos(g.theta)
    hy = 0.5 * g.w * math.sin(g.theta)
    return KeypointPair.of((g.x - hx, g.y - hy), (g.x + hx, g.y + hy))


def class_to_angle(c, num_classes):
    """Representative angle of orientation class c: pi*c/|C| - pi/2."""
    if not 0 <= c < num_classes:
        raise IndexError(f"class {c} out of range for {num_classes} classes")
    return math.pi * c / num_classes - HALF_PI


def angle_to_class(theta, num_classes):
    """Nearest orientation class for an angle, wrapping at +-pi/2.

    Any finite angle is first reduced modulo pi into (-pi/2, pi/2].  Exact
    ties between two representatives break to the smaller class index.
    """
    t = wrap_angle(theta)
    u = (t + HALF_PI) * num_classes / math.pi  # continuous class position in (0, n]
    if u >= num_classes - 0.5:
        return 0
    return max(0, math.ceil(u - 0.5))


@dataclass(frozen=True)
class OrientedRect:
    """Rectangle with center, width along the grasp axis, height across it,
    rotated by theta."""

    center: tuple
    width: float
    height: float
    theta: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError(f"degenerate rectangle {self.width}x{self.height}")

    def corners(self):
        """4x2 array of vertices, counterclockwise (positive shoelace area)."""
        cx, cy = self.center
        c, s = math.cos(self.theta), math.sin(self.theta)
        hw, hh = self.width / 2, self.height / 2
        local = np.array([(-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)])
        rot = np.array([[c, -s], [s, c]])
        return local @ rot.T + (cx, cy)

    @property
    def area(self):
        return self.width * self.height


def rect_from_grasp(g, height=None):
    """Oriented rectangle of a grasp; height defaults to the grasp's own h."""
    h = height if height is not None else g.h
    if h is None:
        raise ValueError("grasp has no height; pass one explicitly")
    return OrientedRect((g.x, g.y), g.w, h, g.theta)


def _shoelace(poly):
    x = poly[:, 0]
    y = poly[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def _clip_convex(subject, clip):
    """Sutherland-Hodgman clip of a convex subject polygon by a convex CCW
    clip polygon.  Points exactly on a clip edge count as inside."""
    output = [tuple(p) for p in subject]
    n = len(clip)
    for i in range(n):
        if not output:
            return []
        ax, ay = clip[i]
        bx, by = clip[(i + 1) % n]
        ex, ey = bx - ax, by - ay
        inputs = output
        output = []
        sx, sy = inputs[-1]
        s_in = ex * (sy - ay) - ey * (sx - ax) >= 0.0
        for px, py in inputs:
            p_in = ex * (py - ay) - ey * (px - ax) >= 0.0
            if p_in != s_in:
                # segment crosses the clip line; solve for the intersection
                dx, dy = px - sx, py - sy
                denom = ex * dy - ey * dx
                t = (ex * (ay - sy) - ey * (ax - sx)) / denom
                output.append((sx + t * dx, sy + t * dy))
            if p_in:
                output.append((px, py))
            sx, sy, s_in = px, py, p_in
    return output


def rotated_iou(a, b):
    """Jaccard index |a n b| / |a u b| of two oriented rectangles.

    Exact convex polygon clipping plus shoelace areas; 1.0 for identical
    rectangles, 0.0 when disjoint.  Arguments are ordered canonically
    before clipping so the result is exactly symmetric.
    """
    if (b.center, b.width, b.height, b.theta) < (a.center, a.width, a.height, a.theta):
        a, b = b, a
    pa = a.corners()
    pb = b.corners()
    inter_poly = _clip_convex(pa, pb)
    if len(inter_poly) < 3:
        return 0.0
    inter = _shoelace(np.asarray(inter_poly))
    area_a = _shoelace(pa)
    area_b = _shoelace(pb)
    union = area_a + area_b - inter
    if union <= 0.0:
        return 0.0
    return min(1.0, inter / union)


def read_annotations(source):
    """Read grasps from a JSON-lines annotation file (path or text file).

    File angles are degrees; they are wrapped into (-pi/2, pi/2] on load.
    """
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    grasps = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"line {lineno}: invalid JSON: {exc}") from exc
        grasps.append(grasp_from_record(rec))
    return grasps


def grasp_from_record(rec):
    h = rec.get("h")
    return Grasp(
        x=float(rec["x"]),
        y=float(rec["y"]),
        theta=wrap_angle(math.radians(float(rec["theta_deg"]))),
        w=float(rec["w"]),
        h=None if h is None else float(h),
    )


def grasp_to_record(g):
    return {
        "x": float(g.x),
        "y": float(g.y),
        "theta_deg": math.degrees(g.theta),
        "w": float(g.w),
        "h": None if g.h is None else float(g.h),
    }


def write_annotations(grasps, dest):
    """Write grasps to a JSON-lines annotation file (path or text file)."""
    text = "".join(json.dumps(grasp_to_record(g)) + "\n" for g in grasps)
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)


def read_annotation_groups(source):
    """Read annotations grouped by the optional ``image_id`` record field.

    Records without an id land in group "0".  Returns {image_id: [Grasp]}
    preserving record order within each group.
    """
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    groups = {}
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"line {lineno}: invalid JSON: {exc}") from exc
        groups.setdefault(str(rec.get("image_id", "0")), []).append(grasp_from_record(rec))
    return groups
