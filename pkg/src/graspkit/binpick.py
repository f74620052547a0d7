"""Seeded bin-picking simulation on synthetic block scenes.

A scene is a constant-depth support surface with axis-aligned rectangular
blocks; rendered depth at a block pixel is surface minus block height
(later blocks win where footprints overlap).  The picking loop mirrors the
physical protocol: detect grasps on the current depth image, score them,
attempt the best one, and stop when either the bin is empty or the same
object has failed five consecutive times.  A simulated attempt succeeds iff
the grasp is collision-free (s_c == 1), the interior is majority-occupied
(s_o > 0.5) and the grasp center lies on a block footprint.

Everything is a pure function of (seed, detector): logs are bit-identical
across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .depth import DepthImage, score_grasps
from .encoder import EncoderConfig, ideal_bundle
from .geometry import Grasp, grasp_to_record
from .grouper import group

HALF_PI = math.pi / 2

# Extra jaw opening beyond the block extent so finger footprints land on
# clear surface; blocks narrower than the gripper interior would fail the
# majority-occupancy rule.
GRASP_CLEARANCE_PX = 12


@dataclass(frozen=True)
class Block:
    """Axis-aligned block: integer top-left corner, integer pixel extents,
    physical height in millimeters."""

    block_id: int
    x0: int
    y0: int
    size_x: int
    size_y: int
    height_mm: float

    @property
    def center(self):
        return (self.x0 + self.size_x / 2.0, self.y0 + self.size_y / 2.0)

    def contains(self, x, y):
        return self.x0 <= x < self.x0 + self.size_x and self.y0 <= y < self.y0 + self.size_y

    def oracle_grasp(self):
        """Grasp across the shorter extent with clearance for the fingers."""
        cx, cy = self.center
        if self.size_x <= self.size_y:
            return Grasp(cx, cy, 0.0, self.size_x + GRASP_CLEARANCE_PX)
        return Grasp(cx, cy, HALF_PI, self.size_y + GRASP_CLEARANCE_PX)


@dataclass
class SyntheticScene:
    """Mutable scene state for one bin-picking trial."""

    seed: int
    image_height: int
    image_width: int
    surface_mm: float
    pixels_per_mm: float
    blocks: list

    def render(self):
        depth = np.full((self.image_height, self.image_width), self.surface_mm, dtype=np.float32)
        for b in self.blocks:
            depth[b.y0 : b.y0 + b.size_y, b.x0 : b.x0 + b.size_x] = self.surface_mm - b.height_mm
        return DepthImage.flat_surface(depth, self.surface_mm)

    def block_at(self, x, y):
        for b in self.blocks:
            if b.contains(x, y):
                return b
        return None

    def nearest_block(self, x, y):
        best, best_d = None, math.inf
        for b in self.blocks:
            cx, cy = b.center
            d = math.hypot(cx - x, cy - y)
            if d < best_d:
                best, best_d = b, d
        return best

    def remove(self, block_id):
        self.blocks = [b for b in self.blocks if b.block_id != block_id]


def make_scene(seed, n_objects, surface_mm=1000.0, pixels_per_mm=1.0, cell_px=120):
    """Deterministic scene with well-separated blocks on a jittered grid.

    The image grows with the object count (grid of ceil(sqrt(n)) cells per
    side, at least 3) so fingers of an oracle grasp never reach a neighbor.
    """
    if n_objects < 1:
        raise ValueError(f"need at least one object, got {n_objects}")
    rng = np.random.default_rng(seed)
    grid = max(3, math.ceil(math.sqrt(n_objects)))
    side = grid * cell_px
    cells = rng.permutation(grid * grid)[:n_objects]
    blocks = []
    for bid, cell in enumerate(sorted(int(c) for c in cells)):
        crow, ccol = divmod(cell, grid)
        cy = crow * cell_px + cell_px // 2 + int(rng.integers(-6, 7))
        cx = ccol * cell_px + cell_px // 2 + int(rng.integers(-6, 7))
        size_x = 2 * int(rng.integers(14, 23))  # 28..44 px, even
        size_y = 2 * int(rng.integers(14, 23))
        height = float(rng.uniform(20.0, 60.0))
        blocks.append(
            Block(
                block_id=bid,
                x0=cx - size_x // 2,
                y0=cy - size_y // 2,
                size_x=size_x,
                size_y=size_y,
                height_mm=height,
            )
        )
    return SyntheticScene(
        seed=seed,
        image_height=side,
        image_width=side,
        surface_mm=surface_mm,
        pixels_per_mm=pixels_per_mm,
        blocks=blocks,
    )


def oracle_detector(scene):
    """Perfect detector: proposes each remaining block's oracle grasp."""

    def detect(depth_image):
        return [b.oracle_grasp() for b in scene.blocks]

    return detect


def pipeline_detector(scene, thresholds, num_classes=18, k=100, seed=0):
    """Detector that routes the oracle annotations through the full
    encode -> decode -> group pipeline on an ideal heatmap bundle."""
    config = EncoderConfig(
        image_height=scene.image_height,
        image_width=scene.image_width,
        num_classes=num_classes,
    )

    def detect(depth_image):
        annotations = [b.oracle_grasp() for b in scene.blocks]
        if not annotations:
            return []
        bundle = ideal_bundle(annotations, config, seed=seed)
        return group(bundle, thresholds, k=k)

    return detect


@dataclass
class BinPickLog:
    """Deterministic record of one trial."""

    seed: int
    n_objects: int
    attempts: list = field(default_factory=list)
    successes: int = 0
    cleared: int = 0

    @property
    def success_rate(self):
        return 100.0 * self.successes / len(self.attempts) if self.attempts else 0.0

    @property
    def percent_cleared(self):
        return 100.0 * self.cleared / self.n_objects if self.n_objects else 0.0

    def to_dict(self):
        return {
            "seed": self.seed,
            "n_objects": self.n_objects,
            "attempts": self.attempts,
            "successes": self.successes,
            "cleared": self.cleared,
            "success_rate": self.success_rate,
            "percent_cleared": self.percent_cleared,
        }


def run_bin_picking(scene, detector, model, max_consecutive_failures=5, top_n=100):
    """Run the sequential picking loop on ``scene`` (mutated in place).

    Stops when (a) no blocks remain or (b) the same nearest object fails
    ``max_consecutive_failures`` times in a row.  Returns a BinPickLog.
    """
    log = BinPickLog(seed=scene.seed, n_objects=len(scene.blocks))
    consecutive = 0
    last_failure_key = None
    while scene.blocks:
        depth_image = scene.render()
        grasps = list(detector(depth_image))[:top_n]
        attempt = {"attempt": len(log.attempts) + 1}
        best = None
        score = None
        if grasps:
            best, score = score_grasps(grasps, depth_image, model)[0]
        success = False
        block = None
        if best is not None:
            block = scene.block_at(best.x, best.y)
            success = (
                score.valid
                and score.collision == 1.0
                and score.occupancy > 0.5
                and block is not None
            )
            attempt["grasp"] = grasp_to_record(best)
            attempt["scores"] = score.to_dict()
        attempt["success"] = success
        attempt["block"] = block.block_id if block is not None else None
        log.attempts.append(attempt)
        if success:
            scene.remove(block.block_id)
            log.successes += 1
            log.cleared += 1
            consecutive = 0
            last_failure_key = None
        else:
            near = scene.nearest_block(best.x, best.y) if best is not None else None
            key = near.block_id if near is not None else None
            consecutive = consecutive + 1 if key == last_failure_key else 1
            last_failure_key = key
            if consecutive >= max_consecutive_failures:
                break
    return log
