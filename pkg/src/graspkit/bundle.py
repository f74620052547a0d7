"""Heatmap bundle container and the GKTB on-disk tensor format.

A :class:`HeatmapBundle` holds the dense per-pixel maps a keypoint detector
produces for one image: per-orientation-class left/right keypoint heatmaps,
a single center heatmap, two-plane sub-pixel offset stacks and one scalar
embedding plane per keypoint role.  Grids are float32 numpy arrays and every
plane of a bundle shares one (height, width).

GKTB v1 layout (little-endian throughout):

    bytes 0..3   magic "GKTB"
    byte  4      format version, currently 1
    bytes 5..8   header length, unsigned 32-bit
    header       UTF-8 JSON: {"num_classes", "height", "width",
                 "downsample_ratio", "planes": [{"name", "count"}, ...]}
    payload      per plane, count * height * width float32 values,
                 row-major, concatenated in header order

Canonical plane order for bundles: left, right, center, offsetL, offsetR,
embedL, embedR.  Heatmap values live in [0, 1], offsets in [0, 1); value
ranges are enforced at load time, not during arithmetic.  A write followed
by a read round-trips bit-exactly.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"GKTB"
VERSION = 1

CANONICAL_PLANES = ("left", "right", "center", "offsetL", "offsetR", "embedL", "embedR")


class GKTBError(ValueError):
    """Base class for every bundle format / validation failure."""


class BadMagicError(GKTBError):
    """Stream does not start with the GKTB magic."""


class HeaderError(GKTBError):
    """Version, JSON header or header fields are malformed."""


class DimensionError(GKTBError):
    """Plane counts, shapes or payload length do not match the header."""


class PayloadError(GKTBError):
    """Payload contains NaN or infinite values."""


class ValueRangeError(GKTBError):
    """A heatmap or offset plane holds values outside its allowed range."""


def _plane32(value, name):
    arr = np.asarray(value, dtype=np.float32)
    if arr.ndim == 2:
        return arr
    if arr.ndim == 3:
        return arr
    raise DimensionError(f"plane {name}: expected 2-D or 3-D array, got ndim={arr.ndim}")


@dataclass
class HeatmapBundle:
    """Stacked detector outputs for one image.

    Shapes: ``left`` / ``right`` are (num_classes, H, W); ``center``,
    ``embedL`` and ``embedR`` are (H, W); ``offsetL`` / ``offsetR`` are
    (2, H, W) holding the x-offset plane first, then the y-offset plane.
    Treat instances as immutable after construction.
    """

    left: np.ndarray
    right: np.ndarray
    center: np.ndarray
    offsetL: np.ndarray
    offsetR: np.ndarray
    embedL: np.ndarray
    embedR: np.ndarray
    num_classes: int
    downsample_ratio: int

    def __post_init__(self):
        for name in ("left", "right", "center", "offsetL", "offsetR", "embedL", "embedR"):
            setattr(self, name, _plane32(getattr(self, name), name))
        self.num_classes = int(self.num_classes)
        self.downsample_ratio = int(self.downsample_ratio)

    @property
    def height(self):
        return self.center.shape[0]

    @property
    def width(self):
        return self.center.shape[1]

    def planes(self):
        """Planes as (name, array) pairs in canonical order, 3-D views."""
        return [
            ("left", self.left),
            ("right", self.right),
            ("center", self.center[None]),
            ("offsetL", self.offsetL),
            ("offsetR", self.offsetR),
            ("embedL", self.embedL[None]),
            ("embedR", self.embedR[None]),
        ]

    def validate(self):
        """Check every bundle invariant; raises a GKTBError subclass."""
        if self.num_classes < 1:
            raise DimensionError(f"num_classes must be >= 1, got {self.num_classes}")
        if self.downsample_ratio < 1:
            raise DimensionError(f"downsample_ratio must be >= 1, got {self.downsample_ratio}")
        h, w = self.center.shape
        expected = {
            "left": (self.num_classes, h, w),
            "right": (self.num_classes, h, w),
            "center": (1, h, w),
            "offsetL": (2, h, w),
            "offsetR": (2, h, w),
            "embedL": (1, h, w),
            "embedR": (1, h, w),
        }
        for name, arr in self.planes():
            if arr.shape != expected[name]:
                raise DimensionError(
                    f"plane {name}: shape {arr.shape} does not match expected {expected[name]}"
                )
            if not np.isfinite(arr).all():
                raise PayloadError(f"plane {name}: non-finite value in payload")
        for name in ("left", "right", "center"):
            arr = getattr(self, name)
            lo, hi = float(arr.min(initial=0.0)), float(arr.max(initial=0.0))
            if lo < 0.0 or hi > 1.0:
                raise ValueRangeError(f"plane {name}: heatmap value outside [0, 1] (min={lo}, max={hi})")
        for name in ("offsetL", "offsetR"):
            arr = getattr(self, name)
            lo, hi = float(arr.min(initial=0.0)), float(arr.max(initial=0.0))
            if lo < 0.0 or hi >= 1.0:
                raise ValueRangeError(f"plane {name}: offset value outside [0, 1) (min={lo}, max={hi})")
        return self

    def equals(self, other):
        """Value-for-value equality (exact, bit-level on plane data)."""
        if (self.num_classes, self.downsample_ratio) != (other.num_classes, other.downsample_ratio):
            return False
        return all(
            np.array_equal(a, b, equal_nan=True)
            for (_, a), (_, b) in zip(self.planes(), other.planes())
        )


def write_gktb(dest, planes, *, num_classes, downsample_ratio):
    """Write named float32 plane stacks as a GKTB stream.

    ``planes`` is an ordered list of (name, array) where each array has
    shape (count, H, W).  Returns the number of bytes written.  ``dest``
    may be a path or a binary file object.
    """
    if hasattr(dest, "write"):
        return _write_stream(dest, planes, num_classes, downsample_ratio)
    with open(dest, "wb") as fh:
        return _write_stream(fh, planes, num_classes, downsample_ratio)


def _write_stream(fh, planes, num_classes, downsample_ratio):
    shapes = {name: np.asarray(arr, dtype=np.float32) for name, arr in planes}
    heights = {a.shape[1] for a in shapes.values()}
    widths = {a.shape[2] for a in shapes.values()}
    if len(heights) != 1 or len(widths) != 1:
        raise DimensionError(f"planes disagree on grid size: heights={heights}, widths={widths}")
    height, width = heights.pop(), widths.pop()
    header = {
        "num_classes": int(num_classes),
        "height": int(height),
        "width": int(width),
        "downsample_ratio": int(downsample_ratio),
        "planes": [{"name": name, "count": int(shapes[name].shape[0])} for name, _ in planes],
    }
    blob = json.dumps(header, separators=(",", ":")).encode("utf-8")
    written = fh.write(MAGIC)
    written += fh.write(struct.pack("<B", VERSION))
    written += fh.write(struct.pack("<I", len(blob)))
    written += fh.write(blob)
    for name, _ in planes:
        data = np.ascontiguousarray(shapes[name], dtype="<f4")
        written += fh.write(data.tobytes())
    return written


def read_gktb(src):
    """Parse a GKTB stream into (header dict, list of (name, array)).

    Arrays come back float32 with shape (count, H, W).  Raises BadMagicError,
    HeaderError, DimensionError or PayloadError on malformed input.  Any
    plane holding NaN or infinities is rejected.
    """
    if hasattr(src, "read"):
        return _read_stream(src)
    with open(src, "rb") as fh:
        return _read_stream(fh)


def _read_stream(fh):
    magic = fh.read(4)
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {MAGIC!r}")
    raw = fh.read(5)
    if len(raw) < 5:
        raise HeaderError("stream ends inside the fixed header")
    version = raw[0]
    if version != VERSION:
        raise HeaderError(f"unsupported GKTB version {version}")
    (header_len,) = struct.unpack("<I", raw[1:5])
    blob = fh.read(header_len)
    if len(blob) < header_len:
        raise HeaderError("stream ends inside the JSON header")
    try:
        header = json.loads(blob.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise HeaderError(f"header is not valid UTF-8 JSON: {exc}") from exc
    for key in ("num_classes", "height", "width", "downsample_ratio", "planes"):
        if key not in header:
            raise HeaderError(f"header missing field {key!r}")
    height, width = int(header["height"]), int(header["width"])
    if height < 1 or width < 1:
        raise HeaderError(f"invalid grid size {height}x{width}")
    plane_size = height * width
    planes = []
    for entry in header["planes"]:
        if not isinstance(entry, dict) or "name" not in entry or "count" not in entry:
            raise HeaderError(f"malformed plane entry {entry!r}")
        name, count = str(entry["name"]), int(entry["count"])
        if count < 1:
            raise HeaderError(f"plane {name}: count must be >= 1, got {count}")
        nbytes = 4 * count * plane_size
        payload = fh.read(nbytes)
        if len(payload) < nbytes:
            raise DimensionError(
                f"plane {name}: truncated payload, expected {nbytes} bytes, got {len(payload)}"
            )
        arr = np.frombuffer(payload, dtype="<f4").reshape(count, height, width).copy()
        if not np.isfinite(arr).all():
            raise PayloadError(f"plane {name}: non-finite value in payload")
        planes.append((name, arr))
    if fh.read(1):
        raise DimensionError("trailing data after declared payload")
    return header, planes


def write_bundle(bundle, dest):
    """Serialize a validated bundle in canonical plane order; returns byte count."""
    bundle.validate()
    return write_gktb(
        dest,
        bundle.planes(),
        num_classes=bundle.num_classes,
        downsample_ratio=bundle.downsample_ratio,
    )


def read_bundle(src):
    """Read and validate a HeatmapBundle from a GKTB stream."""
    header, planes = read_gktb(src)
    by_name = {}
    for name, arr in planes:
        if name in by_name:
            raise HeaderError(f"duplicate plane {name!r}")
        by_name[name] = arr
    missing = [n for n in CANONICAL_PLANES if n not in by_name]
    extra = [n for n in by_name if n not in CANONICAL_PLANES]
    if missing or extra:
        raise HeaderError(f"bundle plane set mismatch: missing={missing}, unexpected={extra}")
    num_classes = int(header["num_classes"])
    counts = {"left": num_classes, "right": num_classes, "center": 1,
              "offsetL": 2, "offsetR": 2, "embedL": 1, "embedR": 1}
    for name, want in counts.items():
        got = by_name[name].shape[0]
        if got != want:
            raise DimensionError(f"plane {name}: expected {want} plane(s), header declares {got}")
    bundle = HeatmapBundle(
        left=by_name["left"],
        right=by_name["right"],
        center=by_name["center"][0],
        offsetL=by_name["offsetL"],
        offsetR=by_name["offsetR"],
        embedL=by_name["embedL"][0],
        embedR=by_name["embedR"][0],
        num_classes=num_classes,
        downsample_ratio=int(header["downsample_ratio"]),
    )
    return bundle.validate()
