"""Selection-intent detection: dwell counting, hand-clasp distance, fist convexity."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .model import CameraConfig


@dataclass(frozen=True)
class DwellState:
    """Consecutive-hover counter over grid cells, with a post-selection cooldown."""

    threshold_frames: int
    hovered_cell: int | None = None
    count: int = 0
    cooldown: int = 0
    cooldown_frames: int | None = None  # None -> threshold_frames

    @property
    def effective_cooldown(self) -> int:
        return self.threshold_frames if self.cooldown_frames is None else self.cooldown_frames


def dwell_update(state: DwellState, cell: int | None) -> tuple[DwellState, int | None]:
    """Advance the dwell counter for this frame's hovered cell.

    Any cell change (including to no cell) resets the count; a selection fires
    when the count reaches the threshold, then a cooldown suppresses re-firing.
    Returns the new state and the selected cell id, if one fired.
    """
    if state.cooldown > 0:
        return replace(state, cooldown=state.cooldown - 1), None
    if cell is None:
        return replace(state, hovered_cell=None, count=0), None
    count = state.count + 1 if cell == state.hovered_cell else 1
    if count >= state.threshold_frames:
        return replace(state, hovered_cell=cell, count=0,
                       cooldown=state.effective_cooldown), cell
    return replace(state, hovered_cell=cell, count=count), None


@dataclass(frozen=True)
class ClaspParams:
    threshold: float = 0.12  # meters

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValueError("clasp threshold must be positive")


def hand_world_position(
    x_i: float, y_i: float, z: float, camera: CameraConfig
) -> tuple[float, float, float]:
    """Image pixels + depth to real-world meters via the field-of-view model.

    x_world = 2 * z * sin(theta_h/2) * x_centered / image_width, analogous in y;
    z passes through unchanged.
    """
    xc = x_i - camera.image_width / 2
    yc = y_i - camera.image_height / 2
    x_w = 2 * z * math.sin(math.radians(camera.theta_h) / 2) * xc / camera.image_width
    y_w = 2 * z * math.sin(math.radians(camera.theta_v) / 2) * yc / camera.image_height
    return x_w, y_w, z


def clasp_detect(
    left: tuple[float, float, float],
    right: tuple[float, float, float],
    params: ClaspParams,
) -> bool:
    """True when the hands' real-world separation is below the clasp threshold."""
    return math.dist(left, right) < params.threshold


# ---------------------------------------------------------------------------
# Binary hand masks and fist convexity

@dataclass(frozen=True)
class HandMask:
    """Row-major binary occupancy of a hand region of interest."""

    width: int
    height: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != self.width * self.height:
            raise ValueError("bit count does not match mask dimensions")

    @classmethod
    def from_rows(cls, rows: list[str]) -> "HandMask":
        """Build from strings of '0'/'1' (or '.'/'#'), one per row."""
        width = len(rows[0])
        bits = tuple(1 if ch in "1#" else 0 for row in rows for ch in row)
        return cls(width, len(rows), bits)

    def set_points(self) -> list[tuple[int, int]]:
        return [
            (i % self.width, i // self.width)
            for i, b in enumerate(self.bits) if b
        ]

    def to_rle(self) -> str:
        """Run lengths of alternating 0s and 1s, zeros first, space separated."""
        runs: list[int] = [0]
        current = 0
        for b in self.bits:
            if b == current:
                runs[-1] += 1
            else:
                runs.append(1)
                current = b
        return " ".join(str(r) for r in runs)

    @classmethod
    def from_rle(cls, width: int, height: int, rle: str) -> "HandMask":
        bits: list[int] = []
        value = 0
        for token in rle.split():
            bits.extend([value] * int(token))
            value ^= 1
        if len(bits) != width * height:
            raise ValueError("run lengths do not cover the mask")
        return cls(width, height, tuple(bits))


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _convex_hull(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Monotone chain; strict turns only, so collinear sets reduce to endpoints."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[tuple[int, int]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[int, int]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _hull_lattice_count(points: list[tuple[int, int]]) -> int:
    """Lattice points inside or on the convex hull of integer points.

    Uses Pick's theorem (total = area + boundary/2 + 1) on the hull polygon;
    degenerate hulls (point, segment) are counted directly.
    """
    hull = _convex_hull(points)
    if len(hull) == 1:
        return 1
    if len(hull) == 2:
        (x0, y0), (x1, y1) = hull
        return math.gcd(abs(x1 - x0), abs(y1 - y0)) + 1
    area2 = 0
    boundary = 0
    for i, (x0, y0) in enumerate(hull):
        x1, y1 = hull[(i + 1) % len(hull)]
        area2 += x0 * y1 - x1 * y0
        boundary += math.gcd(abs(x1 - x0), abs(y1 - y0))
    return (abs(area2) + boundary + 2) // 2


def mask_solidity(mask: HandMask) -> float:
    """Set-bit count over the lattice-point count of the bits' convex hull.

    1.0 for convex shapes; finger-like concavities pull it below 1.
    """
    points = mask.set_points()
    if not points:
        raise ValueError("mask has no set bits")
    return len(points) / _hull_lattice_count(points)


def fist_detect(mask: HandMask, solidity_threshold: float = 0.90) -> bool:
    """A clenched fist shows as a near-convex blob: solidity at or above threshold."""
    return mask_solidity(mask) >= solidity_threshold
