"""Skeleton trace files, the synthetic gesture generator, and paced replay.

Traces are newline-delimited JSON, one frame per line:

    {"i": 0, "t": 0.0, "joints": [{"id": "right_hand", "x": 320.0, "y": 240.0,
     "z": 2.0, "tr": true}], "mask": {"w": 16, "h": 16, "rle": "..."}}

``mask`` appears only on frames where a fist check is scripted.
"""

from __future__ import annotations

import json
import math
import random
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .intent import HandMask
from .model import CameraConfig, JointSample, SkeletonFrame, validate_frame


class TraceParseError(Exception):
    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


def frame_to_json(frame: SkeletonFrame) -> dict:
    obj: dict = {
        "i": frame.frame_index,
        "t": frame.t_ms,
        "joints": [
            {"id": j.joint_id, "x": j.x_i, "y": j.y_i, "z": j.z, "tr": j.tracked}
            for j in frame.joints
        ],
    }
    if frame.mask is not None:
        mask: HandMask = frame.mask
        obj["mask"] = {"w": mask.width, "h": mask.height, "rle": mask.to_rle()}
    return obj


def frame_from_json(obj: dict) -> SkeletonFrame:
    """Decode one frame object; raises KeyError/ValueError on bad records."""
    joints = tuple(
        JointSample(
            joint_id=j["id"], x_i=float(j["x"]), y_i=float(j["y"]),
            z=float(j["z"]), tracked=bool(j.get("tr", True)),
        )
        for j in obj["joints"]
    )
    mask = None
    if "mask" in obj:
        m = obj["mask"]
        mask = HandMask.from_rle(int(m["w"]), int(m["h"]), m["rle"])
    return SkeletonFrame(
        frame_index=int(obj["i"]), t_ms=float(obj["t"]), joints=joints, mask=mask
    )


def serialize_frame(frame: SkeletonFrame) -> str:
    return json.dumps(frame_to_json(frame))


def parse_trace(
    lines: Iterable[str], camera: CameraConfig | None = None
) -> Iterator[SkeletonFrame]:
    """Yield validated frames from newline-delimited records.

    Malformed lines and invariant violations raise TraceParseError with the
    offending line number; an empty input is simply an empty sequence.
    """
    camera = camera or CameraConfig()
    prev_index: int | None = None
    for number, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceParseError(number, f"not valid JSON ({exc.msg})") from exc
        try:
            frame = frame_from_json(obj)
        except (KeyError, TypeError, ValueError) as exc:
            raise TraceParseError(number, f"bad record: {exc}") from exc
        result = validate_frame(frame, camera, prev_index)
        if not result.ok:
            raise TraceParseError(number, "; ".join(result.violations))
        prev_index = frame.frame_index
        yield frame


def write_trace(frames: Iterable[SkeletonFrame], path: str | Path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for frame in frames:
            fh.write(serialize_frame(frame) + "\n")
            count += 1
    return count


def read_trace(path: str | Path, camera: CameraConfig | None = None) -> list[SkeletonFrame]:
    with open(path, encoding="utf-8") as fh:
        return list(parse_trace(fh, camera))


# ---------------------------------------------------------------------------
# Synthetic gesture scripts

# Canned masks for scripted fist checks: a solid blob reads as a fist, a
# spread of thin fingers does not.
FIST_MASK = HandMask.from_rows([
    "0011111100",
    "0111111110",
    "1111111111",
    "1111111111",
    "1111111111",
    "1111111111",
    "1111111111",
    "1111111111",
    "0111111110",
    "0011111100",
])

OPEN_HAND_MASK = HandMask.from_rows([
    "1000100010",
    "1000100010",
    "1000100010",
    "1000100010",
    "1100110011",
    "1111111111",
    "1111111111",
    "1111111111",
    "0111111110",
    "0011111100",
])

_MASK_TAGS = {"fist": FIST_MASK, "open": OPEN_HAND_MASK}


@dataclass(frozen=True)
class HandPath:
    """Waypoints in (x_i, y_i, z), linearly interpolated across a segment."""

    waypoints: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        if not self.waypoints:
            raise ValueError("a hand path needs at least one waypoint")

    def at(self, s: float) -> tuple[float, float, float]:
        pts = self.waypoints
        if len(pts) == 1:
            return pts[0]
        u = s * (len(pts) - 1)
        i = min(int(u), len(pts) - 2)
        f = u - i
        a, b = pts[i], pts[i + 1]
        return tuple(a[k] + f * (b[k] - a[k]) for k in range(3))


@dataclass(frozen=True)
class GestureSegment:
    duration_frames: int
    left: HandPath | None = None
    right: HandPath | None = None
    mask: str | None = None  # "fist" | "open"

    def __post_init__(self):
        if self.duration_frames <= 0:
            raise ValueError("segment duration must be positive")
        if self.mask is not None and self.mask not in _MASK_TAGS:
            raise ValueError(f"unknown mask tag {self.mask!r}")


@dataclass(frozen=True)
class GestureScript:
    segments: tuple[GestureSegment, ...]


def _path_from_json(obj) -> HandPath | None:
    if obj is None:
        return None
    if isinstance(obj, dict):  # {"at": [x,y,z]} holds one position
        obj = [obj["at"]]
    return HandPath(tuple(tuple(float(v) for v in p) for p in obj))


def load_script(path: str | Path) -> GestureScript:
    """Script files are JSON: {"segments": [{"frames": N, "left": [[x,y,z],...],
    "right": ..., "mask": "fist"}]}; a hand given as null is untracked."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    segments = tuple(
        GestureSegment(
            duration_frames=int(seg["frames"]),
            left=_path_from_json(seg.get("left")),
            right=_path_from_json(seg.get("right")),
            mask=seg.get("mask"),
        )
        for seg in data["segments"]
    )
    return GestureScript(segments)


def generate(
    script: GestureScript,
    camera: CameraConfig | None = None,
    seed: int = 0,
    noise_px: float = 0.0,
) -> list[SkeletonFrame]:
    """Deterministic frames from a script: interpolated waypoints, optional
    seeded uniform pixel noise, timestamps paced at the camera frame rate."""
    camera = camera or CameraConfig()
    rng = random.Random(seed)
    frames: list[SkeletonFrame] = []
    index = 0
    for segment in script.segments:
        n = segment.duration_frames
        for k in range(n):
            s = k / (n - 1) if n > 1 else 0.0
            joints: list[JointSample] = []
            for joint_id, path in (("left_hand", segment.left),
                                   ("right_hand", segment.right)):
                if path is None:
                    continue
                x, y, z = path.at(s)
                if noise_px > 0:
                    x += rng.uniform(-noise_px, noise_px)
                    y += rng.uniform(-noise_px, noise_px)
                x = min(max(x, 0.0), camera.image_width - 1.0)
                y = min(max(y, 0.0), camera.image_height - 1.0)
                joints.append(JointSample(joint_id, x, y, z))
            mask = _MASK_TAGS[segment.mask] if segment.mask else None
            frames.append(SkeletonFrame(
                frame_index=index,
                t_ms=index * 1000.0 / camera.frame_rate,
                joints=tuple(joints),
                mask=mask,
            ))
            index += 1
    return frames


# ---------------------------------------------------------------------------
# Paced replay

class Pace:
    REALTIME = "realtime"
    MAX_SPEED = "max_speed"


@dataclass
class ReplaySummary:
    frames: int = 0
    wall_s: float = 0.0
    sink_times_s: list[float] = field(default_factory=list)
    aborted: bool = False
    error: str | None = None

    @property
    def min_ms(self) -> float:
        return min(self.sink_times_s) * 1000 if self.sink_times_s else 0.0

    @property
    def max_ms(self) -> float:
        return max(self.sink_times_s) * 1000 if self.sink_times_s else 0.0

    @property
    def mean_ms(self) -> float:
        return statistics.fmean(self.sink_times_s) * 1000 if self.sink_times_s else 0.0

    @property
    def median_ms(self) -> float:
        return statistics.median(self.sink_times_s) * 1000 if self.sink_times_s else 0.0


def replay(
    records: Iterable[SkeletonFrame],
    sink: Callable[[SkeletonFrame], object],
    pace: str = Pace.MAX_SPEED,
) -> ReplaySummary:
    """Feed frames to a consumer, optionally sleeping to honor the recorded
    timestamps. A sink failure aborts with a partial summary."""
    summary = ReplaySummary()
    start_wall = time.perf_counter()
    first_t: float | None = None
    for frame in records:
        if pace == Pace.REALTIME:
            if first_t is None:
                first_t = frame.t_ms
            else:
                target = start_wall + (frame.t_ms - first_t) / 1000.0
                delay = target - time.perf_counter()
                if delay > 0:
                    time.sleep(delay)
        t0 = time.perf_counter()
        try:
            sink(frame)
        except Exception as exc:  # noqa: BLE001 - partial summary is the contract
            summary.aborted = True
            summary.error = f"{type(exc).__name__}: {exc}"
            break
        summary.sink_times_s.append(time.perf_counter() - t0)
        summary.frames += 1
    summary.wall_s = time.perf_counter() - start_wall
    return summary
