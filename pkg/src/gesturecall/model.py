"""Shared domain types: skeleton frames, joints, camera/screen geometry, session config."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from pathlib import Path


class Joint(str, Enum):
    LEFT_HAND = "left_hand"
    RIGHT_HAND = "right_hand"
    HEAD = "head"
    SPINE = "spine"


# Extra joints ride along as "other_<0..255>"; the engine only reads the two hands.
_OTHER_JOINT = re.compile(r"^other_(\d{1,3})$")

_NAMED_JOINTS = {j.value for j in Joint}


def is_valid_joint_id(joint_id: str) -> bool:
    if joint_id in _NAMED_JOINTS:
        return True
    m = _OTHER_JOINT.match(joint_id)
    return bool(m) and int(m.group(1)) <= 255


class Hand(str, Enum):
    LEFT = "left"
    RIGHT = "right"

    @property
    def joint(self) -> Joint:
        return Joint.LEFT_HAND if self is Hand.LEFT else Joint.RIGHT_HAND


class HandPreference(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    AUTO_NEARNESS = "auto_nearness"
    AUTO_ACTIVITY = "auto_activity"


class Proximity(str, Enum):
    NEAR = "near"
    FAR = "far"


class MappingMode(str, Enum):
    FIXED_FACTOR = "fixed_factor"
    DYNAMIC_ABSOLUTE = "dynamic_absolute"
    DYNAMIC_RELATIVE = "dynamic_relative"


class IntentScheme(str, Enum):
    DWELL = "dwell"
    CLASP = "clasp"
    FIST = "fist"


class Channel(str, Enum):
    PHONE = "phone"
    EMAIL = "email"
    SMS = "sms"
    VOICE = "voice"


# Fan-out order for multi-channel requests; also the FIFO key.
CHANNEL_ORDER = (Channel.PHONE, Channel.EMAIL, Channel.SMS, Channel.VOICE)


@dataclass(frozen=True)
class JointSample:
    """One tracked joint: image-plane pixels plus depth in meters."""

    joint_id: str
    x_i: float
    y_i: float
    z: float
    tracked: bool = True


@dataclass(frozen=True)
class SkeletonFrame:
    """One timestamped sample of the tracked skeleton.

    ``mask`` optionally carries a binary hand mask for fist detection; it is
    populated from trace records, never required.
    """

    frame_index: int
    t_ms: float
    joints: tuple[JointSample, ...]
    mask: "object | None" = None  # intent.HandMask; kept loose to avoid a cycle

    def joint(self, joint_id: str) -> JointSample | None:
        for j in self.joints:
            if j.joint_id == joint_id:
                return j
        return None

    def hand(self, hand: Hand) -> JointSample | None:
        """The hand's sample if present and tracked, else None."""
        j = self.joint(hand.joint.value)
        if j is not None and j.tracked:
            return j
        return None


@dataclass(frozen=True)
class CameraConfig:
    image_width: int = 640
    image_height: int = 480
    theta_h: float = 57.0  # horizontal field of view, degrees
    theta_v: float = 43.0  # vertical field of view, degrees
    frame_rate: float = 30.0

    def __post_init__(self):
        if not (0 < self.theta_h < 180 and 0 < self.theta_v < 180):
            raise ValueError("field-of-view angles must be in (0, 180) degrees")
        if self.image_width <= 0 or self.image_height <= 0 or self.frame_rate <= 0:
            raise ValueError("image dimensions and frame rate must be positive")


@dataclass(frozen=True)
class ScreenConfig:
    width: int = 1366
    height: int = 768
    x_span: float = 0.40  # meters of hand travel covering the full width
    y_span: float = 0.30

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("screen resolution must be positive")
        if self.x_span <= 0 or self.y_span <= 0:
            raise ValueError("hand travel spans must be positive")

    @property
    def center(self) -> tuple[int, int]:
        return self.width // 2, self.height // 2


@dataclass(frozen=True)
class KineticParams:
    v_min: float = 2.0  # pixels/frame dead zone
    beta: float = 0.2  # 1/(pixels/frame)
    c: float = 4.0  # screen pixels gain


DEFAULT_LABELS = (
    "Doctor", "Family", "Fruits",
    "Nurse", "Emergency", "Food",
    "Bathroom", "Water", "Medicine",
)


@dataclass(frozen=True)
class SessionConfig:
    camera: CameraConfig = field(default_factory=CameraConfig)
    screen: ScreenConfig = field(default_factory=ScreenConfig)
    hand_preference: HandPreference = HandPreference.LEFT
    proximity: Proximity = Proximity.NEAR
    mapping_mode: MappingMode = MappingMode.FIXED_FACTOR
    kinetic_enabled: bool = False
    intent_scheme: IntentScheme = IntentScheme.DWELL
    dwell_seconds: float = 2.0
    channels: frozenset[Channel] = frozenset({Channel.SMS})
    labels: tuple[str, ...] = DEFAULT_LABELS
    # Tuning knobs left open by the selection rules; all overridable per session.
    nearness_delta: float = 0.10  # meters of depth gap required to switch hands
    fixed_factor_near: float = 1.8
    fixed_factor_far: float = 3.0
    kinetic: KineticParams = field(default_factory=KineticParams)
    depth_window: int = 5  # moving-average window for depth smoothing
    solidity_threshold: float = 0.90
    clasp_threshold_m: float = 0.12
    cooldown_frames: int | None = None  # None -> one dwell period

    def __post_init__(self):
        if self.dwell_seconds <= 0:
            raise ValueError("dwell_seconds must be positive")
        if self.depth_window < 1:
            raise ValueError("depth_window must be at least 1")
        if len(self.labels) != 9 or len(set(self.labels)) != 9:
            raise ValueError("exactly 9 distinct option labels are required")

    @property
    def threshold_frames(self) -> int:
        return max(1, round(self.dwell_seconds * self.camera.frame_rate))


@dataclass
class ValidationResult:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_frame(
    frame: SkeletonFrame,
    camera: CameraConfig,
    prev_index: int | None = None,
) -> ValidationResult:
    """Check a frame against the stream invariants.

    Violations are data, not faults: the result lists every problem found
    (out-of-bounds pixel, non-positive depth, duplicate joint, non-monotonic
    index relative to ``prev_index``).
    """
    violations: list[str] = []
    seen: set[str] = set()
    for j in frame.joints:
        if j.joint_id in seen:
            violations.append(f"duplicate joint {j.joint_id}")
        seen.add(j.joint_id)
        if not is_valid_joint_id(j.joint_id):
            violations.append(f"unknown joint id {j.joint_id!r}")
        if not j.tracked:
            continue
        if not (0 <= j.x_i < camera.image_width) or not (0 <= j.y_i < camera.image_height):
            violations.append(
                f"joint {j.joint_id}: pixel out of bounds (x={j.x_i}, y={j.y_i})"
            )
        if j.z <= 0:
            violations.append(f"joint {j.joint_id}: non-positive depth (z={j.z})")
    if prev_index is not None and frame.frame_index <= prev_index:
        violations.append(
            f"non-monotonic frame index ({frame.frame_index} after {prev_index})"
        )
    return ValidationResult(violations)


# ---------------------------------------------------------------------------
# Config file loading (JSON mirroring the SessionConfig field names)

def session_config_from_dict(data: dict) -> SessionConfig:
    base = SessionConfig()
    return apply_config_dict(base, data)


def apply_config_dict(config: SessionConfig, data: dict) -> SessionConfig:
    """Overlay a (partial) config dict onto an existing SessionConfig."""
    known = {f.name for f in fields(SessionConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    updates: dict = {}
    for key, value in data.items():
        if key == "camera":
            updates[key] = replace(config.camera, **value)
        elif key == "screen":
            updates[key] = replace(config.screen, **value)
        elif key == "kinetic":
            updates[key] = replace(config.kinetic, **value)
        elif key == "hand_preference":
            updates[key] = HandPreference(value)
        elif key == "proximity":
            updates[key] = Proximity(value)
        elif key == "mapping_mode":
            updates[key] = MappingMode(value)
        elif key == "intent_scheme":
            updates[key] = IntentScheme(value)
        elif key == "channels":
            updates[key] = frozenset(Channel(c) for c in value)
        elif key == "labels":
            updates[key] = tuple(value)
        else:
            updates[key] = value
    return replace(config, **updates)


def load_session_config(path: str | Path) -> SessionConfig:
    with open(path, encoding="utf-8") as fh:
        return session_config_from_dict(json.load(fh))
