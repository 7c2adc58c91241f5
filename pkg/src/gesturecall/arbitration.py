"""Primary-hand choice: fixed preference, depth nearness with hysteresis, or decayed activity."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .model import Hand, HandPreference, SessionConfig, SkeletonFrame


@dataclass(frozen=True)
class ArbitrationState:
    """Per-session primary-hand choice plus per-hand activity accumulators.

    Activity follows A' = A/2 + |d_pos| per frame, starting at 0; |d_pos| is
    the image-plane displacement since the hand was last tracked.
    """

    current_primary: Hand = Hand.LEFT
    activity_left: float = 0.0
    activity_right: float = 0.0
    last_left_pos: tuple[float, float] | None = None
    last_right_pos: tuple[float, float] | None = None
    nearness_delta: float = 0.10


def _step(activity: float, last: tuple[float, float] | None,
          sample) -> tuple[float, tuple[float, float]]:
    pos = (sample.x_i, sample.y_i)
    d = math.dist(last, pos) if last is not None else 0.0
    return activity / 2 + d, pos


def update_activity(state: ArbitrationState, frame: SkeletonFrame) -> ArbitrationState:
    """Decay-and-add each tracked hand's activity; untracked hands are left alone."""
    updates: dict = {}
    left = frame.hand(Hand.LEFT)
    if left is not None:
        a, pos = _step(state.activity_left, state.last_left_pos, left)
        updates["activity_left"] = a
        updates["last_left_pos"] = pos
    right = frame.hand(Hand.RIGHT)
    if right is not None:
        a, pos = _step(state.activity_right, state.last_right_pos, right)
        updates["activity_right"] = a
        updates["last_right_pos"] = pos
    return replace(state, **updates) if updates else state


def select_by_nearness(state: ArbitrationState, frame: SkeletonFrame) -> Hand | None:
    """Prefer the hand nearer the sensor, switching only past the hysteresis gap.

    Returns None when neither hand is tracked (cursor freeze upstream).
    """
    left = frame.hand(Hand.LEFT)
    right = frame.hand(Hand.RIGHT)
    if left is None and right is None:
        return None
    if left is None:
        return Hand.RIGHT
    if right is None:
        return Hand.LEFT
    if state.current_primary is Hand.LEFT:
        z_current, z_other, other = left.z, right.z, Hand.RIGHT
    else:
        z_current, z_other, other = right.z, left.z, Hand.LEFT
    if z_current - z_other > state.nearness_delta:
        return other
    return state.current_primary


def select_by_activity(state: ArbitrationState) -> Hand:
    """Hand with strictly greater activity; exact ties keep the current hand."""
    if state.activity_left > state.activity_right:
        return Hand.LEFT
    if state.activity_right > state.activity_left:
        return Hand.RIGHT
    return state.current_primary


def arbitrate(
    state: ArbitrationState, frame: SkeletonFrame, config: SessionConfig
) -> tuple[ArbitrationState, Hand | None]:
    """Pick this frame's primary hand per the configured preference.

    Activity is always updated first so the history stays warm if the mode is
    switched mid-session. Returns the new state and the chosen hand, or None
    when no usable hand is tracked.
    """
    state = update_activity(state, frame)
    left = frame.hand(Hand.LEFT)
    right = frame.hand(Hand.RIGHT)

    pref = config.hand_preference
    if pref is HandPreference.LEFT or pref is HandPreference.RIGHT:
        wanted = Hand.LEFT if pref is HandPreference.LEFT else Hand.RIGHT
        present = left if wanted is Hand.LEFT else right
        chosen = wanted if present is not None else None
    elif pref is HandPreference.AUTO_NEARNESS:
        chosen = select_by_nearness(state, frame)
    else:  # AUTO_ACTIVITY; untracked hands are never candidates
        if left is None and right is None:
            chosen = None
        elif left is None:
            chosen = Hand.RIGHT
        elif right is None:
            chosen = Hand.LEFT
        else:
            chosen = select_by_activity(state)

    if chosen is not None and chosen is not state.current_primary:
        state = replace(state, current_primary=chosen)
    return state, chosen
