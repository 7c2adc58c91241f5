"""Per-frame pipeline: validate -> arbitrate -> map -> hit-test -> intent -> dispatch.

Outputs are protocol message dicts (every message carries ``"v": 1``):

    cursor_out    — one per valid frame; position, primary hand, hovered cell
    dwell_out     — one per valid frame; hover progress toward selection
    selection_out — an option was chosen
    dispatch_out  — a notification was queued / rejected / delivered
    error_out     — the frame failed validation; pipeline state unchanged
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

from .arbitration import ArbitrationState, arbitrate
from .dispatch import Dispatcher, DispatchRequest, next_request_id
from .grid import OptionGrid, SelectionEvent, hit_test
from .intent import (
    ClaspParams,
    DwellState,
    clasp_detect,
    dwell_update,
    fist_detect,
    hand_world_position,
)
from .mapping import MappingState, map_absolute, map_fixed, map_relative, re_anchor
from .model import (
    CHANNEL_ORDER,
    Hand,
    HandPreference,
    IntentScheme,
    MappingMode,
    SessionConfig,
    SkeletonFrame,
    apply_config_dict,
    validate_frame,
)

PROTOCOL_VERSION = 1


def _msg(msg_type: str, **body) -> dict:
    return {"v": PROTOCOL_VERSION, "type": msg_type, **body}


@dataclass
class SessionCounters:
    frames: int = 0
    valid_frames: int = 0
    selections: int = 0
    frame_times_s: list[float] = field(default_factory=list)


def _initial_primary(config: SessionConfig) -> Hand:
    if config.hand_preference is HandPreference.RIGHT:
        return Hand.RIGHT
    return Hand.LEFT  # left is the default tracking hand


def _mapping_state(config: SessionConfig) -> MappingState:
    return MappingState(
        mode=config.mapping_mode,
        kinetic_params=config.kinetic,
        kinetic_enabled=config.kinetic_enabled,
        z_window_size=config.depth_window,
    )


def _dwell_state(config: SessionConfig) -> DwellState:
    return DwellState(
        threshold_frames=config.threshold_frames,
        cooldown_frames=config.cooldown_frames,
    )


class SessionEngine:
    """Owns one session's state and processes its frame stream.

    Single-threaded per session; the only shared side effect is dispatch,
    which hands off to the dispatcher's worker through a bounded queue.
    """

    def __init__(self, config: SessionConfig, dispatcher: Dispatcher | None = None):
        self.config = config
        self.dispatcher = dispatcher
        self.arbitration = ArbitrationState(
            current_primary=_initial_primary(config),
            nearness_delta=config.nearness_delta,
        )
        self.mapping = _mapping_state(config)
        self.dwell = _dwell_state(config)
        self.grid = OptionGrid(screen=config.screen, labels=config.labels)
        self.counters = SessionCounters()
        self.last_cursor: tuple[int, int] = config.screen.center
        self.last_cell: int | None = None
        self.prev_frame_index: int | None = None
        self._clasp_active = False
        self._fist_active = False
        self._dispatch_channels = self._ordered_channels(config)

    def _ordered_channels(self, config: SessionConfig) -> tuple:
        """Fan-out set fixed at config time (selection frames stay cheap);
        requests never carry channels the dispatcher has not enabled."""
        allowed = self.dispatcher.config.enabled if self.dispatcher else None
        return tuple(c for c in CHANNEL_ORDER
                     if c in config.channels and (allowed is None or c in allowed))

    # -- live configuration ------------------------------------------------

    def apply_config(self, data: dict) -> None:
        """Overlay a partial config dict; derived state is rebuilt as needed."""
        old = self.config
        new = apply_config_dict(old, data)
        self.config = new
        if new.nearness_delta != old.nearness_delta:
            self.arbitration = replace(self.arbitration, nearness_delta=new.nearness_delta)
        if (new.mapping_mode != old.mapping_mode or new.camera != old.camera
                or new.screen != old.screen):
            self.mapping = _mapping_state(new)
            self.last_cursor = new.screen.center
        elif (new.kinetic != old.kinetic or new.kinetic_enabled != old.kinetic_enabled
              or new.depth_window != old.depth_window):
            self.mapping = replace(
                self.mapping, kinetic_params=new.kinetic,
                kinetic_enabled=new.kinetic_enabled, z_window_size=new.depth_window,
            )
        if (new.threshold_frames != old.threshold_frames
                or new.cooldown_frames != old.cooldown_frames
                or new.intent_scheme != old.intent_scheme):
            self.dwell = _dwell_state(new)
            self._clasp_active = False
            self._fist_active = False
        if new.labels != old.labels or new.screen != old.screen:
            self.grid = OptionGrid(screen=new.screen, labels=new.labels)
        self._dispatch_channels = self._ordered_channels(new)

    # -- the frame pipeline -------------------------------------------------

    def process_frame(self, frame: SkeletonFrame) -> list[dict]:
        t0 = time.perf_counter()
        try:
            return self._process(frame)
        finally:
            self.counters.frames += 1
            self.counters.frame_times_s.append(time.perf_counter() - t0)

    def _process(self, frame: SkeletonFrame) -> list[dict]:
        result = validate_frame(frame, self.config.camera, self.prev_frame_index)
        if not result.ok:
            return [_msg("error_out", i=frame.frame_index,
                         reason="; ".join(result.violations))]
        self.prev_frame_index = frame.frame_index
        self.counters.valid_frames += 1

        prev_primary = self.arbitration.current_primary
        self.arbitration, primary = arbitrate(self.arbitration, frame, self.config)
        if primary is not None and primary is not prev_primary:
            self.mapping = re_anchor(self.mapping)

        events: list[dict] = []
        if primary is None:
            # No usable hand: cursor freezes and dwell holds.
            events.append(self._cursor_out(frame, None, self.last_cursor, self.last_cell))
            events.append(self._dwell_out(frame))
            return events

        sample = frame.hand(primary)
        cursor = self._map(sample)
        cell = hit_test(self.grid, cursor)
        self.last_cursor = cursor
        self.last_cell = cell

        selected = self._intent(frame, cell)
        events.append(self._cursor_out(frame, primary, cursor, cell))
        events.append(self._dwell_out(frame))
        if selected is not None:
            # Selection path is kept lean: it runs inside the frame loop and
            # must stay within the same budget as a plain hover frame.
            # Equivalent to make_selection; hit_test already bounded the cell.
            selection = SelectionEvent(selected, self.grid.labels[selected],
                                       frame.t_ms, frame.frame_index)
            self.counters.selections += 1
            events.append({
                "v": PROTOCOL_VERSION, "type": "selection_out",
                "i": frame.frame_index, "t": frame.t_ms,
                "cell": selection.cell, "label": selection.label,
            })
            self._dispatch(selection, frame, events)
        return events

    def _map(self, sample) -> tuple[int, int]:
        hand = (sample.x_i, sample.y_i)
        mode = self.config.mapping_mode
        if mode is MappingMode.FIXED_FACTOR:
            return map_fixed(
                hand, self.config.proximity, self.config.camera, self.config.screen,
                near_factor=self.config.fixed_factor_near,
                far_factor=self.config.fixed_factor_far,
            )
        if mode is MappingMode.DYNAMIC_ABSOLUTE:
            cursor, self.mapping = map_absolute(
                hand, sample.z, self.mapping, self.config.camera, self.config.screen)
            return cursor
        cursor, self.mapping = map_relative(
            hand, sample.z, self.mapping, self.config.camera, self.config.screen)
        return cursor

    def _intent(self, frame: SkeletonFrame, cell: int) -> int | None:
        scheme = self.config.intent_scheme
        if scheme is IntentScheme.DWELL:
            self.dwell, selected = dwell_update(self.dwell, cell)
            return selected
        if scheme is IntentScheme.CLASP:
            left = frame.hand(Hand.LEFT)
            right = frame.hand(Hand.RIGHT)
            if left is None or right is None:
                self._clasp_active = False
                return None
            camera = self.config.camera
            clasped = clasp_detect(
                hand_world_position(left.x_i, left.y_i, left.z, camera),
                hand_world_position(right.x_i, right.y_i, right.z, camera),
                ClaspParams(self.config.clasp_threshold_m),
            )
            fired = clasped and not self._clasp_active
            self._clasp_active = clasped
            return cell if fired else None
        # fist: frames without a mask carry no new information
        if frame.mask is None:
            return None
        fist = fist_detect(frame.mask, self.config.solidity_threshold)
        fired = fist and not self._fist_active
        self._fist_active = fist
        return cell if fired else None

    def _dispatch(self, selection: SelectionEvent, frame: SkeletonFrame,
                  events: list[dict]) -> None:
        if self.dispatcher is None or not self._dispatch_channels:
            return
        request = DispatchRequest(next_request_id(), selection,
                                  self._dispatch_channels, frame.t_ms)
        if not self.dispatcher.enqueue(request):
            events.append({
                "v": PROTOCOL_VERSION, "type": "dispatch_out",
                "i": frame.frame_index, "label": selection.label,
                "status": "rejected", "reason": "queue-full",
            })
            return
        for channel in request.channels:
            events.append({
                "v": PROTOCOL_VERSION, "type": "dispatch_out",
                "i": frame.frame_index, "label": selection.label,
                "channel": channel.value, "status": "queued",
                "request_id": request.request_id,
            })

    def _cursor_out(self, frame, primary, cursor, cell) -> dict:
        return _msg(
            "cursor_out", i=frame.frame_index, t=frame.t_ms,
            x=cursor[0], y=cursor[1],
            hand=primary.value if primary is not None else None,
            cell=cell,
        )

    def _dwell_out(self, frame) -> dict:
        threshold = self.dwell.threshold_frames
        return _msg(
            "dwell_out", i=frame.frame_index, cell=self.dwell.hovered_cell,
            count=self.dwell.count, threshold=threshold,
            fraction=self.dwell.count / threshold,
        )
