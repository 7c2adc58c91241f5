"""Hand-to-cursor translation.

Three modes:
  * fixed_factor      — constant gain, 3.0 far / 1.8 near, about the centers
  * dynamic_absolute  — depth-scaled linear map, gain grows with distance
  * dynamic_relative  — deltas applied around the last tracked position, with
                        an optional velocity-driven kinetic offset

All modes work in center-origin coordinates and convert to top-left screen
pixels as a final clamp-and-round step, so output always lands on the canvas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .model import CameraConfig, KineticParams, MappingMode, Proximity, ScreenConfig


@dataclass(frozen=True)
class MappingState:
    mode: MappingMode = MappingMode.FIXED_FACTOR
    focus_image: tuple[float, float] | None = None  # last tracked hand position
    focus_screen: tuple[int, int] | None = None  # last cursor position, top-left px
    k_x: float = 0.0  # accumulated kinetic offset, screen px
    k_y: float = 0.0
    kinetic_params: KineticParams = field(default_factory=KineticParams)
    kinetic_enabled: bool = False
    z_window: tuple[float, ...] = ()  # recent depths, newest last
    z_window_size: int = 5


def scale_factors(
    z: float, camera: CameraConfig, screen: ScreenConfig
) -> tuple[float, float]:
    """Depth-dependent gains (screen px per image px) in x and y.

    alpha = z * sin(theta/2) * screen_resolution / ((span/2) * image_resolution)
    """
    if z <= 0:
        raise ValueError(f"depth must be positive (z={z})")
    alpha_x = (
        z * math.sin(math.radians(camera.theta_h) / 2) * screen.width
        / ((screen.x_span / 2) * camera.image_width)
    )
    alpha_y = (
        z * math.sin(math.radians(camera.theta_v) / 2) * screen.height
        / ((screen.y_span / 2) * camera.image_height)
    )
    return alpha_x, alpha_y


def _centered(hand: tuple[float, float], camera: CameraConfig) -> tuple[float, float]:
    return hand[0] - camera.image_width / 2, hand[1] - camera.image_height / 2


def _clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


def _to_screen(xc: float, yc: float, screen: ScreenConfig) -> tuple[int, int]:
    # Clamp first, then round half-up, so output stays in [0, w-1] x [0, h-1].
    x = _clamp(xc + screen.width / 2, 0, screen.width - 1)
    y = _clamp(yc + screen.height / 2, 0, screen.height - 1)
    return int(math.floor(x + 0.5)), int(math.floor(y + 0.5))


def _push_z(state: MappingState, z: float) -> tuple[float, MappingState]:
    window = (state.z_window + (z,))[-state.z_window_size:]
    return sum(window) / len(window), replace(state, z_window=window)


def map_fixed(
    hand: tuple[float, float],
    proximity: Proximity,
    camera: CameraConfig,
    screen: ScreenConfig,
    near_factor: float = 1.8,
    far_factor: float = 3.0,
) -> tuple[int, int]:
    """Constant-gain mapping about the image/screen centers."""
    factor = far_factor if proximity is Proximity.FAR else near_factor
    xc, yc = _centered(hand, camera)
    return _to_screen(factor * xc, factor * yc, screen)


def map_absolute(
    hand: tuple[float, float],
    z: float,
    state: MappingState,
    camera: CameraConfig,
    screen: ScreenConfig,
) -> tuple[tuple[int, int], MappingState]:
    """Depth-scaled absolute mapping; depth is smoothed over the state window."""
    z_smooth, state = _push_z(state, z)
    alpha_x, alpha_y = scale_factors(z_smooth, camera, screen)
    xc, yc = _centered(hand, camera)
    return _to_screen(alpha_x * xc, alpha_y * yc, screen), state


def kinetic_delta(v: float, params: KineticParams) -> float:
    """Per-frame kinetic offset increment, exponential in velocity past the dead zone.

    Odd in v, so motion in the opposite direction decrements by the same law.
    """
    mag = abs(v)
    if mag <= params.v_min:
        return 0.0
    return math.copysign(params.c * (math.exp(params.beta * (mag - params.v_min)) - 1), v)


def map_relative(
    hand: tuple[float, float],
    z: float,
    state: MappingState,
    camera: CameraConfig,
    screen: ScreenConfig,
) -> tuple[tuple[int, int], MappingState]:
    """Focus-centered mapping: cursor moves by alpha * (hand delta) from the anchor.

    On the first frame (or after a re-anchor) the hand position is adopted as
    the focus and the cursor starts at screen center. The kinetic offset, when
    enabled, is tracked separately from the focus and added at output time so
    it never compounds through the per-frame deltas.
    """
    z_smooth, state = _push_z(state, z)
    if state.focus_image is None or state.focus_screen is None:
        center = screen.center
        return center, replace(state, focus_image=hand, focus_screen=center)

    alpha_x, alpha_y = scale_factors(z_smooth, camera, screen)
    dx = hand[0] - state.focus_image[0]
    dy = hand[1] - state.focus_image[1]
    bx = state.focus_screen[0] + alpha_x * dx
    by = state.focus_screen[1] + alpha_y * dy
    base = (
        int(math.floor(_clamp(bx, 0, screen.width - 1) + 0.5)),
        int(math.floor(_clamp(by, 0, screen.height - 1) + 0.5)),
    )
    state = replace(state, focus_image=hand, focus_screen=base)

    if not state.kinetic_enabled:
        return base, state
    k_x = state.k_x + kinetic_delta(dx, state.kinetic_params)
    k_y = state.k_y + kinetic_delta(dy, state.kinetic_params)
    state = replace(state, k_x=k_x, k_y=k_y)
    out = (
        int(math.floor(_clamp(base[0] + k_x, 0, screen.width - 1) + 0.5)),
        int(math.floor(_clamp(base[1] + k_y, 0, screen.height - 1) + 0.5)),
    )
    return out, state


def re_anchor(state: MappingState) -> MappingState:
    """Drop the focus point and kinetic offsets; next relative frame restarts at center.

    Called on every primary-hand switch so no cursor delta ever mixes hands.
    The depth window is cleared too: the incoming hand has its own depth.
    """
    return replace(
        state, focus_image=None, focus_screen=None, k_x=0.0, k_y=0.0, z_window=()
    )
