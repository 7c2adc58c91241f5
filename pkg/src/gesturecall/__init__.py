"""Gesture-call engine: skeleton streams to cursor motion, option selections
and caretaker notifications."""

from .model import (
    CameraConfig,
    Channel,
    Hand,
    HandPreference,
    IntentScheme,
    JointSample,
    MappingMode,
    Proximity,
    ScreenConfig,
    SessionConfig,
    SkeletonFrame,
    validate_frame,
)
from .session import SessionEngine

__all__ = [
    "CameraConfig",
    "Channel",
    "Hand",
    "HandPreference",
    "IntentScheme",
    "JointSample",
    "MappingMode",
    "Proximity",
    "ScreenConfig",
    "SessionConfig",
    "SessionEngine",
    "SkeletonFrame",
    "validate_frame",
]
