"""Event and message types shared across the engine.

Touch and control events flow in from clients; note events are the only
sound-producing currency flowing out. LED, state, and error messages carry
feedback back to clients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .progression import LedColor

PRESS = "press"
RELEASE = "release"

NOTE_ON = "on"
NOTE_OFF = "off"

EMOTION_KNOB = "emotion_knob"
QUANTIZE_KNOB = "quantize_knob"
SOUND_KNOB = "sound_knob"
MODE_TOGGLE = "mode_toggle"
RECORD_BUTTON = "record_button"
PLAY_BUTTON = "play_button"
AI_BUTTON = "ai_button"

KNOB_CONTROLS = frozenset({EMOTION_KNOB, QUANTIZE_KNOB, SOUND_KNOB})
BUTTON_CONTROLS = frozenset({MODE_TOGGLE, RECORD_BUTTON, PLAY_BUTTON, AI_BUTTON})


@dataclass(frozen=True)
class TouchEvent:
    """Finger down or up on one of the 21 tube zones."""

    tube: int
    area: int
    kind: str
    timestamp: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.tube <= 6:
            raise ValueError(f"tube must be in 0..6, got {self.tube}")
        if not 0 <= self.area <= 2:
            raise ValueError(f"area must be in 0..2, got {self.area}")
        if self.kind not in (PRESS, RELEASE):
            raise ValueError(f"touch kind must be press or release, got {self.kind!r}")
        if self.timestamp < 0:
            raise ValueError(f"timestamp must be >= 0, got {self.timestamp}")


@dataclass(frozen=True)
class ControlEvent:
    """Knob move or button press on the controller panel.

    Knob values are clamped into [0, 1]; buttons carry value 1.0.
    """

    control: str
    value: float = 1.0
    timestamp: int = 0

    def __post_init__(self) -> None:
        if self.control not in KNOB_CONTROLS and self.control not in BUTTON_CONTROLS:
            raise ValueError(f"unknown control {self.control!r}")
        object.__setattr__(self, "value", min(1.0, max(0.0, float(self.value))))
        if self.timestamp < 0:
            raise ValueError(f"timestamp must be >= 0, got {self.timestamp}")


@dataclass(frozen=True)
class NoteEvent:
    """One note-on or note-off in the output stream."""

    kind: str
    pitch: int
    velocity: int
    channel: int = 0
    timestamp: int = 0

    def __post_init__(self) -> None:
        if self.kind not in (NOTE_ON, NOTE_OFF):
            raise ValueError(f"note kind must be on or off, got {self.kind!r}")
        if not 0 <= self.pitch <= 127:
            raise ValueError(f"pitch must be in 0..127, got {self.pitch}")
        if self.kind == NOTE_ON and not 1 <= self.velocity <= 127:
            raise ValueError(f"note-on velocity must be in 1..127, got {self.velocity}")
        if self.kind == NOTE_OFF and self.velocity != 0:
            raise ValueError(f"note-off velocity must be 0, got {self.velocity}")
        if not 0 <= self.channel <= 15:
            raise ValueError(f"channel must be in 0..15, got {self.channel}")
        if self.timestamp < 0:
            raise ValueError(f"timestamp must be >= 0, got {self.timestamp}")


@dataclass(frozen=True)
class LedChange:
    """New color for one tube's internal light."""

    tube: int
    color: LedColor

    def __post_init__(self) -> None:
        if not 0 <= self.tube <= 6:
            raise ValueError(f"tube must be in 0..6, got {self.tube}")
        if not isinstance(self.color, LedColor):
            object.__setattr__(self, "color", LedColor(self.color))


@dataclass(frozen=True)
class StateSnapshot:
    """Full instrument status, shipped to clients as canonical JSON."""

    data: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ErrorMessage:
    """Classified protocol or usage error reported back to clients."""

    code: str
    detail: str = ""
