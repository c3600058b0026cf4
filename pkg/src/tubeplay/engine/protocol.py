"""Wire grammar: newline-delimited UTF-8 text frames over any stream socket.

Client to engine:
    T <tube> <area> <P|R> <t_ms>
    K <emotion|quant|sound> <float>
    B <mode|rec|play|ai> P

Engine to client:
    NOTE <on|off> <pitch> <vel> <ch> <t_ms>
    LED <tube> <off|blue|pink>
    STATE <json-object>
    ERR <code> <detail>

parse_message(serialize_message(m)) == m for every valid message. Anything
else raises MalformedFrame (bad shape or type) or RangeError (a field out
of its documented range); the parser never raises anything else.
"""

from __future__ import annotations

import json
import re
from typing import Union

from ..events import (
    AI_BUTTON,
    BUTTON_CONTROLS,
    EMOTION_KNOB,
    MODE_TOGGLE,
    PLAY_BUTTON,
    PRESS,
    QUANTIZE_KNOB,
    RECORD_BUTTON,
    RELEASE,
    SOUND_KNOB,
    ControlEvent,
    ErrorMessage,
    LedChange,
    NoteEvent,
    StateSnapshot,
    TouchEvent,
)
from ..progression import LedColor

Message = Union[TouchEvent, ControlEvent, NoteEvent, LedChange, StateSnapshot, ErrorMessage]

MAX_FRAME_BYTES = 65536


class ProtocolError(Exception):
    code = "PROTOCOL"


class MalformedFrame(ProtocolError):
    code = "MALFORMED_FRAME"


class RangeError(ProtocolError):
    code = "RANGE"


KNOB_TOKENS = {"emotion": EMOTION_KNOB, "quant": QUANTIZE_KNOB, "sound": SOUND_KNOB}
BUTTON_TOKENS = {"mode": MODE_TOGGLE, "rec": RECORD_BUTTON, "play": PLAY_BUTTON, "ai": AI_BUTTON}
_KNOB_NAMES = {v: k for k, v in KNOB_TOKENS.items()}
_BUTTON_NAMES = {v: k for k, v in BUTTON_TOKENS.items()}

_UINT_RE = re.compile(r"^[0-9]{1,13}$")
_FLOAT_RE = re.compile(r"^[0-9]*\.?[0-9]+([eE][+-]?[0-9]{1,3})?$")


def _uint(token: str, lo: int, hi: int, what: str) -> int:
    if not _UINT_RE.match(token):
        raise MalformedFrame(f"{what} is not an unsigned integer: {token!r}")
    value = int(token)
    if not lo <= value <= hi:
        raise RangeError(f"{what} must be in {lo}..{hi}, got {value}")
    return value


def _knob_value(token: str) -> float:
    if not _FLOAT_RE.match(token):
        raise MalformedFrame(f"knob value is not a number: {token!r}")
    value = float(token)
    if not 0.0 <= value <= 1.0:
        raise RangeError(f"knob value must be in 0..1, got {value}")
    return value


def parse_message(line: Union[str, bytes]) -> Message:
    """Parse one frame (without requiring the trailing newline)."""
    if isinstance(line, (bytes, bytearray)):
        if len(line) > MAX_FRAME_BYTES:
            raise MalformedFrame(f"frame longer than {MAX_FRAME_BYTES} bytes")
        try:
            line = bytes(line).decode("utf-8")
        except UnicodeDecodeError:
            raise MalformedFrame("frame is not valid UTF-8") from None
    line = line.rstrip("\r\n")
    if len(line) > MAX_FRAME_BYTES:
        raise MalformedFrame(f"frame longer than {MAX_FRAME_BYTES} characters")
    if not line:
        raise MalformedFrame("empty frame")

    verb = line.split(" ", 1)[0]
    if verb == "T":
        return _parse_touch(line)
    if verb == "K":
        return _parse_knob(line)
    if verb == "B":
        return _parse_button(line)
    if verb == "NOTE":
        return _parse_note(line)
    if verb == "LED":
        return _parse_led(line)
    if verb == "STATE":
        return _parse_state(line)
    if verb == "ERR":
        return _parse_err(line)
    raise MalformedFrame(f"unknown verb {verb!r}")


def _fields(line: str, count: int) -> list[str]:
    fields = line.split(" ")
    if len(fields) != count or any(not f for f in fields):
        raise MalformedFrame(f"expected {count} fields, got {line!r}")
    return fields


def _parse_touch(line: str) -> TouchEvent:
    _, tube, area, kind, t = _fields(line, 5)
    if kind not in ("P", "R"):
        raise MalformedFrame(f"touch kind must be P or R, got {kind!r}")
    return TouchEvent(
        tube=_uint(tube, 0, 6, "tube"),
        area=_uint(area, 0, 2, "area"),
        kind=PRESS if kind == "P" else RELEASE,
        timestamp=_uint(t, 0, 10**12, "timestamp"),
    )


def _parse_knob(line: str) -> ControlEvent:
    _, name, raw = _fields(line, 3)
    control = KNOB_TOKENS.get(name)
    if control is None:
        raise MalformedFrame(f"unknown knob {name!r}")
    return ControlEvent(control=control, value=_knob_value(raw))


def _parse_button(line: str) -> ControlEvent:
    _, name, kind = _fields(line, 3)
    control = BUTTON_TOKENS.get(name)
    if control is None:
        raise MalformedFrame(f"unknown button {name!r}")
    if kind != "P":
        raise MalformedFrame(f"button event must be P, got {kind!r}")
    return ControlEvent(control=control, value=1.0)


def _parse_note(line: str) -> NoteEvent:
    _, kind, pitch, vel, ch, t = _fields(line, 6)
    if kind not in ("on", "off"):
        raise MalformedFrame(f"note kind must be on or off, got {kind!r}")
    velocity = _uint(vel, 0, 127, "velocity")
    if kind == "on" and velocity == 0:
        raise RangeError("note-on velocity must be in 1..127, got 0")
    if kind == "off" and velocity != 0:
        raise RangeError(f"note-off velocity must be 0, got {velocity}")
    return NoteEvent(
        kind=kind,
        pitch=_uint(pitch, 0, 127, "pitch"),
        velocity=velocity,
        channel=_uint(ch, 0, 15, "channel"),
        timestamp=_uint(t, 0, 10**12, "timestamp"),
    )


def _parse_led(line: str) -> LedChange:
    _, tube, color = _fields(line, 3)
    try:
        led = LedColor(color)
    except ValueError:
        raise MalformedFrame(f"unknown LED color {color!r}") from None
    return LedChange(tube=_uint(tube, 0, 6, "tube"), color=led)


def _parse_state(line: str) -> StateSnapshot:
    parts = line.split(" ", 1)
    if len(parts) != 2 or not parts[1]:
        raise MalformedFrame("STATE frame missing payload")
    try:
        data = json.loads(parts[1])
    except Exception:
        raise MalformedFrame("STATE payload is not valid JSON") from None
    if not isinstance(data, dict):
        raise MalformedFrame("STATE payload must be a JSON object")
    return StateSnapshot(data=data)


def _parse_err(line: str) -> ErrorMessage:
    parts = line.split(" ", 2)
    if len(parts) < 2 or not parts[1]:
        raise MalformedFrame("ERR frame missing code")
    detail = parts[2] if len(parts) == 3 else ""
    return ErrorMessage(code=parts[1], detail=detail)


def serialize_message(msg: Message) -> str:
    """One frame, no trailing newline; the transport appends it."""
    if isinstance(msg, TouchEvent):
        kind = "P" if msg.kind == PRESS else "R"
        return f"T {msg.tube} {msg.area} {kind} {msg.timestamp}"
    if isinstance(msg, ControlEvent):
        if msg.control in BUTTON_CONTROLS:
            return f"B {_BUTTON_NAMES[msg.control]} P"
        return f"K {_KNOB_NAMES[msg.control]} {msg.value!r}"
    if isinstance(msg, NoteEvent):
        return f"NOTE {msg.kind} {msg.pitch} {msg.velocity} {msg.channel} {msg.timestamp}"
    if isinstance(msg, LedChange):
        return f"LED {msg.tube} {msg.color.value}"
    if isinstance(msg, StateSnapshot):
        return "STATE " + json.dumps(msg.data, sort_keys=True, separators=(",", ":"))
    if isinstance(msg, ErrorMessage):
        return f"ERR {msg.code} {msg.detail}" if msg.detail else f"ERR {msg.code}"
    raise TypeError(f"cannot serialize {type(msg).__name__}")
