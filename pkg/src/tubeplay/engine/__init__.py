"""Session orchestration: event loop, wire protocol, logging, replay, output."""

from .config import EngineConfig, load_config, presets_digest
from .core import Engine, MODE_CHORD, MODE_SINGLE
from .protocol import (
    MalformedFrame,
    ProtocolError,
    RangeError,
    parse_message,
    serialize_message,
)
from .replay import bounce_session, replay_session, replay_to_lines

__all__ = [
    "Engine",
    "EngineConfig",
    "MODE_CHORD",
    "MODE_SINGLE",
    "MalformedFrame",
    "ProtocolError",
    "RangeError",
    "bounce_session",
    "load_config",
    "parse_message",
    "presets_digest",
    "replay_session",
    "replay_to_lines",
    "serialize_message",
]
