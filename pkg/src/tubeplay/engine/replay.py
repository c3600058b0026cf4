"""Deterministic session replay: logged inputs through the live code path.

The log's header pins seed and tempo; the preset fingerprint guards against
replaying under a different table. Two replays of one log produce identical
output bytes.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import Union

from ..events import NoteEvent, StateSnapshot
from .config import EngineConfig, presets_digest
from .core import Engine
from .midifile import write_midi_file
from .protocol import Message, serialize_message
from .sessionlog import read_session_log


class ReplayError(Exception):
    """The log and the supplied config disagree, or the log is unusable."""


def replay_session(log_path: Union[str, Path], config: EngineConfig) -> list[Message]:
    """Feed a session log through a fresh engine; returns all output messages."""
    meta, entries = read_session_log(log_path)
    digest = meta.get("presets")
    if digest is not None and digest != presets_digest(config.presets):
        raise ReplayError(
            "preset table differs from the one the session was recorded with"
        )
    bpm = float(meta.get("bpm", config.bpm))
    seed = int(meta.get("seed", config.seed))
    engine = Engine(replace_config(config, bpm=bpm, seed=seed))

    outputs: list[Message] = []
    last_ts = 0
    for ts, frame in entries:
        outputs.extend(engine.handle_frame(frame, ts))
        last_ts = ts
    outputs.extend(engine.finish(last_ts))
    return outputs


def replace_config(config: EngineConfig, **changes) -> EngineConfig:
    return replace(config, **changes)


def replay_to_lines(log_path: Union[str, Path], config: EngineConfig) -> list[str]:
    return [serialize_message(msg) for msg in replay_session(log_path, config)]


def bounce_session(
    log_path: Union[str, Path], config: EngineConfig, midi_path: Union[str, Path]
) -> int:
    """Render a session log to a standard MIDI file; returns the note count."""
    meta, _ = read_session_log(log_path)
    bpm = float(meta.get("bpm", config.bpm))
    messages = replay_session(log_path, config)

    notes = [msg for msg in messages if isinstance(msg, NoteEvent)]
    patch_changes: list[tuple[int, int]] = []
    patch = config.patch
    for msg in messages:
        if isinstance(msg, StateSnapshot) and msg.data.get("patch") != patch:
            patch = msg.data["patch"]
            patch_changes.append((int(msg.data.get("t", 0)), patch))
    write_midi_file(
        midi_path, notes, bpm, initial_patch=config.patch, patch_changes=patch_changes
    )
    return len(notes)
