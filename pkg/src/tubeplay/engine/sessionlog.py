"""Session log: every input the engine ingested, with its ingest time.

Format: `# key value` header comments (seed, bpm, presets fingerprint),
then one line per input: `<ingest_ms> <frame>`. Feeding the lines back at
their recorded times reproduces the session byte for byte.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Optional, TextIO, Union

LOG_VERSION = "tubeplay-session v1"


class SessionLogError(Exception):
    """Log cannot be parsed; the message carries the offending line number."""


def header_lines(seed: int, bpm: float, presets_digest: str) -> list[str]:
    return [
        f"# {LOG_VERSION}",
        f"# seed {seed}",
        f"# bpm {bpm!r}",
        f"# presets {presets_digest}",
    ]


class SessionLogWriter:
    """Append-only writer used by the live server."""

    def __init__(self, f: TextIO, seed: int, bpm: float, presets_digest: str) -> None:
        self._f = f
        for line in header_lines(seed, bpm, presets_digest):
            self._f.write(line + "\n")
        self._f.flush()

    def append(self, ingest_ms: int, frame: str) -> None:
        self._f.write(f"{ingest_ms} {frame}\n")
        self._f.flush()


def read_session_log(path: Union[str, Path]) -> tuple[dict, list[tuple[int, str]]]:
    """Parse a log into (header meta, [(ingest_ms, frame), ...])."""
    meta: dict = {}
    entries: list[tuple[int, str]] = []
    last_ts: Optional[int] = None
    for lineno, raw in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        line = raw.rstrip()
        if not line:
            continue
        if line.startswith("#"):
            fields = line[1:].strip().split(" ", 1)
            if len(fields) == 2 and fields[0] in ("seed", "bpm", "presets"):
                key, value = fields
                try:
                    meta[key] = (
                        int(value) if key == "seed"
                        else float(value) if key == "bpm"
                        else value.strip()
                    )
                except ValueError:
                    raise SessionLogError(f"line {lineno}: bad header value {value!r}") from None
            continue
        parts = line.split(" ", 1)
        if len(parts) != 2 or not parts[0].isdigit():
            raise SessionLogError(f"line {lineno}: expected '<ms> <frame>', got {line!r}")
        ts = int(parts[0])
        if last_ts is not None and ts < last_ts:
            raise SessionLogError(f"line {lineno}: ingest time {ts} goes backwards")
        last_ts = ts
        entries.append((ts, parts[1]))
    return meta, entries


def write_output_log(path: Union[str, Path], frames: Iterable[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for frame in frames:
            f.write(frame + "\n")


def recording_to_lines(recording) -> list[str]:
    """Serialize a stored take in the session-log line format.

    One `<rel_ms> NOTE ...` line per event, headed by the take's duration;
    handy for test fixtures and for eyeballing takes.
    """
    from .protocol import serialize_message

    lines = [f"# recording v1 duration {recording.duration}"]
    lines.extend(f"{ev.timestamp} {serialize_message(ev)}" for ev in recording.events)
    return lines


def recording_from_lines(lines: Iterable[str]):
    """Inverse of recording_to_lines."""
    from ..events import NoteEvent
    from ..recorder import Recording
    from .protocol import parse_message

    duration = None
    events = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = line.split()
            if "duration" in fields:
                duration = int(fields[fields.index("duration") + 1])
            continue
        parts = line.split(" ", 1)
        if len(parts) != 2 or not parts[0].isdigit():
            raise SessionLogError(f"line {lineno}: expected '<ms> NOTE ...', got {line!r}")
        msg = parse_message(parts[1])
        if not isinstance(msg, NoteEvent):
            raise SessionLogError(f"line {lineno}: recording lines must be NOTE frames")
        events.append(msg)
    if duration is None:
        duration = events[-1].timestamp if events else 0
    return Recording(events=tuple(events), duration=duration)
