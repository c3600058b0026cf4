"""Minimal standard MIDI file (format 0) writer, plus a reader for checks.

Enough SMF to bounce a session: one tempo event, program changes, and the
note stream. Engine milliseconds are converted to ticks at 480 per beat.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Iterable, Sequence, Union

from ..events import NOTE_ON, NoteEvent

DIVISION = 480  # ticks per beat


def encode_vlq(value: int) -> bytes:
    """MIDI variable-length quantity, 7 bits per byte, high bit chains."""
    if value < 0:
        raise ValueError(f"vlq value must be >= 0, got {value}")
    chunks = [value & 0x7F]
    value >>= 7
    while value:
        chunks.append((value & 0x7F) | 0x80)
        value >>= 7
    return bytes(reversed(chunks))


def decode_vlq(data: bytes, pos: int) -> tuple[int, int]:
    value = 0
    while True:
        byte = data[pos]
        pos += 1
        value = (value << 7) | (byte & 0x7F)
        if not byte & 0x80:
            return value, pos


def ms_to_ticks(ms: int, bpm: float) -> int:
    return round(ms * bpm * DIVISION / 60000.0)


def write_midi_file(
    path: Union[str, Path],
    notes: Sequence[NoteEvent],
    bpm: float,
    initial_patch: int = 0,
    patch_changes: Iterable[tuple[int, int]] = (),
) -> None:
    """Write the note stream as a single-track MIDI file.

    ``patch_changes`` are (time_ms, program) pairs; the initial patch lands
    at tick 0. Event order at equal ticks follows the stream order, with
    program changes slotted ahead of notes of the same time.
    """
    timed: list[tuple[int, int, bytes]] = []
    tempo = round(60000000.0 / bpm)
    timed.append((0, 0, b"\xff\x51\x03" + struct.pack(">I", tempo)[1:]))
    timed.append((0, 1, bytes((0xC0, initial_patch & 0x7F))))
    for order, (t_ms, patch) in enumerate(patch_changes, start=2):
        timed.append((ms_to_ticks(t_ms, bpm), order, bytes((0xC0, patch & 0x7F))))
    base = 2 + len(list(patch_changes))
    for order, ev in enumerate(notes, start=base):
        status = (0x90 if ev.kind == NOTE_ON else 0x80) | (ev.channel & 0x0F)
        timed.append(
            (ms_to_ticks(ev.timestamp, bpm), order, bytes((status, ev.pitch, ev.velocity)))
        )
    timed.sort(key=lambda item: (item[0], item[1]))

    track = bytearray()
    cursor = 0
    for tick, _, payload in timed:
        track += encode_vlq(tick - cursor)
        track += payload
        cursor = tick
    track += encode_vlq(0) + b"\xff\x2f\x00"

    with open(path, "wb") as f:
        f.write(b"MThd" + struct.pack(">IHHH", 6, 0, 1, DIVISION))
        f.write(b"MTrk" + struct.pack(">I", len(track)) + bytes(track))


def read_midi_file(path: Union[str, Path]) -> dict:
    """Parse back a file this module wrote; used for verification.

    Returns division, tempo (us per beat), program changes, and notes as
    (tick, kind, pitch, velocity, channel) tuples.
    """
    data = Path(path).read_bytes()
    if data[:4] != b"MThd":
        raise ValueError("not a MIDI file")
    _, fmt, ntracks, division = struct.unpack(">IHHH", data[4:14])
    pos = 14
    if data[pos:pos + 4] != b"MTrk":
        raise ValueError("missing track chunk")
    length = struct.unpack(">I", data[pos + 4:pos + 8])[0]
    track = data[pos + 8:pos + 8 + length]

    tempo = None
    notes: list[tuple[int, str, int, int, int]] = []
    programs: list[tuple[int, int]] = []
    tick = 0
    i = 0
    while i < len(track):
        delta, i = decode_vlq(track, i)
        tick += delta
        status = track[i]
        if status == 0xFF:
            meta, = track[i + 1:i + 2]
            size, i2 = decode_vlq(track, i + 2)
            body = track[i2:i2 + size]
            if meta == 0x51:
                tempo = int.from_bytes(body, "big")
            i = i2 + size
            if meta == 0x2F:
                break
        elif status & 0xF0 in (0x80, 0x90):
            kind = "on" if status & 0xF0 == 0x90 and track[i + 2] > 0 else "off"
            notes.append((tick, kind, track[i + 1], track[i + 2], status & 0x0F))
            i += 3
        elif status & 0xF0 == 0xC0:
            programs.append((tick, track[i + 1]))
            i += 2
        else:
            raise ValueError(f"unexpected status byte 0x{status:02x}")
    return {
        "format": fmt,
        "ntracks": ntracks,
        "division": division,
        "tempo": tempo,
        "programs": programs,
        "notes": notes,
    }
