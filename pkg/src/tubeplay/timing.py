"""Musical clock helpers: onset quantization and the ordered event scheduler.

All times are integer milliseconds on one monotonic engine clock. Replayed
sessions reuse the same code with a virtual clock, so nothing here may
consult wall time.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Optional

MIN_BPM = 20.0
MAX_BPM = 300.0

# Shortest audible note when quantization is off.
MIN_NOTE_MS = 10


class Subdivision(str, Enum):
    """Beat grid choices. The wire/config token is the enum value."""

    OFF = "off"
    QUARTER = "1/4"
    EIGHTH = "1/8"
    EIGHTH_TRIPLET = "1/8T"
    SIXTEENTH = "1/16"

    @property
    def beat_fraction(self) -> Optional[Fraction]:
        """Grid length as a fraction of one beat (None when off)."""
        return _FRACTIONS[self]

    @classmethod
    def from_token(cls, token: str) -> "Subdivision":
        try:
            return cls(token)
        except ValueError:
            raise ValueError(f"unknown subdivision {token!r}") from None


_FRACTIONS: dict[Subdivision, Optional[Fraction]] = {
    Subdivision.OFF: None,
    Subdivision.QUARTER: Fraction(1, 1),
    Subdivision.EIGHTH: Fraction(1, 2),
    Subdivision.EIGHTH_TRIPLET: Fraction(1, 3),
    Subdivision.SIXTEENTH: Fraction(1, 4),
}

# Knob quartiles, low to high. The triplet grid is reachable only through
# the config file; four detents keep the physical-style knob legible.
KNOB_SUBDIVISIONS = (
    Subdivision.OFF,
    Subdivision.QUARTER,
    Subdivision.EIGHTH,
    Subdivision.SIXTEENTH,
)


def subdivision_for_knob(value: float) -> Subdivision:
    value = min(1.0, max(0.0, value))
    return KNOB_SUBDIVISIONS[min(3, int(value * 4))]


@dataclass(frozen=True)
class QuantizeConfig:
    """Tempo plus the grid the player asked to be snapped onto."""

    bpm: float = 100.0
    subdivision: Subdivision = Subdivision.OFF

    def __post_init__(self) -> None:
        if not MIN_BPM <= self.bpm <= MAX_BPM:
            raise ValueError(f"bpm must be in {MIN_BPM:.0f}..{MAX_BPM:.0f}, got {self.bpm}")

    def grid_ms(self) -> Optional[int]:
        """Grid period in whole milliseconds, or None when quantization is off."""
        fraction = self.subdivision.beat_fraction
        if fraction is None:
            return None
        return max(1, round(60000.0 / self.bpm * float(fraction)))


def quantize_onset(t: int, cfg: QuantizeConfig) -> int:
    """Delay ``t`` onto the next grid point (identity when the grid is off).

    Quantization is a pure delay: the result is the smallest grid multiple
    that is >= t, never an earlier time.
    """
    if t < 0:
        raise ValueError(f"onset time must be >= 0, got {t}")
    grid = cfg.grid_ms()
    if grid is None:
        return t
    return -(-t // grid) * grid


def pair_release(onset_scheduled: int, release_raw: int, cfg: QuantizeConfig) -> int:
    """Due time for a note-off given when its onset actually sounds.

    A quantized onset can land after the finger already lifted; the note
    still sounds for at least one grid period (10 ms when not quantizing)
    so the touch always has an audible effect.
    """
    grid = cfg.grid_ms()
    floor = grid if grid is not None else MIN_NOTE_MS
    return max(release_raw, onset_scheduled + floor)


@dataclass
class ScheduledEvent:
    due_time: int
    payload: Any
    sequence: int
    tag: Optional[str] = None
    alive: bool = True


@dataclass
class Scheduler:
    """Min-heap of events popped in (due_time, insertion order)."""

    _heap: list[tuple[int, int]] = field(default_factory=list)
    _entries: dict[int, ScheduledEvent] = field(default_factory=dict)
    _next_seq: int = 0

    def schedule(self, due_time: int, payload: Any, tag: Optional[str] = None) -> int:
        """Queue a payload; returns a handle usable with cancel()."""
        seq = self._next_seq
        self._next_seq += 1
        self._entries[seq] = ScheduledEvent(due_time, payload, seq, tag)
        heapq.heappush(self._heap, (due_time, seq))
        return seq

    def cancel(self, seq: int) -> bool:
        entry = self._entries.get(seq)
        if entry is None or not entry.alive:
            return False
        entry.alive = False
        return True

    def cancel_tag(self, tag: str) -> int:
        """Cancel every pending event carrying ``tag``; returns the count."""
        hits = 0
        for entry in self._entries.values():
            if entry.alive and entry.tag == tag:
                entry.alive = False
                hits += 1
        return hits

    def advance(self, now: int) -> list[ScheduledEvent]:
        """Pop every live event due at or before ``now``, in order, once."""
        due: list[ScheduledEvent] = []
        while self._heap and self._heap[0][0] <= now:
            _, seq = heapq.heappop(self._heap)
            entry = self._entries.pop(seq)
            if entry.alive:
                due.append(entry)
        return due

    def drain(self) -> list[ScheduledEvent]:
        """Pop everything still pending, regardless of due time."""
        due: list[ScheduledEvent] = []
        while self._heap:
            _, seq = heapq.heappop(self._heap)
            entry = self._entries.pop(seq)
            if entry.alive:
                due.append(entry)
        return due

    def pending(self) -> int:
        return sum(1 for entry in self._entries.values() if entry.alive)
