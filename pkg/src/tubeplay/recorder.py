"""History keeping: capture the latest take and loop it back alongside live play.

Only the most recent take is kept, which nudges the player toward live
playing instead of sequencing. The recorder taps the post-quantization
output notes, so playing back reproduces exactly what was heard.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from typing import Iterator, Optional

from .events import NOTE_OFF, NOTE_ON, NoteEvent

# Far beyond human playing density; overflow ends the take with a warning.
MAX_TAKE_EVENTS = 10_000


class StopWithoutStart(Exception):
    """Stop pressed while no take was rolling (UI/protocol ordering bug)."""


@dataclass(frozen=True)
class Recording:
    """A finished take: note events stamped relative to record start."""

    events: tuple[NoteEvent, ...]
    duration: int

    def __post_init__(self) -> None:
        if self.duration < 0:
            raise ValueError(f"duration must be >= 0, got {self.duration}")
        last = 0
        for ev in self.events:
            if ev.timestamp < last:
                raise ValueError("recording events must be time-ordered")
            if ev.timestamp > self.duration:
                raise ValueError("recording event past the take's duration")
            last = ev.timestamp


class Recorder:
    """Owns the rolling take and the single stored recording."""

    def __init__(self, capacity: int = MAX_TAKE_EVENTS) -> None:
        self.capacity = capacity
        self.latest: Optional[Recording] = None
        self.recording = False
        self._start = 0
        self._events: list[NoteEvent] = []
        self._open: Counter[tuple[int, int]] = Counter()

    def start(self, now: int) -> None:
        """Begin a take; a start while rolling simply restarts it."""
        self.recording = True
        self._start = now
        self._events = []
        self._open = Counter()

    def capture(self, ev: NoteEvent) -> Optional[Recording]:
        """Feed one output note event; returns a take if overflow closed it.

        Offs whose matching on predates the take are dropped so every stored
        on/off pair lives fully inside the recording.
        """
        if not self.recording:
            return None
        if len(self._events) >= self.capacity:
            return self.stop(ev.timestamp)
        key = (ev.pitch, ev.channel)
        if ev.kind == NOTE_OFF:
            if self._open[key] <= 0:
                return None
            self._open[key] -= 1
        else:
            self._open[key] += 1
        self._events.append(replace(ev, timestamp=ev.timestamp - self._start))
        return None

    def stop(self, now: int) -> Recording:
        """Close the take, store it as the one kept recording, and return it.

        Notes still sounding get their note-offs at the take's end, so a
        recording never holds an unpaired note-on.
        """
        if not self.recording:
            raise StopWithoutStart("record stop with no take rolling")
        duration = max(0, now - self._start)
        events = list(self._events)
        for (pitch, channel), count in sorted(self._open.items()):
            for _ in range(count):
                events.append(
                    NoteEvent(NOTE_OFF, pitch, 0, channel, timestamp=duration)
                )
        self.recording = False
        self._events = []
        self._open = Counter()
        self.latest = Recording(events=tuple(events), duration=duration)
        return self.latest


def playback_events(recording: Recording, start_at: int) -> Iterator[NoteEvent]:
    """Endless looped stream of the take's events at absolute engine times.

    Each pass is offset by one duration; the stream is empty for takes with
    no events or a sub-millisecond duration (a zero-length loop would never
    advance time).
    """
    if not recording.events or recording.duration < 1:
        return
    loop = 0
    while True:
        base = start_at + loop * recording.duration
        for ev in recording.events:
            yield replace(ev, timestamp=base + ev.timestamp)
        loop += 1
