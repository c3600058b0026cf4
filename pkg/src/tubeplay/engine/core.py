"""Session core: one logical event loop owning all instrument state.

Drivers (live server, replay) feed the engine input frames stamped with a
non-decreasing clock and broadcast whatever messages come back. No state is
ever mutated outside these entry points, which is what makes a replayed
session bit-identical to the live one.
"""

from __future__ import annotations

import logging
import random
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Optional

from .. import improviser as improv_mod
from .. import progression as prog_mod
from ..events import (
    AI_BUTTON,
    EMOTION_KNOB,
    MODE_TOGGLE,
    NOTE_OFF,
    NOTE_ON,
    PLAY_BUTTON,
    PRESS,
    QUANTIZE_KNOB,
    RECORD_BUTTON,
    SOUND_KNOB,
    ControlEvent,
    ErrorMessage,
    LedChange,
    NoteEvent,
    StateSnapshot,
    TouchEvent,
)
from ..harmony import (
    MappingRangeError,
    default_mapping,
    diatonic_triad,
    map_touch,
    preset_for_knob,
)
from ..progression import LedColor, ProgressionCursor
from ..recorder import Recorder, playback_events
from ..timing import (
    QuantizeConfig,
    Scheduler,
    Subdivision,
    pair_release,
    quantize_onset,
    subdivision_for_knob,
)
from .config import EngineConfig
from .protocol import Message, ProtocolError, parse_message

log = logging.getLogger(__name__)

MODE_SINGLE = "single_note"
MODE_CHORD = "chord_progression"

# Touch intensity is not sensed, so live notes share one fixed velocity.
LIVE_VELOCITY = 100
LIVE_CHANNEL = 0
IMPROV_CHANNEL = 1

SOURCE_LIVE = "live"
SOURCE_PLAYBACK = "playback"
SOURCE_IMPROV = "improv"


@dataclass
class _HeldZone:
    pitches: tuple[int, ...]
    onset_scheduled: int
    raw_onset: int
    on_handles: tuple[int, ...]


class _Pulled:
    """One-item lookahead over an endless (or finite) note stream."""

    def __init__(self, events: Iterator[NoteEvent]) -> None:
        self._events = events
        self._head: Optional[NoteEvent] = None
        self._done = False

    def peek_due(self) -> Optional[int]:
        if self._head is None and not self._done:
            self._head = next(self._events, None)
            if self._head is None:
                self._done = True
        return None if self._head is None else self._head.timestamp

    def pop(self) -> NoteEvent:
        ev = self._head
        assert ev is not None
        self._head = None
        return ev


class Engine:
    """Instrument state machine plus scheduler, driven by one clock."""

    def __init__(self, config: EngineConfig, seed: Optional[int] = None) -> None:
        if not config.presets:
            raise ValueError("engine config has no presets")
        self.config = config
        self.seed = config.seed if seed is None else seed
        self.rng = random.Random(self.seed)
        self.clock = 0

        self.mode = MODE_SINGLE
        self.preset = config.presets[0]
        self.mapping = default_mapping(self.preset.root, self.preset.scale)
        self.cursor = ProgressionCursor(self.preset.progression, 0)
        self.quantize = QuantizeConfig(config.bpm, config.subdivision)
        self.patch = config.patch

        self.scheduler = Scheduler()
        self.recorder = Recorder()
        self.playing = False
        self.ai_active = False
        self._playback: Optional[_Pulled] = None
        self._improv: Optional[_Pulled] = None

        self.held: dict[tuple[int, int], _HeldZone] = {}
        self._sounding: Counter[tuple[str, int, int]] = Counter()
        self._skipped_offs: Counter[tuple[str, int, int]] = Counter()
        self._advance_stamp: Optional[int] = None
        self._led: tuple[LedColor, ...] = (LedColor.OFF,) * 7
        self._out: list[Message] = []

    # -- public driver API ------------------------------------------------

    def handle_frame(self, line, now: int) -> list[Message]:
        """Advance to ``now``, then apply one raw wire frame.

        Protocol errors never escape; they come back as ERR messages so the
        loop survives arbitrary input.
        """
        self._advance_to(now)
        try:
            msg = parse_message(line)
        except ProtocolError as exc:
            self._error(exc.code, str(exc))
            return self._drain()
        if isinstance(msg, TouchEvent):
            self._touch(msg.tube, msg.area, msg.kind, now)
        elif isinstance(msg, ControlEvent):
            self._control(msg.control, msg.value, now)
        else:
            self._error("NOT_AN_INPUT", f"clients may not send {type(msg).__name__}")
        self._advance_to(self.clock)
        return self._drain()

    def handle_input(self, ev) -> list[Message]:
        """Typed-event twin of handle_frame, stamped by the event itself."""
        self._advance_to(ev.timestamp)
        if isinstance(ev, TouchEvent):
            self._touch(ev.tube, ev.area, ev.kind, self.clock)
        elif isinstance(ev, ControlEvent):
            self._control(ev.control, ev.value, self.clock)
        else:
            raise TypeError(f"not an input event: {type(ev).__name__}")
        self._advance_to(self.clock)
        return self._drain()

    def advance(self, now: int) -> list[Message]:
        """Move the clock forward, emitting everything that came due."""
        self._advance_to(now)
        return self._drain()

    def finish(self, now: int) -> list[Message]:
        """End the session: stop generators, drain the schedule, flush offs."""
        self._advance_to(now)
        if self.playing:
            self._stop_playback(self.clock)
        if self.ai_active:
            self._stop_improv(self.clock)
        if self.recorder.recording:
            self.recorder.stop(self.clock)
        for entry in self.scheduler.drain():
            source, ev = entry.payload
            self.clock = max(self.clock, ev.timestamp)
            self._emit_note(source, ev)
        for (source, pitch, channel), count in sorted(self._sounding.items()):
            for _ in range(count):
                self._emit_note(
                    source, NoteEvent(NOTE_OFF, pitch, 0, channel, timestamp=self.clock)
                )
        self.held.clear()
        self._refresh_leds()
        return self._drain()

    def snapshot(self) -> list[Message]:
        """Late-joiner hello: full state first, then every tube's color."""
        frames: list[Message] = [self._state_snapshot(self.clock)]
        frames.extend(LedChange(tube, color) for tube, color in enumerate(self._led))
        return frames

    def sounding_notes(self) -> Counter:
        """Multiset of currently sounding (source, pitch, channel) voices."""
        return Counter(self._sounding)

    # -- time -------------------------------------------------------------

    def _advance_to(self, now: int) -> None:
        now = max(now, self.clock)
        self._pull_streams(now)
        for entry in self.scheduler.advance(now):
            source, ev = entry.payload
            self._emit_note(source, ev)
        self.clock = now

    def _pull_streams(self, now: int) -> None:
        for source, stream in (
            (SOURCE_PLAYBACK, self._playback),
            (SOURCE_IMPROV, self._improv),
        ):
            if stream is None:
                continue
            while (due := stream.peek_due()) is not None and due <= now:
                ev = stream.pop()
                self.scheduler.schedule(ev.timestamp, (source, ev), tag=source)

    # -- output plumbing --------------------------------------------------

    def _drain(self) -> list[Message]:
        out, self._out = self._out, []
        return out

    def _error(self, code: str, detail: str) -> None:
        log.info("protocol error %s: %s", code, detail)
        self._out.append(ErrorMessage(code, detail))

    def _emit_note(self, source: str, ev: NoteEvent) -> None:
        key = (source, ev.pitch, ev.channel)
        if source != SOURCE_LIVE:
            if ev.kind == NOTE_ON:
                generated = sum(
                    n for (src, _, _), n in self._sounding.items() if src != SOURCE_LIVE
                )
                if generated >= self.config.voice_cap:
                    self._skipped_offs[key] += 1
                    return
            elif self._skipped_offs.get(key, 0) > 0:
                self._skipped_offs[key] -= 1
                return
        if ev.kind == NOTE_ON:
            self._sounding[key] += 1
        else:
            if self._sounding.get(key, 0) <= 0:
                log.warning("note-off without matching on: %s", ev)
            else:
                self._sounding[key] -= 1
                if self._sounding[key] == 0:
                    del self._sounding[key]
        self._out.append(ev)
        if source == SOURCE_LIVE and self.recorder.recording:
            overflow_take = self.recorder.capture(ev)
            if overflow_take is not None:
                self._error("RECORD_OVERFLOW", "take hit the event cap and was stored")
                self._emit_state(self.clock)

    def _schedule_note(self, source: str, ev: NoteEvent) -> int:
        return self.scheduler.schedule(ev.timestamp, (source, ev), tag=source)

    def _refresh_leds(self) -> None:
        if self.mode == MODE_CHORD:
            held_tubes = {tube for tube, _ in self.held}
            desired = prog_mod.led_state(self.cursor, held_tubes)
        else:
            held_tubes = {tube for tube, _ in self.held}
            desired = tuple(
                LedColor.BLUE if tube in held_tubes else LedColor.OFF for tube in range(7)
            )
        for tube, (old, new) in enumerate(zip(self._led, desired)):
            if old != new:
                self._out.append(LedChange(tube, new))
        self._led = desired

    def _state_snapshot(self, now: int) -> StateSnapshot:
        return StateSnapshot(
            data={
                "t": now,
                "mode": self.mode,
                "preset": self.preset.index,
                "label": self.preset.label,
                "root": self.preset.root,
                "scale": self.preset.scale.name,
                "progression": list(self.cursor.progression),
                "position": self.cursor.position,
                "bpm": self.quantize.bpm,
                "subdivision": self.quantize.subdivision.value,
                "patch": self.patch,
                "recording": self.recorder.recording,
                "has_recording": self.recorder.latest is not None,
                "playing": self.playing,
                "ai": self.ai_active,
            }
        )

    def _emit_state(self, now: int) -> None:
        self._out.append(self._state_snapshot(now))

    # -- touch handling ---------------------------------------------------

    def _touch(self, tube: int, area: int, kind: str, now: int) -> None:
        if kind == PRESS:
            if self.mode == MODE_CHORD:
                self._press_chord(tube, area, now)
            else:
                self._press_single(tube, area, now)
        else:
            self._release(tube, area, now)

    def _press_single(self, tube: int, area: int, now: int) -> None:
        if (tube, area) in self.held:
            self._error("PRESS_WHILE_HELD", f"tube {tube} area {area} already pressed")
            return
        try:
            pitch = map_touch(tube, area, self.mapping)
        except MappingRangeError as exc:
            self._error("MAPPING_RANGE", str(exc))
            return
        onset = quantize_onset(now, self.quantize)
        handle = self._schedule_note(
            SOURCE_LIVE,
            NoteEvent(NOTE_ON, pitch, LIVE_VELOCITY, LIVE_CHANNEL, timestamp=onset),
        )
        self.held[(tube, area)] = _HeldZone((pitch,), onset, now, (handle,))
        self._refresh_leds()

    def _press_chord(self, tube: int, area: int, now: int) -> None:
        if (tube, area) in self.held:
            self._error("PRESS_WHILE_HELD", f"tube {tube} area {area} already pressed")
            return
        if any(t == tube for t, _ in self.held):
            # One chord per tube: a second area on a held tube neither
            # retriggers nor advances, but its release must pair cleanly.
            self.held[(tube, area)] = _HeldZone((), now, now, ())
            return
        try:
            chord = diatonic_triad(tube, area, self.mapping)
        except MappingRangeError as exc:
            self._error("MAPPING_RANGE", str(exc))
            return
        if tube == prog_mod.expected_tube(self.cursor) and self._advance_stamp != now:
            self.cursor = prog_mod.advance_cursor(self.cursor)
            self._advance_stamp = now
        onset = quantize_onset(now, self.quantize)
        handles = tuple(
            self._schedule_note(
                SOURCE_LIVE,
                NoteEvent(NOTE_ON, pitch, LIVE_VELOCITY, LIVE_CHANNEL, timestamp=onset),
            )
            for pitch in chord.notes
        )
        self.held[(tube, area)] = _HeldZone(chord.notes, onset, now, handles)
        self._refresh_leds()

    def _release(self, tube: int, area: int, now: int) -> None:
        zone = self.held.pop((tube, area), None)
        if zone is None:
            self._error(
                "RELEASE_WITHOUT_PRESS", f"tube {tube} area {area} was not pressed"
            )
            return
        off_time = pair_release(zone.onset_scheduled, now, self.quantize)
        for pitch in zone.pitches:
            self._schedule_note(
                SOURCE_LIVE, NoteEvent(NOTE_OFF, pitch, 0, LIVE_CHANNEL, timestamp=off_time)
            )
        self._refresh_leds()

    def _release_all_held(self, now: int) -> None:
        """Silence every held zone right now (used on mode switches).

        Pending quantized onsets are cancelled outright; already sounding
        notes get immediate note-offs so they precede whatever comes next.
        """
        for zone in self.held.values():
            if zone.onset_scheduled > now:
                for handle in zone.on_handles:
                    self.scheduler.cancel(handle)
            else:
                for pitch in zone.pitches:
                    self._emit_note(
                        SOURCE_LIVE,
                        NoteEvent(NOTE_OFF, pitch, 0, LIVE_CHANNEL, timestamp=now),
                    )
        self.held.clear()

    # -- controller handling ------------------------------------------------

    def _control(self, control: str, value: float, now: int) -> None:
        if control == EMOTION_KNOB:
            self._set_preset(preset_for_knob(value, self.config.presets), now)
        elif control == QUANTIZE_KNOB:
            sub = subdivision_for_knob(value)
            if sub != self.quantize.subdivision:
                self.quantize = QuantizeConfig(self.quantize.bpm, sub)
                self._emit_state(now)
        elif control == SOUND_KNOB:
            patch = min(127, int(value * 128))
            if patch != self.patch:
                self.patch = patch
                self._emit_state(now)
        elif control == MODE_TOGGLE:
            self._release_all_held(now)
            self.mode = MODE_CHORD if self.mode == MODE_SINGLE else MODE_SINGLE
            self._advance_stamp = None
            self._refresh_leds()
            self._emit_state(now)
        elif control == RECORD_BUTTON:
            if self.recorder.recording:
                self.recorder.stop(now)
            else:
                self.recorder.start(now)
            self._emit_state(now)
        elif control == PLAY_BUTTON:
            if self.playing:
                self._stop_playback(now)
            elif self.recorder.latest is None:
                self._error("PLAY_NO_RECORDING", "record a take before playing back")
                return
            else:
                self._playback = _Pulled(playback_events(self.recorder.latest, now))
                self.playing = True
            self._emit_state(now)
        elif control == AI_BUTTON:
            if self.ai_active:
                self._stop_improv(now)
                self._emit_state(now)
                return
            if self.recorder.latest is None:
                self._error("AI_NO_RECORDING", "record a take before jamming")
                return
            try:
                model = improv_mod.train(
                    self.recorder.latest, self._improv_grid(), seed=self.seed
                )
            except improv_mod.EmptyRecording:
                self._error("AI_NO_RECORDING", "the stored take holds no notes")
                return
            start = quantize_onset(now, self.quantize)
            self._improv = _Pulled(
                improv_mod.improvise(model, start, self.rng, channel=IMPROV_CHANNEL)
            )
            self.ai_active = True
            self._emit_state(now)

    def _improv_grid(self) -> int:
        """Bucket resolution for training: the active grid, else a sixteenth."""
        grid = self.quantize.grid_ms()
        if grid is not None:
            return grid
        return max(1, round(60000.0 / self.quantize.bpm / 4))

    def _set_preset(self, preset, now: int) -> None:
        if preset.index == self.preset.index:
            return
        self.preset = preset
        self.mapping = default_mapping(preset.root, preset.scale)
        self.cursor = ProgressionCursor(preset.progression, 0)
        self._advance_stamp = None
        self._refresh_leds()
        self._emit_state(now)

    def _stop_playback(self, now: int) -> None:
        self.scheduler.cancel_tag(SOURCE_PLAYBACK)
        self._playback = None
        self.playing = False
        self._flush_source(SOURCE_PLAYBACK, now)

    def _stop_improv(self, now: int) -> None:
        self.scheduler.cancel_tag(SOURCE_IMPROV)
        self._improv = None
        self.ai_active = False
        self._flush_source(SOURCE_IMPROV, now)

    def _flush_source(self, source: str, now: int) -> None:
        """Immediate note-offs for everything the source still has sounding."""
        for (src, pitch, channel), count in sorted(self._sounding.items()):
            if src != source:
                continue
            for _ in range(count):
                self._emit_note(src, NoteEvent(NOTE_OFF, pitch, 0, channel, timestamp=now))
        for key in [k for k in self._skipped_offs if k[0] == source]:
            del self._skipped_offs[key]
