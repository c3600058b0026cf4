"""Scales, the tube/area-to-pitch mapping, diatonic triads, and mood presets.

The playing surface is seven tubes, each with three touch areas. Tubes
follow the degrees of a heptatonic scale from left to right; the areas
select the octave (0 = bottom, 1 = middle, 2 = upper, one octave apart).
Everything in this module is a pure function over immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

NUM_TUBES = 7
NUM_AREAS = 3
OCTAVE = 12
MIDI_MAX = 127

# Bottom area of tube 0 always sits in this MIDI octave, so every root keeps
# all 21 zones plus triads comfortably inside the MIDI range.
BASE_OCTAVE_START = 48


class MappingRangeError(Exception):
    """A mapped pitch fell outside the MIDI range (misconfigured base note)."""


def _check_pitch_class(value: int, what: str = "pitch class") -> int:
    if not 0 <= value <= 11:
        raise ValueError(f"{what} must be in 0..11, got {value}")
    return value


def _check_midi(value: int, what: str = "MIDI note") -> int:
    if not 0 <= value <= MIDI_MAX:
        raise ValueError(f"{what} must be in 0..127, got {value}")
    return value


@dataclass(frozen=True)
class ScaleSpec:
    """A heptatonic scale: seven semitone steps that sum to one octave."""

    name: str
    intervals: tuple[int, ...]

    def __post_init__(self) -> None:
        intervals = tuple(int(i) for i in self.intervals)
        object.__setattr__(self, "intervals", intervals)
        if len(intervals) != NUM_TUBES:
            raise ValueError(f"scale {self.name!r} needs exactly 7 intervals")
        if any(step < 1 for step in intervals):
            raise ValueError(f"scale {self.name!r} has a non-positive interval")
        if sum(intervals) != OCTAVE:
            raise ValueError(f"scale {self.name!r} intervals must sum to 12")


# The seven diatonic modes plus the two common altered minors.
BUILTIN_SCALES: dict[str, ScaleSpec] = {
    spec.name: spec
    for spec in (
        ScaleSpec("ionian", (2, 2, 1, 2, 2, 2, 1)),
        ScaleSpec("dorian", (2, 1, 2, 2, 2, 1, 2)),
        ScaleSpec("phrygian", (1, 2, 2, 2, 1, 2, 2)),
        ScaleSpec("lydian", (2, 2, 2, 1, 2, 2, 1)),
        ScaleSpec("mixolydian", (2, 2, 1, 2, 2, 1, 2)),
        ScaleSpec("aeolian", (2, 1, 2, 2, 1, 2, 2)),
        ScaleSpec("locrian", (1, 2, 2, 1, 2, 2, 2)),
        ScaleSpec("harmonic_minor", (2, 1, 2, 2, 1, 3, 1)),
        ScaleSpec("melodic_minor", (2, 1, 2, 2, 2, 2, 1)),
    )
}


@dataclass(frozen=True)
class Mapping:
    """Assignment of the 21 touch zones to pitches.

    ``base_midi`` is the pitch of tube 0's bottom area and must share the
    root's pitch class. The headroom check (base + 36 <= 127) keeps every
    zone and chord voicing inside the MIDI range.
    """

    root: int
    scale: ScaleSpec
    base_midi: int

    def __post_init__(self) -> None:
        _check_pitch_class(self.root, "root")
        _check_midi(self.base_midi, "base_midi")
        if self.base_midi % OCTAVE != self.root:
            raise ValueError(
                f"base_midi {self.base_midi} is not in root pitch class {self.root}"
            )
        if self.base_midi + 2 * OCTAVE + OCTAVE > MIDI_MAX:
            raise ValueError(f"base_midi {self.base_midi} leaves no octave headroom")

    def degree_offsets(self) -> tuple[int, ...]:
        """Semitone offset of each tube above ``base_midi`` (area 0)."""
        offsets = [0]
        for step in self.scale.intervals[:-1]:
            offsets.append(offsets[-1] + step)
        return tuple(offsets)


def default_mapping(root: int, scale: ScaleSpec) -> Mapping:
    """Mapping with the root voiced in the MIDI 48..59 octave."""
    _check_pitch_class(root, "root")
    return Mapping(root=root, scale=scale, base_midi=BASE_OCTAVE_START + root)


@dataclass(frozen=True)
class Chord:
    """A stacked-thirds triad on a scale degree, voiced low to high."""

    degree: int
    notes: tuple[int, int, int]

    def __post_init__(self) -> None:
        if not 0 <= self.degree <= 6:
            raise ValueError(f"degree must be in 0..6, got {self.degree}")
        for note in self.notes:
            _check_midi(note, "chord note")
        if not (self.notes[0] < self.notes[1] < self.notes[2]):
            raise ValueError(f"chord notes must strictly ascend, got {self.notes}")


def build_scale(root: int, scale: ScaleSpec) -> list[int]:
    """Pitch classes of the seven degrees, starting at the root.

    Degree i is the root plus the first i interval steps, mod 12. The
    seventh interval only closes the octave so it never starts a degree.
    """
    _check_pitch_class(root, "root")
    classes = [root]
    for step in scale.intervals[:-1]:
        classes.append((classes[-1] + step) % OCTAVE)
    return classes


def map_touch(tube: int, area: int, mapping: Mapping) -> int:
    """MIDI pitch sounded by touching ``tube`` in ``area``."""
    if not 0 <= tube < NUM_TUBES:
        raise ValueError(f"tube must be in 0..6, got {tube}")
    if not 0 <= area < NUM_AREAS:
        raise ValueError(f"area must be in 0..2, got {area}")
    note = mapping.base_midi + mapping.degree_offsets()[tube] + OCTAVE * area
    if note > MIDI_MAX:
        raise MappingRangeError(
            f"tube {tube} area {area} maps to {note}, beyond MIDI range"
        )
    return note


def diatonic_triad(degree: int, area: int, mapping: Mapping) -> Chord:
    """Triad on ``degree`` built from the scale degrees d, d+2, d+4.

    Voiced closed and root-position: the touched zone's pitch is the bass,
    with the third and fifth stacked in the nearest positions above it.
    """
    classes = build_scale(mapping.root, mapping.scale)
    base = map_touch(degree, area, mapping)
    third = base + (classes[(degree + 2) % 7] - classes[degree]) % OCTAVE
    fifth = base + (classes[(degree + 4) % 7] - classes[degree]) % OCTAVE
    if fifth > MIDI_MAX:
        raise MappingRangeError(
            f"triad on degree {degree} area {area} tops out at {fifth}"
        )
    return Chord(degree=degree, notes=(base, third, fifth))


@dataclass(frozen=True)
class EmotionPreset:
    """A mood: scale plus root plus the chord progression to guide through."""

    index: int
    label: str
    root: int
    scale: ScaleSpec
    progression: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError(f"preset index must be >= 0, got {self.index}")
        _check_pitch_class(self.root, "preset root")
        progression = tuple(int(d) for d in self.progression)
        object.__setattr__(self, "progression", progression)
        if len(progression) < 2:
            raise ValueError(f"preset {self.label!r} progression needs >= 2 degrees")
        if any(not 0 <= d <= 6 for d in progression):
            raise ValueError(f"preset {self.label!r} progression degree out of 0..6")


def validate_preset_table(table: Sequence[EmotionPreset]) -> None:
    """Preset tables need at least 4 entries indexed contiguously from 0."""
    if len(table) < 4:
        raise ValueError(f"preset table needs >= 4 entries, got {len(table)}")
    for slot, preset in enumerate(table):
        if preset.index != slot:
            raise ValueError(
                f"preset indices must be contiguous from 0; slot {slot} holds "
                f"index {preset.index}"
            )


def preset_for_knob(position: float, table: Sequence[EmotionPreset]) -> EmotionPreset:
    """Preset selected by a normalized knob position.

    The knob travel is divided evenly: entry floor(position * len), with
    position 1.0 clamped onto the last entry.
    """
    if not table:
        raise ValueError("preset table is empty")
    position = min(1.0, max(0.0, position))
    return table[min(len(table) - 1, int(position * len(table)))]
