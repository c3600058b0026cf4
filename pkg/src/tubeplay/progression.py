"""Guided chord progression: the cursor over scale degrees and tube lights.

The next tube to touch glows pink; a held tube glows blue. Touching the
expected tube advances the cursor (wrapping), touching any other tube still
sounds its own chord but leaves the cursor alone. The guidance helps, it
never enforces.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import FrozenSet, Iterable

from .harmony import Chord, Mapping, NUM_TUBES, diatonic_triad


class LedColor(str, Enum):
    OFF = "off"
    BLUE = "blue"
    PINK = "pink"


LedState = tuple  # 7 LedColor entries, index = tube


class ReleaseWithoutPress(Exception):
    """A release arrived for a tube that is not held (protocol hiccup)."""


@dataclass(frozen=True)
class ProgressionCursor:
    """Position inside the active preset's ordered scale degrees."""

    progression: tuple[int, ...]
    position: int = 0

    def __post_init__(self) -> None:
        progression = tuple(int(d) for d in self.progression)
        object.__setattr__(self, "progression", progression)
        if not progression:
            raise ValueError("progression must not be empty")
        if any(not 0 <= d <= 6 for d in progression):
            raise ValueError(f"progression degrees must be in 0..6: {progression}")
        if not 0 <= self.position < len(progression):
            raise ValueError(
                f"position {self.position} out of range for {len(progression)} degrees"
            )


def expected_tube(cursor: ProgressionCursor) -> int:
    """The tube the pink light is inviting the player to touch."""
    return cursor.progression[cursor.position]


def advance_cursor(cursor: ProgressionCursor) -> ProgressionCursor:
    return replace(cursor, position=(cursor.position + 1) % len(cursor.progression))


def led_state(cursor: ProgressionCursor, held: Iterable[int] = ()) -> LedState:
    """Colors for all seven tubes: held tubes blue, the expected tube pink.

    A held tube stays blue even when it is also the expected one; the pink
    cue reappears once it is released.
    """
    held = frozenset(held)
    colors = [LedColor.OFF] * NUM_TUBES
    target = expected_tube(cursor)
    if target not in held:
        colors[target] = LedColor.PINK
    for tube in held:
        colors[tube] = LedColor.BLUE
    return tuple(colors)


def on_chord_touch(
    cursor: ProgressionCursor,
    tube: int,
    area: int,
    mapping: Mapping,
    held: FrozenSet[int] = frozenset(),
) -> tuple[Chord, ProgressionCursor, LedState]:
    """Sound the touched tube's triad and advance the cursor if it was guided.

    Every touch sounds its own diatonic triad regardless of guidance; only a
    touch on the expected tube moves the progression forward.
    """
    chord = diatonic_triad(tube, area, mapping)
    if tube == expected_tube(cursor):
        cursor = advance_cursor(cursor)
    return chord, cursor, led_state(cursor, held | {tube})


def on_chord_release(
    cursor: ProgressionCursor,
    tube: int,
    held: FrozenSet[int],
) -> LedState:
    """Clear the tube's blue light; the pink indicator is unaffected."""
    if tube not in held:
        raise ReleaseWithoutPress(f"tube {tube} released but never pressed")
    return led_state(cursor, held - {tube})
