"""tubeplay: a real-time engine for a seven-tube touch instrument.

Seven tubes map to the degrees of a heptatonic scale, three touch areas per
tube pick the octave. A guided chord-progression mode lights the way, a
quantizer snaps onsets to the beat, a one-take recorder loops the player's
history, and a Markov improviser jams along with whatever was recorded.
The engine speaks a newline-delimited text protocol over sockets and can
replay any session log bit for bit.
"""

from .events import ControlEvent, NoteEvent, TouchEvent
from .harmony import (
    BUILTIN_SCALES,
    Chord,
    EmotionPreset,
    Mapping,
    ScaleSpec,
    build_scale,
    default_mapping,
    diatonic_triad,
    map_touch,
    preset_for_knob,
)
from .improviser import MarkovModel, MarkovSymbol, improvise, train
from .progression import LedColor, ProgressionCursor, expected_tube, on_chord_touch
from .recorder import Recorder, Recording, playback_events
from .timing import QuantizeConfig, Scheduler, Subdivision, pair_release, quantize_onset

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_SCALES",
    "Chord",
    "ControlEvent",
    "EmotionPreset",
    "LedColor",
    "Mapping",
    "MarkovModel",
    "MarkovSymbol",
    "NoteEvent",
    "ProgressionCursor",
    "QuantizeConfig",
    "Recorder",
    "Recording",
    "ScaleSpec",
    "Scheduler",
    "Subdivision",
    "TouchEvent",
    "build_scale",
    "default_mapping",
    "diatonic_triad",
    "expected_tube",
    "improvise",
    "map_touch",
    "on_chord_touch",
    "pair_release",
    "playback_events",
    "preset_for_knob",
    "quantize_onset",
    "train",
]
