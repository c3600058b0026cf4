"""Self-jamming: a first-order Markov chain trained on the stored take.

Each note-on becomes a (pitch, inter-onset bucket) symbol; transition counts
between consecutive symbols drive an endless stream the player can jam
against. Dead ends restart uniformly so the stream never halts, and a fixed
seed makes every run bit-identical.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator

from .events import NOTE_ON, NOTE_OFF, NoteEvent
from .recorder import Recording

# Fraction of each step the generated note actually sounds.
GATE = 0.8


class EmptyRecording(Exception):
    """Training needs at least one note-on in the take."""


@dataclass(frozen=True, order=True)
class MarkovSymbol:
    """A note-on reduced to pitch plus its grid-bucketed gap to the next onset."""

    pitch: int
    ioi_bucket: int

    def __post_init__(self) -> None:
        if not 0 <= self.pitch <= 127:
            raise ValueError(f"pitch must be in 0..127, got {self.pitch}")
        if self.ioi_bucket < 1:
            raise ValueError(f"ioi_bucket must be >= 1, got {self.ioi_bucket}")


@dataclass
class MarkovModel:
    """Transition counts over observed symbols, plus playback bookkeeping."""

    states: tuple[MarkovSymbol, ...]
    transitions: dict[MarkovSymbol, dict[MarkovSymbol, int]]
    initial: MarkovSymbol
    grid_ms: int
    velocity: int
    rng_seed: int = 0

    def validate(self) -> None:
        members = set(self.states)
        if not members:
            raise ValueError("model has no states")
        if self.initial not in members:
            raise ValueError("initial symbol not among states")
        for src, outs in self.transitions.items():
            if src not in members:
                raise ValueError(f"transition source {src} not among states")
            for dst, count in outs.items():
                if dst not in members:
                    raise ValueError(f"transition target {dst} not among states")
                if count < 1:
                    raise ValueError(f"transition count must be >= 1, got {count}")


def _half_up(x: float) -> int:
    return int(x + 0.5)


def train(recording: Recording, grid_ms: int, seed: int = 0) -> MarkovModel:
    """Build the chain from the take's note-ons.

    A symbol's bucket is its gap to the following onset, rounded to grid
    units (minimum one). The final onset has no following gap; it inherits
    the previous bucket so the learned feel carries through.
    """
    if grid_ms < 1:
        raise ValueError(f"grid_ms must be >= 1, got {grid_ms}")
    onsets = [ev for ev in recording.events if ev.kind == NOTE_ON]
    if not onsets:
        raise EmptyRecording("recording holds no note-ons")

    buckets: list[int] = []
    for i in range(len(onsets) - 1):
        gap = onsets[i + 1].timestamp - onsets[i].timestamp
        buckets.append(max(1, _half_up(gap / grid_ms)))
    buckets.append(buckets[-1] if buckets else 1)

    symbols = [MarkovSymbol(ev.pitch, b) for ev, b in zip(onsets, buckets)]
    transitions: dict[MarkovSymbol, dict[MarkovSymbol, int]] = {}
    for src, dst in zip(symbols, symbols[1:]):
        outs = transitions.setdefault(src, {})
        outs[dst] = outs.get(dst, 0) + 1

    velocity = min(127, max(1, _half_up(sum(ev.velocity for ev in onsets) / len(onsets))))
    model = MarkovModel(
        states=tuple(sorted(set(symbols))),
        transitions={src: dict(sorted(outs.items())) for src, outs in sorted(transitions.items())},
        initial=symbols[0],
        grid_ms=grid_ms,
        velocity=velocity,
        rng_seed=seed,
    )
    model.validate()
    return model


def next_symbol(model: MarkovModel, current: MarkovSymbol, rng: random.Random) -> MarkovSymbol:
    """Sample the next symbol proportional to the outgoing counts.

    A symbol with no outgoing transitions restarts the stream with a uniform
    pick over all states, keeping the improvisation endless.
    """
    outs = model.transitions.get(current)
    if not outs:
        return model.states[rng.randrange(len(model.states))]
    total = sum(outs.values())
    pick = rng.randrange(total)
    for symbol, count in outs.items():
        pick -= count
        if pick < 0:
            return symbol
    raise AssertionError("unreachable: counts exhausted")


def improvise(
    model: MarkovModel,
    start_time: int,
    rng: random.Random,
    channel: int = 1,
) -> Iterator[NoteEvent]:
    """Endless stream of note on/off pairs walking the chain from its start.

    Each step lasts ioi_bucket * grid_ms; the note gates off after 80% of
    the step. The caller owns stopping (and flushing any sounding note).
    """
    t = start_time
    symbol = model.initial
    while True:
        step = symbol.ioi_bucket * model.grid_ms
        gate = max(1, _half_up(step * GATE))
        yield NoteEvent(NOTE_ON, symbol.pitch, model.velocity, channel, timestamp=t)
        yield NoteEvent(NOTE_OFF, symbol.pitch, 0, channel, timestamp=t + gate)
        t += step
        symbol = next_symbol(model, symbol, rng)


def dump_model(model: MarkovModel) -> str:
    """Human-readable text form: states and counts, stable across runs."""
    lines = [
        "markov-model v1",
        f"seed {model.rng_seed}",
        f"grid {model.grid_ms}",
        f"velocity {model.velocity}",
        f"initial {model.initial.pitch} {model.initial.ioi_bucket}",
    ]
    for state in model.states:
        lines.append(f"state {state.pitch} {state.ioi_bucket}")
    for src in sorted(model.transitions):
        for dst, count in sorted(model.transitions[src].items()):
            lines.append(
                f"trans {src.pitch} {src.ioi_bucket} {dst.pitch} {dst.ioi_bucket} {count}"
            )
    return "\n".join(lines) + "\n"


def load_model(text: str) -> MarkovModel:
    """Inverse of dump_model; validates the result."""
    seed = grid = velocity = None
    initial = None
    states: list[MarkovSymbol] = []
    transitions: dict[MarkovSymbol, dict[MarkovSymbol, int]] = {}
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "markov-model v1":
        raise ValueError("not a markov-model v1 dump")
    for ln in lines[1:]:
        fields = ln.split()
        kind = fields[0]
        if kind == "seed":
            seed = int(fields[1])
        elif kind == "grid":
            grid = int(fields[1])
        elif kind == "velocity":
            velocity = int(fields[1])
        elif kind == "initial":
            initial = MarkovSymbol(int(fields[1]), int(fields[2]))
        elif kind == "state":
            states.append(MarkovSymbol(int(fields[1]), int(fields[2])))
        elif kind == "trans":
            src = MarkovSymbol(int(fields[1]), int(fields[2]))
            dst = MarkovSymbol(int(fields[3]), int(fields[4]))
            transitions.setdefault(src, {})[dst] = int(fields[5])
        else:
            raise ValueError(f"unknown line kind {kind!r}")
    if None in (seed, grid, velocity) or initial is None:
        raise ValueError("model dump missing header fields")
    model = MarkovModel(
        states=tuple(sorted(states)),
        transitions={src: dict(sorted(outs.items())) for src, outs in sorted(transitions.items())},
        initial=initial,
        grid_ms=grid,
        velocity=velocity,
        rng_seed=seed,
    )
    model.validate()
    return model
