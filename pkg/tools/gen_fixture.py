#!/usr/bin/env python3
"""Generate the bundled deterministic-session fixture log.

Produces a valid 200+ input session covering both play modes, all knobs and
buttons, recording, looped playback, and the improviser. Rerunning always
writes identical bytes; the output is committed at
tests/fixtures/session_200.log.
"""

import random
from pathlib import Path

from tubeplay.engine.config import load_config, presets_digest
from tubeplay.engine.sessionlog import header_lines

SEED = 42


def main() -> None:
    config = load_config()
    rng = random.Random(SEED)
    lines: list[str] = []
    t = 0
    held: set[tuple[int, int]] = set()

    def emit(frame: str) -> None:
        lines.append(f"{t} {frame}")

    def press() -> None:
        zone = (rng.randrange(7), rng.randrange(3))
        if zone not in held:
            held.add(zone)
            emit(f"T {zone[0]} {zone[1]} P {t}")

    def release() -> None:
        if held:
            zone = sorted(held)[rng.randrange(len(held))]
            held.discard(zone)
            emit(f"T {zone[0]} {zone[1]} R {t}")

    def release_all() -> None:
        nonlocal t
        for zone in sorted(held):
            t += rng.randrange(5, 40)
            emit(f"T {zone[0]} {zone[1]} R {t}")
        held.clear()

    # phase 1: free single-note play with knob moves
    for _ in range(80):
        t += rng.randrange(10, 120)
        roll = rng.random()
        if roll < 0.5:
            press()
        elif roll < 0.85:
            release()
        else:
            emit(f"K {rng.choice(['emotion', 'quant', 'sound'])} {rng.random():.4f}")
    release_all()

    # phase 2: record a take of quantized playing
    t += 50
    emit("K quant 0.6")
    t += 50
    emit("B rec P")
    for _ in range(45):
        t += rng.randrange(40, 200)
        if rng.random() < 0.55:
            press()
        else:
            release()
    release_all()
    t += 100
    emit("B rec P")

    # phase 3: loop the take and jam over it in chord mode
    t += 60
    emit("B play P")
    t += 40
    emit("B ai P")
    t += 40
    emit("B mode P")
    for _ in range(80):
        t += rng.randrange(30, 150)
        roll = rng.random()
        if roll < 0.5:
            press()
        elif roll < 0.9:
            release()
        else:
            emit(f"K emotion {rng.random():.4f}")
    release_all()

    # phase 4: wind down - stop generators, a last flourish, silence
    t += 80
    emit("B ai P")
    t += 80
    emit("B play P")
    t += 40
    emit("B mode P")
    for _ in range(45):
        t += rng.randrange(20, 90)
        if rng.random() < 0.5:
            press()
        else:
            release()
    release_all()

    header = header_lines(SEED, config.bpm, presets_digest(config.presets))
    out = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "session_200.log"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(header + lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} input lines to {out}")


if __name__ == "__main__":
    main()
