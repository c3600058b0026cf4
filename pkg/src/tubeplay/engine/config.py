"""Engine configuration: key/value settings plus the preset table.

The config is a plain INI file. A default setup ships inside the package
and is used whenever no file is given; see data/default_config.ini for the
format by example.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

from ..harmony import (
    BUILTIN_SCALES,
    EmotionPreset,
    ScaleSpec,
    validate_preset_table,
)
from ..timing import Subdivision

NOTE_NAMES = {
    "C": 0, "B#": 0,
    "C#": 1, "DB": 1,
    "D": 2,
    "D#": 3, "EB": 3,
    "E": 4, "FB": 4,
    "F": 5, "E#": 5,
    "F#": 6, "GB": 6,
    "G": 7,
    "G#": 8, "AB": 8,
    "A": 9,
    "A#": 10, "BB": 10,
    "B": 11, "CB": 11,
}


class ConfigError(Exception):
    """The config file is missing something or holds an invalid value."""


@dataclass(frozen=True)
class EngineConfig:
    bpm: float = 100.0
    seed: int = 1
    port: int = 8765
    patch: int = 0
    subdivision: Subdivision = Subdivision.OFF
    voice_cap: int = 32  # concurrent playback+improviser voices
    presets: tuple[EmotionPreset, ...] = ()
    scales: dict[str, ScaleSpec] = field(default_factory=dict)


def parse_root(token: str) -> int:
    token = token.strip()
    if token.upper() in NOTE_NAMES:
        return NOTE_NAMES[token.upper()]
    try:
        value = int(token)
    except ValueError:
        raise ConfigError(f"unknown root note {token!r}") from None
    if not 0 <= value <= 11:
        raise ConfigError(f"root pitch class must be in 0..11, got {value}")
    return value


def _csv_ints(raw: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok.strip()) for tok in raw.split(",") if tok.strip())
    except ValueError:
        raise ConfigError(f"{what} must be comma-separated integers: {raw!r}") from None


def presets_digest(presets: Sequence[EmotionPreset]) -> str:
    """Stable fingerprint of the preset table, recorded in session logs."""
    h = hashlib.sha256()
    for p in presets:
        line = (
            f"{p.index}|{p.label}|{p.root}|{p.scale.name}|"
            f"{','.join(map(str, p.scale.intervals))}|{','.join(map(str, p.progression))}\n"
        )
        h.update(line.encode("utf-8"))
    return h.hexdigest()


def default_config_text() -> str:
    return (
        resources.files("tubeplay").joinpath("data/default_config.ini").read_text("utf-8")
    )


def load_config(path: Optional[Union[str, Path]] = None) -> EngineConfig:
    """Load a config file, or the packaged default when path is None."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    if path is None:
        parser.read_string(default_config_text())
    else:
        text = Path(path).read_text("utf-8")
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse config {path}: {exc}") from None

    scales = dict(BUILTIN_SCALES)
    for section in parser.sections():
        if not section.startswith("scale:"):
            continue
        name = section[len("scale:"):].strip()
        intervals = _csv_ints(parser.get(section, "intervals", fallback=""), f"scale {name}")
        try:
            scales[name] = ScaleSpec(name, intervals)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    presets: list[EmotionPreset] = []
    for section in parser.sections():
        if not section.startswith("preset:"):
            continue
        try:
            index = int(section[len("preset:"):].strip())
        except ValueError:
            raise ConfigError(f"bad preset section name [{section}]") from None
        label = parser.get(section, "label", fallback=f"preset {index}")
        root = parse_root(parser.get(section, "root", fallback="C"))
        scale_name = parser.get(section, "scale", fallback="ionian").strip()
        if scale_name not in scales:
            raise ConfigError(f"preset {index} uses unknown scale {scale_name!r}")
        degrees = _csv_ints(
            parser.get(section, "progression", fallback=""), f"preset {index} progression"
        )
        try:
            presets.append(EmotionPreset(index, label, root, scales[scale_name], degrees))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    presets.sort(key=lambda p: p.index)
    try:
        validate_preset_table(presets)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    engine = parser["engine"] if parser.has_section("engine") else {}
    try:
        bpm = float(engine.get("bpm", 100))
        seed = int(engine.get("seed", 1))
        port = int(engine.get("port", 8765))
        patch = int(engine.get("patch", 0))
        voice_cap = int(engine.get("voice_cap", 32))
        subdivision = Subdivision.from_token(str(engine.get("subdivision", "off")).strip())
    except ValueError as exc:
        raise ConfigError(f"bad [engine] value: {exc}") from None
    if not 20 <= bpm <= 300:
        raise ConfigError(f"bpm must be in 20..300, got {bpm}")
    if not 0 <= patch <= 127:
        raise ConfigError(f"patch must be in 0..127, got {patch}")
    if voice_cap < 1:
        raise ConfigError(f"voice_cap must be >= 1, got {voice_cap}")

    return EngineConfig(
        bpm=bpm,
        seed=seed,
        port=port,
        patch=patch,
        voice_cap=voice_cap,
        subdivision=subdivision,
        presets=tuple(presets),
        scales=scales,
    )
