"""Standard MIDI file writer: VLQ encoding and full write/read round trips."""

import random

import pytest

from tubeplay.events import NOTE_OFF, NOTE_ON, NoteEvent
from tubeplay.engine.midifile import (
    DIVISION,
    decode_vlq,
    encode_vlq,
    ms_to_ticks,
    read_midi_file,
    write_midi_file,
)


class TestVlq:
    def test_known_values(self):
        # reference pairs from the SMF spec
        assert encode_vlq(0x00) == b"\x00"
        assert encode_vlq(0x40) == b"\x40"
        assert encode_vlq(0x7F) == b"\x7f"
        assert encode_vlq(0x80) == b"\x81\x00"
        assert encode_vlq(0x2000) == b"\xc0\x00"
        assert encode_vlq(0x1FFFFF) == b"\xff\xff\x7f"
        assert encode_vlq(0x0FFFFFFF) == b"\xff\xff\xff\x7f"

    def test_round_trip(self):
        rng = random.Random(8)
        for _ in range(500):
            value = rng.randrange(0, 1 << 28)
            data = encode_vlq(value)
            back, pos = decode_vlq(data, 0)
            assert back == value
            assert pos == len(data)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            encode_vlq(-1)


class TestTickConversion:
    def test_120_bpm(self):
        # 120 bpm: one beat = 500 ms = 480 ticks
        assert ms_to_ticks(500, 120) == DIVISION
        assert ms_to_ticks(250, 120) == DIVISION // 2

    def test_100_bpm(self):
        assert ms_to_ticks(600, 100) == DIVISION


class TestFileRoundTrip:
    def test_simple_bounce(self, tmp_path):
        notes = [
            NoteEvent(NOTE_ON, 60, 100, 0, timestamp=0),
            NoteEvent(NOTE_OFF, 60, 0, 0, timestamp=500),
            NoteEvent(NOTE_ON, 64, 90, 1, timestamp=500),
            NoteEvent(NOTE_OFF, 64, 0, 1, timestamp=1500),
        ]
        path = tmp_path / "take.mid"
        write_midi_file(path, notes, bpm=120, initial_patch=5)
        back = read_midi_file(path)
        assert back["format"] == 0
        assert back["division"] == DIVISION
        assert back["tempo"] == 500000  # 120 bpm in us/beat
        assert back["programs"][0] == (0, 5)
        assert back["notes"] == [
            (0, "on", 60, 100, 0),
            (480, "off", 60, 0, 0),
            (480, "on", 64, 90, 1),
            (1440, "off", 64, 0, 1),
        ]

    def test_patch_changes_in_order(self, tmp_path):
        notes = [
            NoteEvent(NOTE_ON, 60, 100, 0, timestamp=100),
            NoteEvent(NOTE_OFF, 60, 0, 0, timestamp=200),
        ]
        path = tmp_path / "patches.mid"
        write_midi_file(path, notes, bpm=120, initial_patch=0, patch_changes=[(150, 7)])
        back = read_midi_file(path)
        assert back["programs"] == [(0, 0), (ms_to_ticks(150, 120), 7)]

    def test_random_streams_round_trip(self, tmp_path):
        rng = random.Random(21)
        for trial in range(5):
            notes = []
            t = 0
            sounding = []
            for _ in range(100):
                t += rng.randrange(0, 120)
                if sounding and rng.random() < 0.45:
                    pitch, ch = sounding.pop(rng.randrange(len(sounding)))
                    notes.append(NoteEvent(NOTE_OFF, pitch, 0, ch, timestamp=t))
                else:
                    pitch, ch = rng.randrange(0, 128), rng.randrange(0, 16)
                    notes.append(NoteEvent(NOTE_ON, pitch, rng.randrange(1, 128), ch, timestamp=t))
                    sounding.append((pitch, ch))
            for pitch, ch in sounding:
                notes.append(NoteEvent(NOTE_OFF, pitch, 0, ch, timestamp=t + 10))
            path = tmp_path / f"random{trial}.mid"
            write_midi_file(path, notes, bpm=100)
            back = read_midi_file(path)
            assert len(back["notes"]) == len(notes)
            for ev, (tick, kind, pitch, vel, ch) in zip(notes, back["notes"]):
                assert tick == ms_to_ticks(ev.timestamp, 100)
                assert kind == ev.kind
                assert pitch == ev.pitch
                assert vel == ev.velocity
                assert ch == ev.channel
