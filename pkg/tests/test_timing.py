"""Quantizer, release pairing, and scheduler ordering."""

import random

import pytest
from hypothesis import given, strategies as st

from tubeplay.timing import (
    QuantizeConfig,
    Scheduler,
    Subdivision,
    pair_release,
    quantize_onset,
    subdivision_for_knob,
)

GRID_SETTINGS = [s for s in Subdivision if s is not Subdivision.OFF]


def cfg(bpm=120.0, sub=Subdivision.EIGHTH):
    return QuantizeConfig(bpm=bpm, subdivision=sub)


class TestQuantizeConfig:
    def test_grid_at_120_bpm(self):
        assert cfg(120, Subdivision.QUARTER).grid_ms() == 500
        assert cfg(120, Subdivision.EIGHTH).grid_ms() == 250
        assert cfg(120, Subdivision.EIGHTH_TRIPLET).grid_ms() == round(500 / 3)
        assert cfg(120, Subdivision.SIXTEENTH).grid_ms() == 125

    def test_off_has_no_grid(self):
        assert cfg(120, Subdivision.OFF).grid_ms() is None

    def test_bpm_bounds(self):
        with pytest.raises(ValueError):
            QuantizeConfig(bpm=10)
        with pytest.raises(ValueError):
            QuantizeConfig(bpm=400)

    def test_knob_quartiles(self):
        assert subdivision_for_knob(0.0) is Subdivision.OFF
        assert subdivision_for_knob(0.24) is Subdivision.OFF
        assert subdivision_for_knob(0.25) is Subdivision.QUARTER
        assert subdivision_for_knob(0.5) is Subdivision.EIGHTH
        assert subdivision_for_knob(0.75) is Subdivision.SIXTEENTH
        assert subdivision_for_knob(1.0) is Subdivision.SIXTEENTH


class TestQuantizeOnset:
    def test_on_grid_stays(self):
        assert quantize_onset(0, cfg()) == 0
        assert quantize_onset(500, cfg()) == 500

    def test_rounds_up_to_next_grid(self):
        assert quantize_onset(260, cfg()) == 500

    def test_off_is_identity(self):
        c = cfg(sub=Subdivision.OFF)
        for t in (0, 1, 261, 99991):
            assert quantize_onset(t, c) == t

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            quantize_onset(-1, cfg())

    @given(
        t=st.integers(min_value=0, max_value=10**9),
        bpm=st.floats(min_value=20, max_value=300, allow_nan=False),
        sub=st.sampled_from(GRID_SETTINGS),
    )
    def test_properties(self, t, bpm, sub):
        c = QuantizeConfig(bpm=bpm, subdivision=sub)
        grid = c.grid_ms()
        out = quantize_onset(t, c)
        assert out >= t
        assert out - t < grid
        assert out % grid == 0
        assert quantize_onset(out, c) == out  # idempotent


class TestPairRelease:
    def test_release_after_onset_passes_through(self):
        assert pair_release(500, 900, cfg()) == 900

    def test_release_before_onset_gets_one_grid(self):
        assert pair_release(500, 490, cfg()) == 750

    def test_unquantized_floor_is_10ms(self):
        assert pair_release(100, 101, cfg(sub=Subdivision.OFF)) == 110

    def test_never_before_onset(self):
        rng = random.Random(7)
        for _ in range(500):
            onset = rng.randrange(0, 10_000)
            release = rng.randrange(0, 10_000)
            out = pair_release(onset, release, cfg())
            assert out > onset
            assert out >= release


class TestScheduler:
    def test_orders_by_due_time(self):
        s = Scheduler()
        s.schedule(100, "A")
        s.schedule(50, "B")
        assert [e.payload for e in s.advance(100)] == ["B", "A"]

    def test_ties_break_by_insertion(self):
        s = Scheduler()
        s.schedule(100, "first")
        s.schedule(100, "second")
        assert [e.payload for e in s.advance(100)] == ["first", "second"]

    def test_nothing_early(self):
        s = Scheduler()
        s.schedule(100, "A")
        s.schedule(50, "B")
        assert s.advance(40) == []
        assert [e.payload for e in s.advance(100)] == ["B", "A"]

    def test_cancel(self):
        s = Scheduler()
        handle = s.schedule(10, "A")
        s.schedule(20, "B", tag="loop")
        s.schedule(30, "C", tag="loop")
        assert s.cancel(handle)
        assert not s.cancel(handle)
        assert s.cancel_tag("loop") == 2
        assert s.advance(100) == []
        assert s.pending() == 0

    def test_exactly_once_in_order(self):
        rng = random.Random(42)
        s = Scheduler()
        expected = []
        for i in range(2000):
            due = rng.randrange(0, 5000)
            s.schedule(due, i)
            expected.append((due, i))
        got = []
        now = 0
        while s.pending():
            now += rng.randrange(1, 400)
            got.extend((e.due_time, e.payload) for e in s.advance(now))
        assert got == sorted(expected, key=lambda p: (p[0], p[1]))

    def test_past_events_flush_immediately(self):
        s = Scheduler()
        s.advance(1000)
        s.schedule(10, "late")
        assert [e.payload for e in s.advance(1000)] == ["late"]
