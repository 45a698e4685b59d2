"""Segmenter behaviour: timeout policies, terminators, token conservation."""

import random

import pytest

from voiceshim.segmenter import (
    Discarded,
    NonMonotonicTimestampError,
    SegmenterConfig,
    SegmenterMode,
    UtteranceComplete,
    flush,
    new_segmenter,
    push_token,
    tick,
)


def drive(config, stream, final_tick=None):
    """Push (token, at) pairs; returns all emitted events."""
    state = new_segmenter(config)
    events = []
    for token, at in stream:
        state, evs = push_token(state, token, at)
        events.extend(evs)
    if final_tick is not None:
        state, evs = tick(state, final_tick)
        events.extend(evs)
    return state, events


class TestShim:
    def test_pause_after_completion_submits(self):
        _, events = drive(SegmenterConfig.shim(), [("select", 0), ("apple", 500)],
                          final_tick=5000)
        assert events == [UtteranceComplete(("select", "apple"), 5000)]

    def test_long_gap_submits_then_continues(self):
        state, events = drive(SegmenterConfig.shim(), [("insert", 0), ("law", 3200)])
        assert events == [UtteranceComplete(("insert",), 3200)]
        assert [t for t, _ in state.pending] == ["law"]

    def test_never_discards(self):
        rng = random.Random(7)
        t = 0
        state = new_segmenter(SegmenterConfig.shim())
        for i in range(200):
            t += rng.randint(0, 8000)
            state, evs = push_token(state, f"w{i}", t)
            assert not any(isinstance(e, Discarded) for e in evs)


class TestLegacy:
    def test_mid_stream_gap_discards(self):
        state, events = drive(SegmenterConfig.legacy(), [("insert", 0), ("word", 2500)])
        assert events == [Discarded(("insert",), 2500)]
        assert [t for t, _ in state.pending] == ["word"]

    def test_tick_discards_partial(self):
        state = new_segmenter(SegmenterConfig.legacy())
        state, _ = push_token(state, "insert", 0)
        state, _ = push_token(state, "law", 400)
        state, events = tick(state, 2000)
        assert events == [Discarded(("insert", "law"), 2000)]
        assert state.pending == ()

    def test_gap_equal_to_window_is_kept(self):
        _, events = drive(SegmenterConfig.legacy(), [("select", 0), ("apple", 1500)])
        assert events == []

    def test_empty_pending_tick_is_silent(self):
        state = new_segmenter(SegmenterConfig.legacy())
        state, events = tick(state, 99999)
        assert events == []


class TestTerminators:
    def test_terminator_completes_excluding_itself(self):
        config = SegmenterConfig.shim(terminators=frozenset({"over"}))
        _, events = drive(config, [("delete", 0), ("that", 400), ("over", 900)])
        assert events == [UtteranceComplete(("delete", "that"), 900)]

    def test_terminator_with_nothing_pending(self):
        config = SegmenterConfig.legacy(terminators=frozenset({"over"}))
        _, events = drive(config, [("over", 100)])
        assert events == []

    def test_multi_word_terminator_rejected(self):
        with pytest.raises(ValueError):
            SegmenterConfig.shim(terminators=frozenset({"all done"}))


class TestContracts:
    def test_non_monotonic_push(self):
        state = new_segmenter(SegmenterConfig.shim())
        state, _ = push_token(state, "a", 100)
        with pytest.raises(NonMonotonicTimestampError):
            push_token(state, "b", 50)

    def test_non_monotonic_tick(self):
        state = new_segmenter(SegmenterConfig.shim())
        state, _ = push_token(state, "a", 100)
        with pytest.raises(NonMonotonicTimestampError):
            tick(state, 50)

    def test_window_must_be_positive(self):
        with pytest.raises(ValueError):
            SegmenterConfig(SegmenterMode.SHIM, 0)

    def test_flush_submits_in_both_modes(self):
        for config in (SegmenterConfig.legacy(), SegmenterConfig.shim()):
            state = new_segmenter(config)
            state, _ = push_token(state, "select", 0)
            state, _ = push_token(state, "apple", 300)
            state, events = flush(state)
            assert events == [UtteranceComplete(("select", "apple"), 300)]


def _random_stream(rng, max_gap=4000):
    t = 0
    stream = []
    for i in range(rng.randint(1, 12)):
        t += rng.randint(0, max_gap)
        stream.append((f"w{i}", t))
    return stream


class TestProperties:
    N = 2000  # the full 10k-run lives in the acceptance suite

    def test_no_token_lost_or_duplicated(self):
        rng = random.Random(42)
        for _ in range(self.N):
            stream = _random_stream(rng)
            for config in (SegmenterConfig.legacy(), SegmenterConfig.shim()):
                state, events = drive(config, stream)
                state, evs = flush(state, stream[-1][1])
                events.extend(evs)
                emitted = [tok for e in events for tok in e.tokens]
                assert emitted == [tok for tok, _ in stream]

    def test_legacy_discards_iff_gap_exceeds_window(self):
        rng = random.Random(43)
        window = 1500
        for _ in range(self.N):
            stream = _random_stream(rng)
            gaps = [b - a for (_, a), (_, b) in zip(stream, stream[1:])]
            state, events = drive(SegmenterConfig.legacy(window_ms=window), stream)
            has_discard = any(isinstance(e, Discarded) for e in events)
            assert has_discard == any(g > window for g in gaps)

    def test_identical_payloads_when_gaps_small_and_terminated(self):
        rng = random.Random(44)
        for _ in range(300):
            stream = _random_stream(rng, max_gap=1400)
            t_end = stream[-1][1] + 100
            stream = stream + [("over", t_end)]
            results = []
            for mk in (SegmenterConfig.legacy, SegmenterConfig.shim):
                config = mk(terminators=frozenset({"over"}))
                _, events = drive(config, stream)
                results.append([e for e in events if isinstance(e, UtteranceComplete)])
            assert results[0] == results[1]
