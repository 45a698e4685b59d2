"""Utterance segmentation from a timestamped token stream.

Two timing policies share one mechanism.  The legacy policy models the
restrictive behaviour of fixed-syntax voice interfaces: a silence longer
than the window throws the partial command away and subsequent speech
starts a new one.  The shim policy gives speakers room to plan: the same
silence *submits* the pending tokens instead of discarding them, and an
optional completion word ("over", "end", ...) submits immediately.

States are immutable values; each transition returns the next state plus
the events it emitted, so one stream can be replayed under both policies.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Optional, Union


class SegmenterMode(enum.Enum):
    LEGACY = "legacy"
    SHIM = "shim"


DEFAULT_LEGACY_WINDOW_MS = 1500  # midpoint of the 1-2 s range legacy systems use
DEFAULT_SHIM_WINDOW_MS = 3000


@dataclass(frozen=True)
class SegmenterConfig:
    mode: SegmenterMode
    window_ms: int
    terminators: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.window_ms <= 0:
            raise ValueError("window must be positive")
        for t in self.terminators:
            if not t or " " in t:
                raise ValueError("terminator phrases must be single tokens")

    @classmethod
    def legacy(cls, window_ms: int = DEFAULT_LEGACY_WINDOW_MS,
               terminators: frozenset[str] = frozenset()) -> "SegmenterConfig":
        return cls(SegmenterMode.LEGACY, window_ms, terminators)

    @classmethod
    def shim(cls, window_ms: int = DEFAULT_SHIM_WINDOW_MS,
             terminators: frozenset[str] = frozenset()) -> "SegmenterConfig":
        return cls(SegmenterMode.SHIM, window_ms, terminators)


@dataclass(frozen=True)
class UtteranceComplete:
    tokens: tuple[str, ...]
    at: int


@dataclass(frozen=True)
class Discarded:
    tokens: tuple[str, ...]
    at: int


SegmenterEvent = Union[UtteranceComplete, Discarded]


class NonMonotonicTimestampError(ValueError):
    pass


@dataclass(frozen=True)
class SegmenterState:
    config: SegmenterConfig
    pending: tuple[tuple[str, int], ...] = ()
    last_arrival: Optional[int] = None
    log: tuple[SegmenterEvent, ...] = ()


def new_segmenter(config: SegmenterConfig) -> SegmenterState:
    return SegmenterState(config)


def _expire(state: SegmenterState, now: int) -> tuple[SegmenterState, list[SegmenterEvent]]:
    """Resolve the pending tokens if the window has elapsed."""
    if not state.pending or state.last_arrival is None:
        return state, []
    if now - state.last_arrival <= state.config.window_ms:
        return state, []
    tokens = tuple(tok for tok, _ in state.pending)
    if state.config.mode is SegmenterMode.LEGACY:
        event: SegmenterEvent = Discarded(tokens, now)
    else:
        event = UtteranceComplete(tokens, now)
    return replace(state, pending=(), log=state.log + (event,)), [event]


def push_token(state: SegmenterState, token: str, at: int
               ) -> tuple[SegmenterState, list[SegmenterEvent]]:
    """Feed one token arriving at ``at`` milliseconds.

    A gap longer than the window resolves the previous tokens first (discard
    or submit, by mode), so the new token starts a fresh utterance.  A
    terminator token submits the pending utterance immediately, excluding
    itself from the payload.
    """
    if state.last_arrival is not None and at < state.last_arrival:
        raise NonMonotonicTimestampError(f"{at} precedes last arrival {state.last_arrival}")
    state, events = _expire(state, at)
    if token in state.config.terminators:
        if state.pending:
            done = UtteranceComplete(tuple(t for t, _ in state.pending), at)
            events.append(done)
            state = replace(state, pending=(), last_arrival=at, log=state.log + (done,))
        else:
            state = replace(state, last_arrival=at)
        return state, events
    state = replace(state, pending=state.pending + ((token, at),), last_arrival=at)
    return state, events


def tick(state: SegmenterState, now: int) -> tuple[SegmenterState, list[SegmenterEvent]]:
    """Advance the clock without new speech."""
    if state.last_arrival is not None and now < state.last_arrival:
        raise NonMonotonicTimestampError(f"{now} precedes last arrival {state.last_arrival}")
    return _expire(state, now)


def flush(state: SegmenterState, now: Optional[int] = None
          ) -> tuple[SegmenterState, list[SegmenterEvent]]:
    """End of input: submit whatever is pending in either mode.

    The legacy policy discards only mid-stream pauses; once the speaker has
    actually stopped, the accumulated tokens are handed to the interface.
    """
    if not state.pending:
        return state, []
    at = now if now is not None else (state.last_arrival or 0)
    event = UtteranceComplete(tuple(t for t, _ in state.pending), at)
    return replace(state, pending=(), log=state.log + (event,)), [event]
