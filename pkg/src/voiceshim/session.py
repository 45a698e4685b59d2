"""Shim session: segmenter -> normalizer -> transport -> simulated interface.

A session owns one simulator state, one segmenter, the selection cache, and
the ring of the five most recently executed commands.  Each utterance
yields an ordered event batch: the transcript always comes first, exactly
one terminal event follows (interface outcome, clarification question, or
suggestion list), and listening-indicator events mark when the microphone
conceptually closes for processing and reopens.

The command relay to the legacy side is abstracted as a Transport: the
identity transport delivers the canonical string verbatim, while the
fault-injecting transport garbles tokens at a seeded rate to model relays
whose spoken output the legacy recognizer occasionally mishears.
"""

from __future__ import annotations

import json
import random
import uuid
from dataclasses import dataclass, field
from typing import Optional, Protocol, Union

from . import sim
from .grammar import serialize_canonical
from .lexicon import NormalizerLexicon, default_lexicon
from .normalizer import (
    RESTART_CODE,
    Clarify,
    Corrected,
    NormalizationResult,
    NormalizerBackend,
    PartialCommand,
    PassThrough,
    RuleBackend,
    SelectionContext,
    Suggest,
)
from .segmenter import (
    Discarded,
    SegmenterConfig,
    SegmenterState,
    UtteranceComplete,
    flush,
    new_segmenter,
    push_token,
    tick,
)

HISTORY_LIMIT = 5


# --- events ---------------------------------------------------------------


@dataclass(frozen=True)
class Transcript:
    text: str


@dataclass(frozen=True)
class Normalized:
    kind: str
    command: Optional[str] = None
    confidence: Optional[int] = None
    repairs: tuple[str, ...] = ()


@dataclass(frozen=True)
class Relayed:
    command: str


@dataclass(frozen=True)
class VuiOutcome:
    outcome: sim.Outcome
    selection: Optional[tuple[int, int]] = None  # post-command highlight range


@dataclass(frozen=True)
class ClarificationAsked:
    question: str


@dataclass(frozen=True)
class SuggestionShown:
    suggestions: tuple[tuple[str, str], ...]  # (text, reason)
    code: str


@dataclass(frozen=True)
class ListeningState:
    on: bool


@dataclass(frozen=True)
class UtteranceDiscarded:
    tokens: tuple[str, ...]


SessionEvent = Union[Transcript, Normalized, Relayed, VuiOutcome,
                     ClarificationAsked, SuggestionShown, ListeningState,
                     UtteranceDiscarded]

TERMINAL_EVENTS = (VuiOutcome, ClarificationAsked, SuggestionShown)


def event_to_dict(event: SessionEvent) -> dict:
    """One JSON object per event; this is also the gateway frame schema."""
    if isinstance(event, Transcript):
        return {"type": "transcript", "text": event.text}
    if isinstance(event, Normalized):
        body = {"type": "normalized", "kind": event.kind}
        if event.command is not None:
            body["command"] = event.command
        if event.confidence is not None:
            body["confidence"] = event.confidence
        if event.repairs:
            body["repairs"] = list(event.repairs)
        return body
    if isinstance(event, Relayed):
        return {"type": "relayed", "command": event.command}
    if isinstance(event, VuiOutcome):
        selection = None
        if event.selection is not None:
            selection = {"start": event.selection[0], "end": event.selection[1]}
        return {"type": "vui_outcome", "outcome": _outcome_to_dict(event.outcome),
                "selection": selection}
    if isinstance(event, ClarificationAsked):
        return {"type": "clarification_asked", "question": event.question}
    if isinstance(event, SuggestionShown):
        return {
            "type": "suggestion_shown",
            "code": event.code,
            "suggestions": [{"text": t, "reason": r} for t, r in event.suggestions],
        }
    if isinstance(event, ListeningState):
        return {"type": "listening", "on": event.on}
    assert isinstance(event, UtteranceDiscarded)
    return {"type": "utterance_discarded", "tokens": list(event.tokens)}


def _outcome_to_dict(outcome: sim.Outcome) -> dict:
    if isinstance(outcome, sim.Applied):
        return {"status": "applied", "description": outcome.description,
                "buffer": outcome.buffer_text}
    if isinstance(outcome, sim.PendingDisambiguation):
        return {
            "status": "pending_disambiguation",
            "candidates": [
                {"number": o.number, "label": o.label, "start": o.start, "end": o.end}
                for o in outcome.options
            ],
        }
    assert isinstance(outcome, sim.Failed)
    return {"status": "failed", "reason": outcome.reason.value}


def events_to_ndjson(events: list[SessionEvent]) -> str:
    return "".join(json.dumps(event_to_dict(e), sort_keys=True) + "\n" for e in events)


# --- transports -----------------------------------------------------------


class Transport(Protocol):
    """Delivers an adapted command to the legacy side, returning the token
    sequence the legacy recognizer actually hears."""

    def deliver(self, command: str) -> str: ...


class IdentityTransport:
    def deliver(self, command: str) -> str:
        return command


class FaultInjectingTransport:
    """Garbles one token per delivery at the given rate (seeded)."""

    def __init__(self, rate: float = 0.1, seed: int = 0):
        if not 0.0 <= rate <= 1.0:
            raise ValueError("rate must be within [0, 1]")
        self.rate = rate
        self._rng = random.Random(seed)

    def deliver(self, command: str) -> str:
        tokens = command.split()
        if tokens and self._rng.random() < self.rate:
            i = self._rng.randrange(len(tokens))
            tokens[i] = tokens[i][::-1] + "x"
        return " ".join(tokens)


# --- session --------------------------------------------------------------


@dataclass
class SessionConfig:
    segmenter: SegmenterConfig = field(default_factory=SegmenterConfig.shim)
    lexicon: Optional[NormalizerLexicon] = None


class Session:
    """One speaker's live shim session; single logical owner, no sharing."""

    def __init__(self, initial_text: str = "",
                 correction_lexicon: Optional[dict] = None,
                 config: Optional[SessionConfig] = None,
                 backend: Optional[NormalizerBackend] = None,
                 transport: Optional[Transport] = None):
        config = config or SessionConfig()
        self.id = uuid.uuid4().hex
        self.sim = sim.init(initial_text, correction_lexicon)
        self.seg: SegmenterState = new_segmenter(config.segmenter)
        self.lexicon = config.lexicon or default_lexicon()
        self.backend: NormalizerBackend = backend or RuleBackend(self.lexicon)
        self.transport: Transport = transport or IdentityTransport()
        self.cache = SelectionContext()
        self.pending_clarification: Optional[PartialCommand] = None
        self._history: list[str] = []  # most recent first

    # -- history and cache

    def history(self) -> list[str]:
        return list(self._history)

    def _push_history(self, command: str) -> None:
        self._history.insert(0, command)
        del self._history[HISTORY_LIMIT:]

    def _sync_cache(self) -> None:
        selection = self.sim.selection
        if selection is None:
            self.cache = SelectionContext()
        else:
            words = self.sim.buffer[selection.start:selection.end]
            self.cache = SelectionContext(tuple(w.lower() for w in words))

    # -- main entry points

    def utter(self, text: str) -> list[SessionEvent]:
        """Process one complete utterance and return its event batch."""
        if not text.split():
            raise ValueError("utterance must be non-empty")
        events: list[SessionEvent] = [Transcript(text), ListeningState(on=False)]
        if self.pending_clarification is not None:
            partial, self.pending_clarification = self.pending_clarification, None
            result = self.backend.clarify(partial, text)
            if isinstance(result, Suggest) and result.code == RESTART_CODE:
                # The answer started a fresh command; abandon the question.
                result = self.backend.normalize(text, self.cache, self._history)
        else:
            result = self.backend.normalize(text, self.cache, self._history)
        events.extend(self._handle(result))
        events.append(ListeningState(on=True))
        return events

    def feed_token(self, token: str, at: int) -> list[SessionEvent]:
        """Drive the segmenter with a timestamped token."""
        self.seg, seg_events = push_token(self.seg, token, at)
        return self._consume_segments(seg_events)

    def feed_tick(self, now: int) -> list[SessionEvent]:
        self.seg, seg_events = tick(self.seg, now)
        return self._consume_segments(seg_events)

    def feed_flush(self, now: Optional[int] = None) -> list[SessionEvent]:
        self.seg, seg_events = flush(self.seg, now)
        return self._consume_segments(seg_events)

    def _consume_segments(self, seg_events) -> list[SessionEvent]:
        events: list[SessionEvent] = []
        for seg_event in seg_events:
            if isinstance(seg_event, Discarded):
                events.append(UtteranceDiscarded(seg_event.tokens))
            elif isinstance(seg_event, UtteranceComplete) and seg_event.tokens:
                events.extend(self.utter(" ".join(seg_event.tokens)))
        return events

    # -- result handling

    def _handle(self, result: NormalizationResult) -> list[SessionEvent]:
        if isinstance(result, (Corrected, PassThrough)):
            canonical = serialize_canonical(result.command)
            if isinstance(result, Corrected):
                normalized = Normalized("corrected", canonical, result.confidence,
                                        tuple(r.category.value for r in result.trace))
            else:
                normalized = Normalized("pass_through", canonical)
            heard = self.transport.deliver(canonical)
            self.sim, outcome = sim.execute(self.sim, heard)
            self._push_history(canonical)
            self._sync_cache()
            selection = None
            if self.sim.selection is not None:
                selection = (self.sim.selection.start, self.sim.selection.end)
            return [normalized, Relayed(canonical), VuiOutcome(outcome, selection)]
        if isinstance(result, Clarify):
            self.pending_clarification = result.partial
            return [Normalized("clarify"), ClarificationAsked(result.question)]
        assert isinstance(result, Suggest)
        return [
            Normalized("suggest"),
            SuggestionShown(tuple((s.text, s.reason) for s in result.suggestions),
                            result.code),
        ]


def open_session(initial_text: str = "",
                 correction_lexicon: Optional[dict] = None,
                 config: Optional[SessionConfig] = None,
                 backend: Optional[NormalizerBackend] = None,
                 transport: Optional[Transport] = None) -> Session:
    """Fresh session with empty history and cache."""
    return Session(initial_text, correction_lexicon, config, backend, transport)
