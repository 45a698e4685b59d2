"""Desk-scale stand-in for a fixed-syntax legacy voice interface.

The simulator owns a word buffer with a cursor, an optional selection, and
undo/redo stacks.  It accepts only canonical command strings; anything else
fails with ``UNRECOGNIZED`` and leaves the state untouched, which is the
defining behaviour of the legacy systems being shimmed.

Duplicate targets follow the numbered-disambiguation workflow: every match
is tagged with a 1-based index, left to right, and a subsequent
``CHOOSE <n>`` resolves the operation that was left in flight.  Typo fixing
is driven by an injectable correction lexicon mapping a written form to its
candidate replacements.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional, Sequence, Union

from .grammar import (
    Command,
    ContextKind,
    Deictic,
    Direction,
    Number,
    OperationKind,
    ParseError,
    Phrase,
    RelativeWord,
    parse_canonical,
    serialize_canonical,
)


class FailReason(enum.Enum):
    UNRECOGNIZED = "unrecognized"
    TARGET_NOT_FOUND = "target_not_found"
    NO_SELECTION = "no_selection"
    NOTHING_TO_UNDO = "nothing_to_undo"
    NOTHING_TO_REDO = "nothing_to_redo"


@dataclass(frozen=True)
class Span:
    """Half-open word-index range [start, end)."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"invalid span {self.start}:{self.end}")


@dataclass(frozen=True)
class CandidateOption:
    number: int
    label: str
    start: Optional[int] = None
    end: Optional[int] = None


@dataclass(frozen=True)
class Applied:
    description: str
    buffer_text: str


@dataclass(frozen=True)
class PendingDisambiguation:
    options: tuple[CandidateOption, ...]


@dataclass(frozen=True)
class Failed:
    reason: FailReason


Outcome = Union[Applied, PendingDisambiguation, Failed]


@dataclass(frozen=True)
class PendingTargets:
    """An operation waiting for the user to pick a target location."""

    command: Command
    spans: tuple[Span, ...]


@dataclass(frozen=True)
class PendingCorrections:
    """A typo fix waiting for the user to pick a replacement word."""

    span: Span
    words: tuple[str, ...]


Snapshot = tuple[tuple[str, ...], Optional[Span], int]


@dataclass(frozen=True)
class SimState:
    buffer: tuple[str, ...]
    cursor: int = 0
    selection: Optional[Span] = None
    pending: Optional[Union[PendingTargets, PendingCorrections]] = None
    undo_stack: tuple[Snapshot, ...] = ()
    redo_stack: tuple[Snapshot, ...] = ()
    lexicon: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def lexicon_map(self) -> dict[str, tuple[str, ...]]:
        return dict(self.lexicon)


def init(text: Union[str, Sequence[str]] = "",
         lexicon: Optional[Mapping[str, Iterable[str]]] = None) -> SimState:
    """Fresh state: the given text, no selection, empty history."""
    words = tuple(text.split()) if isinstance(text, str) else tuple(text)
    lex = tuple(sorted((k.lower(), tuple(v)) for k, v in (lexicon or {}).items()))
    return SimState(buffer=words, cursor=0, lexicon=lex)


def buffer_text(state: SimState) -> str:
    return " ".join(state.buffer)


def find_matches(buffer: Sequence[str], words: Sequence[str]) -> list[Span]:
    """All whole-word, case-insensitive, contiguous occurrences, left to right."""
    lowered = [w.lower() for w in buffer]
    needle = [w.lower() for w in words]
    k = len(needle)
    if k == 0:
        return []
    return [Span(i, i + k) for i in range(len(buffer) - k + 1)
            if lowered[i:i + k] == needle]


def _snapshot(state: SimState) -> Snapshot:
    return (state.buffer, state.selection, state.cursor)


def _with_edit(state: SimState, buffer: tuple[str, ...], cursor: int,
               description: str) -> tuple[SimState, Outcome]:
    """Commit a buffer edit: push undo, drop redo, clear selection."""
    new = replace(
        state,
        buffer=buffer,
        cursor=cursor,
        selection=None,
        pending=None,
        undo_stack=state.undo_stack + (_snapshot(state),),
        redo_stack=(),
    )
    return new, Applied(description, buffer_text(new))


def _splice(buffer: tuple[str, ...], span: Span,
            words: Sequence[str]) -> tuple[str, ...]:
    return buffer[:span.start] + tuple(words) + buffer[span.end:]


def _target_options(buffer: Sequence[str], spans: Sequence[Span]) -> tuple[CandidateOption, ...]:
    return tuple(
        CandidateOption(i + 1, " ".join(buffer[s.start:s.end]), s.start, s.end)
        for i, s in enumerate(spans)
    )


def _resolve_or_pend(state: SimState, cmd: Command,
                     words: Sequence[str]) -> tuple[Optional[Span], Optional[tuple[SimState, Outcome]]]:
    """Apply the 0/1/many rule for a target phrase.

    Returns (span, None) when unique, or (None, result) when the caller
    should return a failure or a pending disambiguation.
    """
    spans = find_matches(state.buffer, words)
    if not spans:
        return None, (state, Failed(FailReason.TARGET_NOT_FOUND))
    if len(spans) == 1:
        return spans[0], None
    pend = replace(state, pending=PendingTargets(cmd, tuple(spans)))
    return None, (pend, PendingDisambiguation(_target_options(state.buffer, spans)))


def execute(state: SimState, text: str) -> tuple[SimState, Outcome]:
    """Run one command string; malformed input fails gracefully."""
    try:
        cmd = parse_canonical(text)
    except ParseError:
        return state, Failed(FailReason.UNRECOGNIZED)
    if cmd.op is OperationKind.CHOOSE:
        assert isinstance(cmd.cmd_arg, Number)
        return _execute_choose(state, cmd.cmd_arg.value)
    # Any new command supersedes a pending disambiguation once it succeeds;
    # the dispatch helpers start from a pending-free copy but must return
    # the untouched original on failure.
    cleared = replace(state, pending=None)
    new_state, outcome = _dispatch(cleared, cmd)
    if isinstance(outcome, Failed):
        return state, outcome
    return new_state, outcome


def _dispatch(state: SimState, cmd: Command) -> tuple[SimState, Outcome]:
    op = cmd.op
    if op is OperationKind.SELECT:
        return _execute_select(state, cmd)
    if op is OperationKind.DELETE:
        return _execute_delete(state, cmd)
    if op is OperationKind.CORRECT:
        return _execute_correct(state, cmd)
    if op is OperationKind.INSERT:
        return _execute_insert(state, cmd)
    if op is OperationKind.REPLACE:
        return _execute_replace(state, cmd)
    if op is OperationKind.MOVE:
        return _execute_move(state, cmd)
    if op is OperationKind.UNDO:
        return _execute_undo(state)
    assert op is OperationKind.REDO
    return _execute_redo(state)


def _select_span(state: SimState, span: Span, label: str) -> tuple[SimState, Outcome]:
    new = replace(state, selection=span, cursor=span.end, pending=None)
    return new, Applied(f"selected {label!r}", buffer_text(new))


def _execute_select(state: SimState, cmd: Command) -> tuple[SimState, Outcome]:
    if isinstance(cmd.cmd_arg, RelativeWord):
        anchor = state.selection
        if anchor is not None:
            base = anchor.start if cmd.cmd_arg.direction is Direction.PREVIOUS else anchor.end
        else:
            base = state.cursor
        if cmd.cmd_arg.direction is Direction.PREVIOUS:
            if base - 1 < 0:
                return state, Failed(FailReason.TARGET_NOT_FOUND)
            span = Span(base - 1, base)
        else:
            if base >= len(state.buffer):
                return state, Failed(FailReason.TARGET_NOT_FOUND)
            span = Span(base, base + 1)
        return _select_span(state, span, state.buffer[span.start])
    assert isinstance(cmd.cmd_arg, Phrase)
    span, early = _resolve_or_pend(state, cmd, cmd.cmd_arg.words)
    if early is not None:
        return early
    assert span is not None
    return _select_span(state, span, cmd.cmd_arg.text())


def _apply_at_span(state: SimState, cmd: Command, span: Span) -> tuple[SimState, Outcome]:
    """Perform a location-resolved operation."""
    if cmd.op is OperationKind.SELECT:
        return _select_span(state, span, " ".join(state.buffer[span.start:span.end]))
    if cmd.op is OperationKind.MOVE:
        cursor = span.start if cmd.ctx is ContextKind.BEFORE else span.end
        new = replace(state, cursor=cursor, pending=None)
        return new, Applied(f"moved cursor to position {cursor}", buffer_text(new))
    if cmd.op is OperationKind.DELETE:
        removed = " ".join(state.buffer[span.start:span.end])
        return _with_edit(state, _splice(state.buffer, span, ()), span.start,
                          f"deleted {removed!r}")
    if cmd.op is OperationKind.INSERT:
        assert isinstance(cmd.cmd_arg, Phrase)
        at = span.start if cmd.ctx is ContextKind.BEFORE else span.end
        words = cmd.cmd_arg.words
        return _with_edit(state, state.buffer[:at] + words + state.buffer[at:],
                          at + len(words), f"inserted {cmd.cmd_arg.text()!r}")
    if cmd.op is OperationKind.REPLACE:
        assert isinstance(cmd.ctx_arg, Phrase)
        old = " ".join(state.buffer[span.start:span.end])
        new_words = cmd.ctx_arg.words
        return _with_edit(state, _splice(state.buffer, span, new_words),
                          span.start + len(new_words),
                          f"replaced {old!r} with {cmd.ctx_arg.text()!r}")
    if cmd.op is OperationKind.CORRECT:
        return _correct_at_span(state, span)
    raise AssertionError(f"unexpected op {cmd.op}")


def _correct_at_span(state: SimState, span: Span) -> tuple[SimState, Outcome]:
    written = " ".join(state.buffer[span.start:span.end]).lower()
    candidates = state.lexicon_map().get(written, ())
    if not candidates:
        return state, Failed(FailReason.TARGET_NOT_FOUND)
    if len(candidates) == 1:
        fix = candidates[0].split()
        return _with_edit(state, _splice(state.buffer, span, fix),
                          span.start + len(fix), f"corrected {written!r} to {candidates[0]!r}")
    pend = replace(state, pending=PendingCorrections(span, tuple(candidates)))
    options = tuple(CandidateOption(i + 1, w, span.start, span.end)
                    for i, w in enumerate(candidates))
    return pend, PendingDisambiguation(options)


def _execute_delete(state: SimState, cmd: Command) -> tuple[SimState, Outcome]:
    if isinstance(cmd.cmd_arg, Deictic):
        if state.selection is None:
            return state, Failed(FailReason.NO_SELECTION)
        return _apply_at_span(state, cmd, state.selection)
    assert isinstance(cmd.cmd_arg, Phrase)
    span, early = _resolve_or_pend(state, cmd, cmd.cmd_arg.words)
    if early is not None:
        return early
    assert span is not None
    return _apply_at_span(state, cmd, span)


def _execute_correct(state: SimState, cmd: Command) -> tuple[SimState, Outcome]:
    if isinstance(cmd.cmd_arg, Deictic):
        if state.selection is None:
            return state, Failed(FailReason.NO_SELECTION)
        return _correct_at_span(state, state.selection)
    assert isinstance(cmd.cmd_arg, Phrase)
    span, early = _resolve_or_pend(state, cmd, cmd.cmd_arg.words)
    if early is not None:
        return early
    assert span is not None
    return _correct_at_span(state, span)


def _execute_insert(state: SimState, cmd: Command) -> tuple[SimState, Outcome]:
    assert isinstance(cmd.ctx_arg, Phrase)
    span, early = _resolve_or_pend(state, cmd, cmd.ctx_arg.words)
    if early is not None:
        return early
    assert span is not None
    return _apply_at_span(state, cmd, span)


def _execute_replace(state: SimState, cmd: Command) -> tuple[SimState, Outcome]:
    assert isinstance(cmd.cmd_arg, Phrase)
    span, early = _resolve_or_pend(state, cmd, cmd.cmd_arg.words)
    if early is not None:
        return early
    assert span is not None
    return _apply_at_span(state, cmd, span)


def _execute_move(state: SimState, cmd: Command) -> tuple[SimState, Outcome]:
    assert isinstance(cmd.ctx_arg, Phrase)
    span, early = _resolve_or_pend(state, cmd, cmd.ctx_arg.words)
    if early is not None:
        return early
    assert span is not None
    return _apply_at_span(state, cmd, span)


def _execute_choose(state: SimState, n: int) -> tuple[SimState, Outcome]:
    if state.pending is None:
        return state, Failed(FailReason.TARGET_NOT_FOUND)
    if isinstance(state.pending, PendingTargets):
        if n > len(state.pending.spans):
            return state, Failed(FailReason.TARGET_NOT_FOUND)
        span = state.pending.spans[n - 1]
        return _apply_at_span(replace(state, pending=None), state.pending.command, span)
    assert isinstance(state.pending, PendingCorrections)
    if n > len(state.pending.words):
        return state, Failed(FailReason.TARGET_NOT_FOUND)
    word = state.pending.words[n - 1]
    span = state.pending.span
    old = " ".join(state.buffer[span.start:span.end])
    fix = word.split()
    return _with_edit(replace(state, pending=None),
                      _splice(state.buffer, span, fix),
                      span.start + len(fix), f"corrected {old!r} to {word!r}")


def _execute_undo(state: SimState) -> tuple[SimState, Outcome]:
    if not state.undo_stack:
        return state, Failed(FailReason.NOTHING_TO_UNDO)
    buffer, selection, cursor = state.undo_stack[-1]
    new = replace(
        state,
        buffer=buffer,
        selection=selection,
        cursor=cursor,
        pending=None,
        undo_stack=state.undo_stack[:-1],
        redo_stack=state.redo_stack + (_snapshot(state),),
    )
    return new, Applied("undid last edit", buffer_text(new))


def _execute_redo(state: SimState) -> tuple[SimState, Outcome]:
    if not state.redo_stack:
        return state, Failed(FailReason.NOTHING_TO_REDO)
    buffer, selection, cursor = state.redo_stack[-1]
    new = replace(
        state,
        buffer=buffer,
        selection=selection,
        cursor=cursor,
        pending=None,
        undo_stack=state.undo_stack + (_snapshot(state),),
        redo_stack=state.redo_stack[:-1],
    )
    return new, Applied("redid last edit", buffer_text(new))


# --- snapshot text format (for golden tests and the replay harness) ------
#
#   buffer: the law enforcement has responsibility
#   cursor: 3
#   selection: 1:2          (or "-")
#   pending: targets 1:2 4:5 | SELECT apple
#   pending: corrections 3:4 | meeting meetings
#   pending: -


def export_snapshot(state: SimState) -> str:
    lines = [f"buffer: {buffer_text(state)}", f"cursor: {state.cursor}"]
    if state.selection is None:
        lines.append("selection: -")
    else:
        lines.append(f"selection: {state.selection.start}:{state.selection.end}")
    if state.pending is None:
        lines.append("pending: -")
    elif isinstance(state.pending, PendingTargets):
        spans = " ".join(f"{s.start}:{s.end}" for s in state.pending.spans)
        lines.append(f"pending: targets {spans} | {serialize_canonical(state.pending.command)}")
    else:
        span = state.pending.span
        words = " ".join(state.pending.words)
        lines.append(f"pending: corrections {span.start}:{span.end} | {words}")
    return "\n".join(lines) + "\n"


class SnapshotFormatError(ValueError):
    pass


def _parse_span(text: str) -> Span:
    start, _, end = text.partition(":")
    return Span(int(start), int(end))


def import_snapshot(text: str,
                    lexicon: Optional[Mapping[str, Iterable[str]]] = None) -> SimState:
    fields: dict[str, str] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise SnapshotFormatError(f"malformed line: {line!r}")
        fields[key.strip()] = value.strip()
    for required in ("buffer", "selection", "pending"):
        if required not in fields:
            raise SnapshotFormatError(f"missing {required!r} line")
    state = init(fields["buffer"], lexicon)
    if "cursor" in fields:
        state = replace(state, cursor=int(fields["cursor"]))
    if fields["selection"] != "-":
        state = replace(state, selection=_parse_span(fields["selection"]))
    pending = fields["pending"]
    if pending != "-":
        kind, _, rest = pending.partition(" ")
        body, sep, tail = rest.partition("|")
        if not sep:
            raise SnapshotFormatError(f"malformed pending line: {pending!r}")
        if kind == "targets":
            spans = tuple(_parse_span(p) for p in body.split())
            state = replace(state, pending=PendingTargets(parse_canonical(tail.strip()), spans))
        elif kind == "corrections":
            span = _parse_span(body.strip())
            state = replace(state, pending=PendingCorrections(span, tuple(tail.split())))
        else:
            raise SnapshotFormatError(f"unknown pending kind: {kind!r}")
    return state
