"""Rule pipeline that adapts a natural utterance to the fixed grammar.

Given the transcript, the current selection, and recent command history,
the pipeline either returns the canonical command (with a confidence score
and the list of repairs it applied), asks one clarifying question when
exactly one piece is missing, or falls back to structured suggestions
rather than guessing.

Repairs mirror how speakers actually deviate from the grammar: swapped or
substituted keywords, wrong context words, wrong template shapes, dropped
or added deictic references, missing arguments, and plain natural phrasing
(fillers, "the word ...", "number ...").  Arguments are only ever taken
verbatim from the utterance or from the current selection; the pipeline
never invents words.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Protocol, Sequence, Union

from .grammar import (
    Command,
    ComponentKind,
    ContextKind,
    Deictic,
    Direction,
    InvalidCommandError,
    Number,
    OP_KEYWORDS,
    OperationKind,
    ParseError,
    Phrase,
    RelativeWord,
    parse_canonical,
    parse_number_token,
    serialize_canonical,
)
from .lexicon import NormalizerLexicon, RepairCategory, default_lexicon


@dataclass(frozen=True)
class SelectionContext:
    """The phrase currently selected in the editor, if any."""

    selected: Optional[tuple[str, ...]] = None

    def __post_init__(self) -> None:
        if self.selected is not None and not self.selected:
            raise ValueError("selection phrase must be non-empty when present")

    @classmethod
    def of(cls, text: Optional[str]) -> "SelectionContext":
        if text is None or not text.split():
            return cls(None)
        return cls(tuple(text.lower().split()))


@dataclass(frozen=True)
class Repair:
    category: RepairCategory
    tokens: tuple[str, ...]


RepairTrace = tuple[Repair, ...]


@dataclass(frozen=True)
class PartialCommand:
    """A command with exactly one slot still unknown."""

    op: OperationKind
    cmd_arg: Optional[Union[Phrase, Number, Deictic, RelativeWord]]
    ctx: Optional[ContextKind]
    ctx_arg: Optional[Phrase]
    missing: ComponentKind
    question: str
    trace: RepairTrace = ()


@dataclass(frozen=True)
class Corrected:
    command: Command
    confidence: int
    trace: RepairTrace


@dataclass(frozen=True)
class PassThrough:
    command: Command


@dataclass(frozen=True)
class Clarify:
    question: str
    partial: PartialCommand


@dataclass(frozen=True)
class Suggestion:
    text: str
    reason: str


@dataclass(frozen=True)
class Suggest:
    suggestions: tuple[Suggestion, ...]
    code: str = "unrecognized"


NormalizationResult = Union[Corrected, PassThrough, Clarify, Suggest]

RESTART_CODE = "restart"


def confidence(trace: RepairTrace, lexicon: Optional[NormalizerLexicon] = None) -> int:
    """Score a repair trace: start at 100, subtract each repair's penalty."""
    lex = lexicon or default_lexicon()
    return max(0, 100 - sum(lex.penalty(r.category) for r in trace))


class _Abort(Exception):
    """Internal: unwinds the pipeline with a final result."""

    def __init__(self, result: NormalizationResult):
        self.result = result


def _strip_fillers(tokens: list[str], lex: NormalizerLexicon,
                   repairs: list[Repair]) -> list[str]:
    changed = True
    while changed and tokens:
        changed = False
        for filler in lex.fillers:
            k = len(filler)
            if tuple(tokens[:k]) == filler:
                repairs.append(Repair(RepairCategory.NATURAL_UTTERANCE, filler))
                tokens = tokens[k:]
                changed = True
                break
    return tokens


def _strip_noise(tokens: list[str], lex: NormalizerLexicon,
                 repairs: list[Repair]) -> list[str]:
    out: list[str] = []
    i = 0
    while i < len(tokens):
        matched = False
        for phrase in lex.noise_phrases:
            k = len(phrase)
            if tuple(tokens[i:i + k]) == phrase:
                repairs.append(Repair(RepairCategory.NATURAL_UTTERANCE, phrase))
                i += k
                matched = True
                break
        if matched:
            continue
        if (tokens[i] == lex.number_prefix and i + 1 < len(tokens)
                and parse_number_token(tokens[i + 1]) is not None):
            repairs.append(Repair(RepairCategory.NATURAL_UTTERANCE, (tokens[i],)))
            i += 1
            continue
        out.append(tokens[i])
        i += 1
    return out


def _is_deictic(span: Sequence[str], lex: NormalizerLexicon) -> bool:
    span = tuple(span)
    if len(span) == 1 and span[0] in lex.deictic_words:
        return True
    return span in lex.deictic_phrases


def _selection_phrase(ctx: SelectionContext) -> Optional[Phrase]:
    if ctx.selected is None:
        return None
    try:
        return Phrase(ctx.selected)
    except InvalidCommandError:
        return None


def _find_first(tokens: Sequence[str], wanted: Sequence[str]) -> Optional[int]:
    for i, tok in enumerate(tokens):
        if tok in wanted:
            return i
    return None


def _phrase_or_abort(span: Sequence[str], op: OperationKind,
                     lex: NormalizerLexicon) -> Phrase:
    try:
        return Phrase(tuple(span))
    except InvalidCommandError as err:
        raise _Abort(Suggest(_guidance(op, lex), code="unusable_phrase")) from err


def _guidance(op: Optional[OperationKind], lex: NormalizerLexicon,
              known: str = "<phrase>") -> tuple[Suggestion, ...]:
    """Structured template-completion help, built from the user's own words."""
    patterns = {
        OperationKind.SELECT: (
            (f"SELECT {known}", "say the exact phrase to select"),
            ("SELECT PREVIOUS WORD / SELECT NEXT WORD", "move the selection one word"),
        ),
        OperationKind.CHOOSE: (
            ("CHOOSE <number>", "pick a numbered candidate, starting at 1"),
        ),
        OperationKind.DELETE: (
            (f"DELETE {known}", "say the exact phrase to delete"),
            ("DELETE THAT", "delete the current selection"),
        ),
        OperationKind.CORRECT: (
            (f"CORRECT {known}", "say the written form to fix"),
            ("CORRECT THAT", "fix the current selection"),
        ),
        OperationKind.INSERT: (
            (f"INSERT {known} BEFORE <phrase>", "name the anchor to insert before"),
            (f"INSERT {known} AFTER <phrase>", "name the anchor to insert after"),
        ),
        OperationKind.REPLACE: (
            (f"REPLACE {known} WITH <phrase>", "say the target and its replacement"),
        ),
        OperationKind.UNDO: (("UNDO THAT", "undo the last edit"),),
        OperationKind.REDO: (("REDO THAT", "redo the last undone edit"),),
        OperationKind.MOVE: (
            ("MOVE BEFORE <phrase> / MOVE AFTER <phrase>", "move the cursor"),
        ),
    }
    if op is not None:
        return tuple(Suggestion(text, reason) for text, reason in patterns[op])
    flat = [patterns[o][0] for o in (OperationKind.SELECT, OperationKind.DELETE,
                                     OperationKind.INSERT, OperationKind.REPLACE)]
    return tuple(Suggestion(text, reason) for text, reason in flat)


def normalize(utterance: str,
              ctx: SelectionContext = SelectionContext(),
              history: Sequence[str] = (),
              lexicon: Optional[NormalizerLexicon] = None) -> NormalizationResult:
    """Adapt one utterance; deterministic for equal inputs.

    ``history`` (the five most recently executed commands) is part of the
    backend request contract; the rule pipeline itself does not consult it.
    """
    del history
    lex = lexicon or default_lexicon()
    raw_tokens = utterance.lower().split()
    if not raw_tokens:
        raise ValueError("utterance must be non-empty")
    try:
        return PassThrough(parse_canonical(utterance))
    except ParseError:
        pass
    try:
        return _repair(raw_tokens, ctx, lex)
    except _Abort as stop:
        return stop.result


def _repair(tokens: list[str], ctx: SelectionContext,
            lex: NormalizerLexicon) -> NormalizationResult:
    repairs: list[Repair] = []
    tokens = _strip_fillers(tokens, lex, repairs)
    if not tokens:
        return Suggest(_guidance(None, lex), code="empty")

    head, rest = tokens[0], tokens[1:]
    op = OP_KEYWORDS.get(head)
    if op is None:
        synonym = lex.cmd_synonyms.get(head)
        if synonym is None:
            return Suggest(_guidance(None, lex), code="unrecognized")
        repairs.append(Repair(RepairCategory.SUBSTITUTE_CMD, (head,)))
        op = synonym
    rest = _strip_noise(rest, lex, repairs)

    if op in (OperationKind.SELECT, OperationKind.CHOOSE):
        return _finish(_select_or_choose(op, rest, ctx, lex, repairs), repairs, lex)
    if op in (OperationKind.DELETE, OperationKind.CORRECT):
        return _finish(_delete_or_correct(op, rest, ctx, lex, repairs), repairs, lex)
    if op in (OperationKind.UNDO, OperationKind.REDO):
        return _finish(_undo_or_redo(op, rest, lex, repairs), repairs, lex)
    if op is OperationKind.INSERT:
        return _finish(_insert(rest, ctx, lex, repairs), repairs, lex)
    if op is OperationKind.REPLACE:
        return _finish(_replace(rest, ctx, lex, repairs), repairs, lex)
    assert op is OperationKind.MOVE
    return _finish(_move(rest, lex, repairs), repairs, lex)


def _finish(outcome: Union[Command, Clarify],
            repairs: list[Repair], lex: NormalizerLexicon) -> NormalizationResult:
    if isinstance(outcome, Clarify):
        return outcome
    trace = tuple(repairs)
    score = confidence(trace, lex)
    if score >= lex.auto_apply_threshold:
        return Corrected(outcome, score, trace)
    return Suggest(
        (Suggestion(serialize_canonical(outcome),
                    f"best interpretation, confidence {score}"),),
        code="low_confidence",
    )


def _clarify(op: OperationKind, missing: ComponentKind, question: str,
             repairs: list[Repair],
             cmd_arg=None, ctx_kind=None, ctx_arg=None) -> Clarify:
    partial = PartialCommand(op, cmd_arg, ctx_kind, ctx_arg, missing,
                             question, tuple(repairs))
    return Clarify(question, partial)


def _relative_direction(span: list[str], lex: NormalizerLexicon,
                        repairs: list[Repair]) -> Optional[Direction]:
    """Recognize previous/next word, its synonyms, and a leading article."""
    span = list(span)
    if span[:1] == [lex.article] and len(span) > 1:
        candidate = span[1:]
        if tuple(candidate) in lex.relative_synonyms or candidate in (
                ["previous", "word"], ["next", "word"]):
            repairs.append(Repair(RepairCategory.NATURAL_UTTERANCE, (lex.article,)))
            span = candidate
    if span in (["previous", "word"], ["next", "word"]):
        return Direction(span[0])
    mapped = lex.relative_synonyms.get(tuple(span))
    if mapped is not None:
        repairs.append(Repair(RepairCategory.SUBSTITUTE_CTX, tuple(span)))
        return Direction(mapped[0])
    return None


def _drop_trailing_context(op: OperationKind, span: list[str],
                           repairs: list[Repair]) -> list[str]:
    """Two-component operations take no context: drop a spurious tail."""
    cut = _find_first(span, ("before", "after", "with"))
    if cut is not None:
        repairs.append(Repair(RepairCategory.SUBSTITUTE_TEMPLATE, tuple(span[cut:])))
        span = span[:cut]
    return span


def _expand_deictic(span: list[str], ctx: SelectionContext, op: OperationKind,
                    lex: NormalizerLexicon, repairs: list[Repair]) -> Phrase:
    selection = _selection_phrase(ctx)
    if selection is None:
        raise _Abort(Suggest(
            (Suggestion(f"SELECT <phrase>, then {op.value.upper()} ... THAT",
                        "nothing is selected for the reference to point at"),)
            + _guidance(op, lex),
            code="missing_context",
        ))
    repairs.append(Repair(RepairCategory.ADD_DEICTIC, tuple(span)))
    return selection


def _select_or_choose(op: OperationKind, rest: list[str], ctx: SelectionContext,
                      lex: NormalizerLexicon,
                      repairs: list[Repair]) -> Union[Command, Clarify]:
    direction = _relative_direction(rest, lex, repairs) if rest else None
    if direction is not None:
        if op is OperationKind.CHOOSE:
            repairs.append(Repair(RepairCategory.SWAP_CMD, (op.value,)))
        return Command(OperationKind.SELECT, RelativeWord(direction))
    if not rest:
        if op is OperationKind.SELECT:
            return _clarify(op, ComponentKind.CMD_ARG,
                            lex.question("select_missing_target"), repairs)
        return _clarify(op, ComponentKind.CMD_ARG,
                        lex.question("choose_missing_number"), repairs)
    number = parse_number_token(rest[0]) if len(rest) == 1 else None
    if number is not None:
        if number < 1:
            raise _Abort(Suggest(_guidance(OperationKind.CHOOSE, lex),
                                 code="invalid_number"))
        if op is OperationKind.SELECT:
            repairs.append(Repair(RepairCategory.SWAP_CMD, (op.value,)))
        return Command(OperationKind.CHOOSE, Number(number))
    if op is OperationKind.CHOOSE:
        repairs.append(Repair(RepairCategory.SWAP_CMD, (op.value,)))
        op = OperationKind.SELECT
    rest = _drop_trailing_context(op, rest, repairs)
    if _is_deictic(rest, lex):
        return Command(op, _expand_deictic(rest, ctx, op, lex, repairs))
    return Command(op, _phrase_or_abort(rest, op, lex))


def _delete_or_correct(op: OperationKind, rest: list[str], ctx: SelectionContext,
                       lex: NormalizerLexicon,
                       repairs: list[Repair]) -> Union[Command, Clarify]:
    del ctx  # two-component deictics stay THAT; the interface resolves them
    if not rest:
        repairs.append(Repair(RepairCategory.IGNORE_DEICTIC, (op.value,)))
        return Command(op, Deictic())
    rest = _drop_trailing_context(op, rest, repairs)
    if not rest:
        raise _Abort(Suggest(_guidance(op, lex), code="unrecognized"))
    if _is_deictic(rest, lex):
        if rest != ["that"]:
            repairs.append(Repair(RepairCategory.NATURAL_UTTERANCE, tuple(rest)))
        return Command(op, Deictic())
    return Command(op, _phrase_or_abort(rest, op, lex))


def _undo_or_redo(op: OperationKind, rest: list[str], lex: NormalizerLexicon,
                  repairs: list[Repair]) -> Command:
    if not rest:
        repairs.append(Repair(RepairCategory.IGNORE_DEICTIC, (op.value,)))
    elif _is_deictic(rest, lex):
        if rest != ["that"]:
            repairs.append(Repair(RepairCategory.NATURAL_UTTERANCE, tuple(rest)))
    else:
        repairs.append(Repair(RepairCategory.SUBSTITUTE_TEMPLATE, tuple(rest)))
    return Command(op, Deictic())


def _insert(rest: list[str], ctx: SelectionContext, lex: NormalizerLexicon,
            repairs: list[Repair]) -> Union[Command, Clarify]:
    op = OperationKind.INSERT
    split = _find_first(rest, ("before", "after"))
    if split is None:
        if not rest:
            raise _Abort(Suggest(_guidance(op, lex), code="unrecognized"))
        if _is_deictic(rest, lex):
            content = _expand_deictic(rest, ctx, op, lex, repairs)
        else:
            content = _phrase_or_abort(rest, op, lex)
        selection = _selection_phrase(ctx)
        if selection is None:
            raise _Abort(Suggest(_guidance(op, lex, known=content.text()),
                                 code="missing_context"))
        repairs.append(Repair(RepairCategory.SUBSTITUTE_TEMPLATE, tuple(rest)))
        return Command(op, content, ContextKind.BEFORE, selection)

    ctx_kind = ContextKind(rest[split])
    content_span, anchor_span = rest[:split], rest[split + 1:]
    tail_cut = _find_first(anchor_span, ("before", "after", "with"))
    if tail_cut is not None:
        repairs.append(Repair(RepairCategory.SUBSTITUTE_TEMPLATE,
                              tuple(anchor_span[tail_cut:])))
        anchor_span = anchor_span[:tail_cut]
    if not content_span and not anchor_span:
        raise _Abort(Suggest(_guidance(op, lex), code="unrecognized"))

    anchor: Optional[Phrase]
    if not anchor_span:
        anchor = _selection_phrase(ctx)
        if anchor is not None:
            repairs.append(Repair(RepairCategory.MISSING_ARGS, (ctx_kind.value,)))
        else:
            content = _phrase_or_abort(content_span, op, lex)
            return _clarify(
                op, ComponentKind.CTX_ARG,
                lex.question("insert_missing_anchor", content=content.text(),
                             ctx=ctx_kind.value),
                repairs, cmd_arg=content, ctx_kind=ctx_kind)
    elif _is_deictic(anchor_span, lex):
        anchor = _expand_deictic(anchor_span, ctx, op, lex, repairs)
    else:
        anchor = _phrase_or_abort(anchor_span, op, lex)

    if not content_span:
        return _clarify(
            op, ComponentKind.CMD_ARG,
            lex.question("insert_missing_content", ctx=ctx_kind.value,
                         anchor=anchor.text()),
            repairs, ctx_kind=ctx_kind, ctx_arg=anchor)
    if _is_deictic(content_span, lex):
        content = _expand_deictic(content_span, ctx, op, lex, repairs)
    else:
        content = _phrase_or_abort(content_span, op, lex)
    return Command(op, content, ctx_kind, anchor)


def _replace(rest: list[str], ctx: SelectionContext, lex: NormalizerLexicon,
             repairs: list[Repair]) -> Union[Command, Clarify]:
    op = OperationKind.REPLACE
    split = _find_first(rest, ("with",))
    if split is None:
        alt = _find_first(rest, lex.connective_synonyms)
        if alt is not None:
            repairs.append(Repair(RepairCategory.SUBSTITUTE_CTX, (rest[alt],)))
            split = alt
    if split is None:
        if not rest:
            raise _Abort(Suggest(_guidance(op, lex), code="unrecognized"))
        if _is_deictic(rest, lex):
            target = _expand_deictic(rest, ctx, op, lex, repairs)
        else:
            target = _phrase_or_abort(rest, op, lex)
        # The connective is fixed for this operation, so only the
        # replacement itself is unknown.
        return _clarify(
            op, ComponentKind.CTX_ARG,
            lex.question("replace_missing_replacement", target=target.text()),
            repairs, cmd_arg=target, ctx_kind=ContextKind.WITH)

    target_span, repl_span = rest[:split], rest[split + 1:]
    target: Optional[Phrase]
    if not target_span:
        target = _selection_phrase(ctx)
        if target is not None:
            repairs.append(Repair(RepairCategory.MISSING_ARGS, ("with",)))
        elif repl_span:
            repl = _phrase_or_abort(repl_span, op, lex)
            return _clarify(
                op, ComponentKind.CMD_ARG,
                lex.question("replace_missing_target", replacement=repl.text()),
                repairs, ctx_kind=ContextKind.WITH, ctx_arg=repl)
        else:
            raise _Abort(Suggest(_guidance(op, lex), code="unrecognized"))
    elif _is_deictic(target_span, lex):
        target = _expand_deictic(target_span, ctx, op, lex, repairs)
    else:
        target = _phrase_or_abort(target_span, op, lex)

    if not repl_span:
        return _clarify(
            op, ComponentKind.CTX_ARG,
            lex.question("replace_missing_replacement", target=target.text()),
            repairs, cmd_arg=target, ctx_kind=ContextKind.WITH)
    if _is_deictic(repl_span, lex):
        repl = _expand_deictic(repl_span, ctx, op, lex, repairs)
    else:
        repl = _phrase_or_abort(repl_span, op, lex)
    return Command(op, target, ContextKind.WITH, repl)


def _move(rest: list[str], lex: NormalizerLexicon,
          repairs: list[Repair]) -> Command:
    op = OperationKind.MOVE
    if not rest or rest[0] not in ("before", "after"):
        raise _Abort(Suggest(_guidance(op, lex), code="unrecognized"))
    anchor = _phrase_or_abort(rest[1:], op, lex) if rest[1:] else None
    if anchor is None:
        raise _Abort(Suggest(_guidance(op, lex), code="unrecognized"))
    return Command(op, None, ContextKind(rest[0]), anchor)


def apply_clarification(partial: PartialCommand, answer: str,
                        lexicon: Optional[NormalizerLexicon] = None
                        ) -> NormalizationResult:
    """Fill the one missing slot of a clarified command with the answer."""
    lex = lexicon or default_lexicon()
    tokens = answer.lower().split()
    if not tokens:
        raise ValueError("clarification answer must be non-empty")
    if tokens[0] in OP_KEYWORDS:
        return Suggest(
            (Suggestion(answer, "this starts a new command; it was not used "
                                "as an answer to the question"),),
            code=RESTART_CODE,
        )
    trace = partial.trace + (Repair(RepairCategory.MISSING_ARGS, tuple(tokens)),)
    try:
        if partial.op is OperationKind.CHOOSE:
            number = parse_number_token(tokens[0]) if len(tokens) == 1 else None
            if number is None or number < 1:
                return Suggest(_guidance(OperationKind.CHOOSE, lex), code="invalid_number")
            command = Command(partial.op, Number(number))
        else:
            filled = Phrase(tuple(tokens))
            if partial.missing is ComponentKind.CMD_ARG:
                command = Command(partial.op, filled, partial.ctx, partial.ctx_arg)
            else:
                command = Command(partial.op, partial.cmd_arg, partial.ctx, filled)
    except InvalidCommandError:
        return Suggest(_guidance(partial.op, lex), code="unusable_answer")
    return Corrected(command, confidence(trace, lex), trace)


class NormalizerBackend(Protocol):
    """Request/response contract shared by the rule pipeline and any
    external model backend: utterance + selection + recent history in,
    NormalizationResult out."""

    def normalize(self, utterance: str, ctx: SelectionContext,
                  history: Sequence[str]) -> NormalizationResult: ...

    def clarify(self, partial: PartialCommand, answer: str) -> NormalizationResult: ...


class RuleBackend:
    """The deterministic rule pipeline behind the backend contract."""

    def __init__(self, lexicon: Optional[NormalizerLexicon] = None):
        self.lexicon = lexicon or default_lexicon()

    def normalize(self, utterance: str, ctx: SelectionContext = SelectionContext(),
                  history: Sequence[str] = ()) -> NormalizationResult:
        return normalize(utterance, ctx, history, self.lexicon)

    def clarify(self, partial: PartialCommand, answer: str) -> NormalizationResult:
        return apply_clarification(partial, answer, self.lexicon)
