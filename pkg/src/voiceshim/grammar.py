"""Fixed-format command grammar for legacy voice text editing.

Every instruction the legacy interface accepts is an instance of a four-slot
template: an operation keyword, an optional operation argument, an optional
context keyword, and an optional context argument.  Only six slot
combinations are valid; everything else is rejected verbatim by the legacy
side, which is exactly the behaviour the simulator reproduces.

The canonical surface form uses uppercase keywords and lowercase argument
words (``INSERT at home BEFORE tonight``).  That string form is the
interchange format between the normalizer, the simulator, the dataset
generator, and the evaluation harness.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Union


class ComponentKind(enum.Enum):
    """The four slots of the command template."""

    CMD = "cmd"
    CMD_ARG = "cmd_arg"
    CTX = "ctx"
    CTX_ARG = "ctx_arg"


class OperationKind(enum.Enum):
    SELECT = "select"
    CHOOSE = "choose"
    DELETE = "delete"
    INSERT = "insert"
    REPLACE = "replace"
    CORRECT = "correct"
    UNDO = "undo"
    REDO = "redo"
    MOVE = "move"


class ContextKind(enum.Enum):
    BEFORE = "before"
    AFTER = "after"
    WITH = "with"
    PREVIOUS = "previous"
    NEXT = "next"


class Direction(enum.Enum):
    PREVIOUS = "previous"
    NEXT = "next"


@dataclass(frozen=True)
class Phrase:
    """A non-empty run of plain words taken verbatim from the text."""

    words: tuple[str, ...]

    def __post_init__(self) -> None:
        words = tuple(w.lower() for w in self.words)
        if not words:
            raise InvalidCommandError("phrase must contain at least one word")
        object.__setattr__(self, "words", words)
        for i, w in enumerate(words):
            bad = _reserved_reason(w)
            if bad:
                raise InvalidCommandError(f"{bad} {w!r} not allowed inside a phrase")
            if i + 1 < len(words) and (w, words[i + 1]) in NOISE_BIGRAMS:
                raise InvalidCommandError(
                    f"filler {w!r} {words[i + 1]!r} not allowed inside a phrase")

    def text(self) -> str:
        return " ".join(self.words)


@dataclass(frozen=True)
class Number:
    """A 1-based candidate index."""

    value: int

    def __post_init__(self) -> None:
        if self.value < 1:
            raise InvalidCommandError("candidate numbers start at 1")


@dataclass(frozen=True)
class Deictic:
    """The literal argument ``that``, resolved by the legacy side against
    its current selection."""


@dataclass(frozen=True)
class RelativeWord:
    """The single-word relative target of ``SELECT PREVIOUS/NEXT WORD``."""

    direction: Direction


ArgValue = Union[Phrase, Number, Deictic, RelativeWord]


class TemplateId(enum.Enum):
    """The six valid slot combinations.

    Two of them (bare keyword, bare argument) belong to command families
    outside this package's scope (mode switching, free dictation); they are
    still enumerated so combination validity can be checked exhaustively.
    """

    CMD_ONLY = "cmd"
    ARG_ONLY = "cmd_arg"
    CMD_AND_ARG = "cmd cmd_arg"
    CMD_AND_CTX = "cmd ctx"
    CMD_CTX_CTXARG = "cmd ctx ctx_arg"
    FULL = "cmd cmd_arg ctx ctx_arg"

    @property
    def components(self) -> frozenset[ComponentKind]:
        return frozenset(ComponentKind(part) for part in self.value.split())


_VALID_COMBINATIONS = {t.components: t for t in TemplateId}


def combination_template(present: Iterable[ComponentKind]) -> Optional[TemplateId]:
    """Return the template matching a slot-presence subset, or None.

    Of the 16 possible subsets exactly 6 are valid.
    """
    return _VALID_COMBINATIONS.get(frozenset(present))


class ParseErrorKind(enum.Enum):
    UNKNOWN_KEYWORD = "unknown_keyword"
    MISSING_COMPONENT = "missing_component"
    EXTRA_TOKENS = "extra_tokens"
    INVALID_NUMBER = "invalid_number"


class InvalidCommandError(ValueError):
    """Raised when constructing a command that matches no valid template."""


class ParseError(ValueError):
    """Raised when an utterance does not match the canonical grammar.

    ``position`` is the index of the offending token; ``token`` is the token
    itself (None when a component is missing at the end of the utterance).
    """

    def __init__(self, kind: ParseErrorKind, position: int, token: Optional[str], detail: str):
        self.kind = kind
        self.position = position
        self.token = token
        self.detail = detail
        where = f"token {position}" + (f" {token!r}" if token is not None else "")
        super().__init__(f"{kind.value} at {where}: {detail}")


OP_KEYWORDS = {op.value: op for op in OperationKind}
CTX_KEYWORDS = ("before", "after", "with")

# Words with grammatical meaning that therefore cannot occur inside a plain
# phrase argument: context keywords, the deictic family, the relative-form
# terminal "word", and numerals (the choose command's domain).
DEICTIC_RESERVED = frozenset({"that", "this", "it", "selected"})
TERMINAL_RESERVED = frozenset({"word"})
_NUMBER_WORDS = {
    "zero": 0, "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11,
    "twelve": 12, "thirteen": 13, "fourteen": 14, "fifteen": 15,
    "sixteen": 16, "seventeen": 17, "eighteen": 18, "nineteen": 19,
    "twenty": 20,
}
# Noise markers the fixed grammar reserves; natural utterances use them as
# meta words ("select the word apple"), never as phrase content.
NOISE_BIGRAMS = (("the", "word"), ("the", "words"), ("the", "phrase"))


def parse_number_token(token: str) -> Optional[int]:
    """Parse a digit string or a small number word; None when not numeric."""
    if token.isdigit():
        return int(token)
    return _NUMBER_WORDS.get(token)


def _reserved_reason(word: str) -> Optional[str]:
    if word in CTX_KEYWORDS:
        return "context keyword"
    if word in DEICTIC_RESERVED:
        return "deictic word"
    if word in TERMINAL_RESERVED:
        return "grammar terminal"
    if parse_number_token(word) is not None:
        return "numeral"
    return None


@dataclass(frozen=True)
class Command:
    """A validated instance of one of the six templates."""

    op: OperationKind
    cmd_arg: Optional[ArgValue] = None
    ctx: Optional[ContextKind] = None
    ctx_arg: Optional[ArgValue] = None

    def __post_init__(self) -> None:
        op = self.op
        arg, ctx, ctx_arg = self.cmd_arg, self.ctx, self.ctx_arg
        if op in (OperationKind.SELECT,):
            if not isinstance(arg, (Phrase, RelativeWord)) or ctx or ctx_arg:
                raise InvalidCommandError("select takes a phrase or previous/next word")
            if isinstance(arg, Phrase) and arg.words[0] in ("previous", "next"):
                raise InvalidCommandError("select phrases may not start with previous/next")
        elif op is OperationKind.CHOOSE:
            if not isinstance(arg, Number) or ctx or ctx_arg:
                raise InvalidCommandError("choose takes a single candidate number")
        elif op in (OperationKind.DELETE, OperationKind.CORRECT):
            if not isinstance(arg, (Phrase, Deictic)) or ctx or ctx_arg:
                raise InvalidCommandError(f"{op.value} takes a phrase or 'that'")
        elif op in (OperationKind.UNDO, OperationKind.REDO):
            if not isinstance(arg, Deictic) or ctx or ctx_arg:
                raise InvalidCommandError(f"{op.value} takes only 'that'")
        elif op is OperationKind.INSERT:
            if (not isinstance(arg, Phrase) or ctx not in (ContextKind.BEFORE, ContextKind.AFTER)
                    or not isinstance(ctx_arg, Phrase)):
                raise InvalidCommandError("insert takes <phrase> before/after <phrase>")
        elif op is OperationKind.REPLACE:
            if (not isinstance(arg, Phrase) or ctx is not ContextKind.WITH
                    or not isinstance(ctx_arg, Phrase)):
                raise InvalidCommandError("replace takes <phrase> with <phrase>")
        elif op is OperationKind.MOVE:
            if (arg is not None or ctx not in (ContextKind.BEFORE, ContextKind.AFTER)
                    or not isinstance(ctx_arg, Phrase)):
                raise InvalidCommandError("move takes before/after <phrase>")

    def present_components(self) -> frozenset[ComponentKind]:
        present = {ComponentKind.CMD}
        if isinstance(self.cmd_arg, RelativeWord):
            # Relative selection is surface-wise a context, not an argument.
            present.add(ComponentKind.CTX)
            return frozenset(present)
        if self.cmd_arg is not None:
            present.add(ComponentKind.CMD_ARG)
        if self.ctx is not None:
            present.add(ComponentKind.CTX)
        if self.ctx_arg is not None:
            present.add(ComponentKind.CTX_ARG)
        return frozenset(present)


def template_of(cmd: Command) -> TemplateId:
    """Map a valid command to the unique combination it instantiates."""
    template = combination_template(cmd.present_components())
    assert template is not None, "valid commands always match a template"
    return template


def _check_phrase_span(tokens: list[str], start: int, end: int, slot: str) -> Phrase:
    """Validate tokens[start:end] as a phrase argument, raising with the
    position of the first offending token."""
    if start >= end:
        raise ParseError(ParseErrorKind.MISSING_COMPONENT, start, None, f"expected a {slot}")
    span = tokens[start:end]
    for i, word in enumerate(span):
        reason = _reserved_reason(word)
        if reason == "numeral":
            raise ParseError(ParseErrorKind.INVALID_NUMBER, start + i, word,
                             f"numeral cannot appear in a {slot}")
        if reason:
            raise ParseError(ParseErrorKind.EXTRA_TOKENS, start + i, word,
                             f"{reason} cannot appear in a {slot}")
        if i + 1 < len(span) and (word, span[i + 1]) in NOISE_BIGRAMS:
            raise ParseError(ParseErrorKind.EXTRA_TOKENS, start + i, word,
                             f"filler words cannot appear in a {slot}")
    return Phrase(tuple(span))


def _find_ctx(tokens: list[str], start: int, wanted: tuple[str, ...]) -> Optional[int]:
    for i in range(start, len(tokens)):
        if tokens[i] in wanted:
            return i
    return None


def parse_canonical(text: str) -> Command:
    """Parse an utterance against the fixed grammar.

    Keywords match case-insensitively; argument words are normalized to
    lowercase.  Raises ParseError naming the offending token position when
    the token sequence matches no template exactly.
    """
    tokens = text.lower().split()
    if not tokens:
        raise ParseError(ParseErrorKind.MISSING_COMPONENT, 0, None, "empty utterance")
    op = OP_KEYWORDS.get(tokens[0])
    if op is None:
        raise ParseError(ParseErrorKind.UNKNOWN_KEYWORD, 0, tokens[0],
                         "not an operation keyword")
    rest_start = 1
    n = len(tokens)

    if op is OperationKind.SELECT:
        if n >= 2 and tokens[1] in ("previous", "next"):
            if n < 3 or tokens[2] != "word":
                raise ParseError(ParseErrorKind.MISSING_COMPONENT, 2,
                                 tokens[2] if n > 2 else None,
                                 f"expected 'word' after '{tokens[1]}'")
            if n > 3:
                raise ParseError(ParseErrorKind.EXTRA_TOKENS, 3, tokens[3],
                                 "nothing may follow previous/next word")
            return Command(op, RelativeWord(Direction(tokens[1])))
        return Command(op, _check_phrase_span(tokens, rest_start, n, "target phrase"))

    if op is OperationKind.CHOOSE:
        if n < 2:
            raise ParseError(ParseErrorKind.MISSING_COMPONENT, 1, None,
                             "expected a candidate number")
        value = parse_number_token(tokens[1])
        if value is None:
            raise ParseError(ParseErrorKind.INVALID_NUMBER, 1, tokens[1],
                             "expected a candidate number")
        if value < 1:
            raise ParseError(ParseErrorKind.INVALID_NUMBER, 1, tokens[1],
                             "candidate numbers start at 1")
        if n > 2:
            raise ParseError(ParseErrorKind.EXTRA_TOKENS, 2, tokens[2],
                             "nothing may follow the number")
        return Command(op, Number(value))

    if op in (OperationKind.DELETE, OperationKind.CORRECT):
        if n >= 2 and tokens[1] == "that":
            if n > 2:
                raise ParseError(ParseErrorKind.EXTRA_TOKENS, 2, tokens[2],
                                 "nothing may follow 'that'")
            return Command(op, Deictic())
        return Command(op, _check_phrase_span(tokens, rest_start, n, "target phrase"))

    if op in (OperationKind.UNDO, OperationKind.REDO):
        if n < 2:
            raise ParseError(ParseErrorKind.MISSING_COMPONENT, 1, None, "expected 'that'")
        if tokens[1] != "that":
            raise ParseError(ParseErrorKind.UNKNOWN_KEYWORD, 1, tokens[1],
                             f"{op.value} takes only 'that'")
        if n > 2:
            raise ParseError(ParseErrorKind.EXTRA_TOKENS, 2, tokens[2],
                             "nothing may follow 'that'")
        return Command(op, Deictic())

    if op is OperationKind.INSERT:
        split = _find_ctx(tokens, rest_start, ("before", "after"))
        if split is None:
            raise ParseError(ParseErrorKind.MISSING_COMPONENT, n, None,
                             "expected 'before' or 'after'")
        content = _check_phrase_span(tokens, rest_start, split, "phrase to insert")
        anchor = _check_phrase_span(tokens, split + 1, n, "anchor phrase")
        return Command(op, content, ContextKind(tokens[split]), anchor)

    if op is OperationKind.REPLACE:
        split = _find_ctx(tokens, rest_start, ("with",))
        if split is None:
            raise ParseError(ParseErrorKind.MISSING_COMPONENT, n, None, "expected 'with'")
        target = _check_phrase_span(tokens, rest_start, split, "target phrase")
        replacement = _check_phrase_span(tokens, split + 1, n, "replacement phrase")
        return Command(op, target, ContextKind.WITH, replacement)

    assert op is OperationKind.MOVE
    if n < 2 or tokens[1] not in ("before", "after"):
        raise ParseError(ParseErrorKind.UNKNOWN_KEYWORD, 1, tokens[1] if n > 1 else None,
                         "expected 'before' or 'after'")
    anchor = _check_phrase_span(tokens, 2, n, "anchor phrase")
    return Command(op, None, ContextKind(tokens[1]), anchor)


def serialize_canonical(cmd: Command) -> str:
    """Render a command in canonical surface form.

    Operation and context keywords are uppercase; argument words stay
    lowercase.  ``parse_canonical(serialize_canonical(c)) == c``.
    """
    parts = [cmd.op.value.upper()]
    if isinstance(cmd.cmd_arg, RelativeWord):
        parts.append(cmd.cmd_arg.direction.value.upper())
        parts.append("WORD")
        return " ".join(parts)
    if isinstance(cmd.cmd_arg, Phrase):
        parts.append(cmd.cmd_arg.text())
    elif isinstance(cmd.cmd_arg, Number):
        parts.append(str(cmd.cmd_arg.value))
    elif isinstance(cmd.cmd_arg, Deictic):
        parts.append("THAT")
    if cmd.ctx is not None:
        parts.append(cmd.ctx.value.upper())
    if isinstance(cmd.ctx_arg, Phrase):
        parts.append(cmd.ctx_arg.text())
    return " ".join(parts)
