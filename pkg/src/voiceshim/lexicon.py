"""Loading of the normalizer's rule lexicon.

Everything the rule pipeline consults lives in one keyed plain-text file
(fillers, synonyms, deictic vocabulary, noise markers, confidence
penalties, clarification wording), so behaviour can be audited and extended
without a rebuild.  ``NormalizerLexicon.default()`` reads the copy shipped
with the package; ``load()`` reads any compatible file.
"""

from __future__ import annotations

import configparser
import enum
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional, Union

from .grammar import OperationKind


class RepairCategory(enum.Enum):
    """The eight ways spoken commands deviate from the fixed grammar."""

    SWAP_CMD = "swap_cmd"
    SUBSTITUTE_CMD = "substitute_cmd"
    SUBSTITUTE_CTX = "substitute_ctx"
    SUBSTITUTE_TEMPLATE = "substitute_template"
    IGNORE_DEICTIC = "ignore_deictic"
    ADD_DEICTIC = "add_deictic"
    MISSING_ARGS = "missing_args"
    NATURAL_UTTERANCE = "natural_utterance"


def _csv(value: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in value.split(",") if part.strip())


@dataclass(frozen=True)
class NormalizerLexicon:
    fillers: tuple[tuple[str, ...], ...]
    cmd_synonyms: Mapping[str, OperationKind]
    relative_synonyms: Mapping[tuple[str, ...], tuple[str, ...]]
    connective_synonyms: tuple[str, ...]
    deictic_words: frozenset[str]
    deictic_phrases: tuple[tuple[str, ...], ...]
    noise_phrases: tuple[tuple[str, ...], ...]
    number_prefix: str
    article: str
    penalties: Mapping[RepairCategory, int]
    clarifications: Mapping[str, str]
    auto_apply_threshold: int

    def penalty(self, category: RepairCategory) -> int:
        return self.penalties.get(category, 0)

    def question(self, key: str, **slots: str) -> str:
        return self.clarifications[key].format(**slots)

    @classmethod
    def load(cls, source: Union[str, Path]) -> "NormalizerLexicon":
        parser = configparser.ConfigParser(inline_comment_prefixes=(";",))
        text = Path(source).read_text(encoding="utf-8")
        parser.read_string(text)
        return cls._from_parser(parser)

    @classmethod
    def loads(cls, text: str) -> "NormalizerLexicon":
        parser = configparser.ConfigParser(inline_comment_prefixes=(";",))
        parser.read_string(text)
        return cls._from_parser(parser)

    @classmethod
    def default(cls) -> "NormalizerLexicon":
        text = resources.files("voiceshim.data").joinpath("lexicon.ini").read_text("utf-8")
        return cls.loads(text)

    @classmethod
    def _from_parser(cls, p: configparser.ConfigParser) -> "NormalizerLexicon":
        fillers = tuple(
            tuple(phrase.split()) for phrase in _csv(p.get("fillers", "phrases", fallback=""))
        )
        cmd_synonyms = {
            key: OperationKind(value.strip())
            for key, value in p.items("command_synonyms")
        } if p.has_section("command_synonyms") else {}
        relative = {
            tuple(key.split()): tuple(value.strip().split())
            for key, value in p.items("relative_synonyms")
        } if p.has_section("relative_synonyms") else {}
        connectives = tuple(
            key for key, value in p.items("connective_synonyms")
        ) if p.has_section("connective_synonyms") else ()
        deictic_words = frozenset(_csv(p.get("deictic", "words", fallback="")))
        deictic_phrases = tuple(
            tuple(phrase.split()) for phrase in _csv(p.get("deictic", "phrases", fallback=""))
        )
        noise_phrases = tuple(
            tuple(phrase.split()) for phrase in _csv(p.get("noise", "phrases", fallback=""))
        )
        penalties = {
            category: p.getint("penalties", category.value, fallback=0)
            for category in RepairCategory
        }
        clarifications = dict(p.items("clarifications")) if p.has_section("clarifications") else {}
        return cls(
            fillers=tuple(sorted(fillers, key=len, reverse=True)),
            cmd_synonyms=cmd_synonyms,
            relative_synonyms=relative,
            connective_synonyms=connectives,
            deictic_words=deictic_words,
            deictic_phrases=tuple(sorted(deictic_phrases, key=len, reverse=True)),
            noise_phrases=noise_phrases,
            number_prefix=p.get("noise", "number_prefix", fallback="number"),
            article=p.get("noise", "article", fallback="the"),
            penalties=penalties,
            clarifications=clarifications,
            auto_apply_threshold=p.getint("general", "auto_apply_threshold", fallback=70),
        )


_DEFAULT: Optional[NormalizerLexicon] = None


def default_lexicon() -> NormalizerLexicon:
    """The packaged lexicon, loaded once."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = NormalizerLexicon.default()
    return _DEFAULT
