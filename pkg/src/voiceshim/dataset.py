"""Deterministic synthetic dataset of (utterance, canonical command) pairs.

Each sample pairs a pipe-delimited input (utterance, current selection,
optional clarification turn) with the canonical command the adapter should
produce, or with an ``ASK:`` question when the utterance is missing exactly
one required piece.  Operation mix, error-category mix, and the share of
samples carrying a selection follow configurable weight tables; realized
counts track weight*size within one sample via largest-remainder
apportionment.

Utterances are built from the same lexicon the rule normalizer consults, so
the pairs are consistent by construction, except for a small documented
quota of deliberately out-of-lexicon verb synonyms that no rule backend can
resolve.  Identical seeds produce byte-identical files.
"""

from __future__ import annotations

import enum
import json
import math
import os
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .grammar import (
    Command,
    ContextKind,
    Deictic,
    Direction,
    Number,
    OperationKind,
    Phrase,
    RelativeWord,
    parse_canonical,
    serialize_canonical,
)
from .lexicon import NormalizerLexicon, RepairCategory, default_lexicon


class ErrorCategory(enum.Enum):
    EXACT = "exact"
    SWAP_CMD = "swap_cmd"
    SUBSTITUTE_CMD = "substitute_cmd"
    SUBSTITUTE_CTX = "substitute_ctx"
    SUBSTITUTE_TEMPLATE = "substitute_template"
    IGNORE_DEICTIC = "ignore_deictic"
    ADD_DEICTIC = "add_deictic"
    MISSING_ARGS = "missing_args"
    NATURAL_UTTERANCE = "natural_utterance"

    @property
    def repair(self) -> Optional[RepairCategory]:
        if self is ErrorCategory.EXACT:
            return None
        return RepairCategory(self.value)


class InfeasibleSpecError(ValueError):
    pass


class DatasetFormatError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")


# --- sample and codec -----------------------------------------------------


@dataclass(frozen=True)
class DatasetSample:
    utterance: str
    selection: Optional[str]            # lowercase phrase or None
    expected: str                       # canonical command or "ASK: ..."
    op: OperationKind
    error_category: ErrorCategory
    clarification_question: Optional[str] = None
    clarification_answer: Optional[str] = None

    def __post_init__(self) -> None:
        if (self.clarification_question is None) != (self.clarification_answer is None):
            raise DatasetFormatError("clarification question and answer come together")
        if not self.expected.startswith("ASK: "):
            parse_canonical(self.expected)

    @property
    def has_selection(self) -> bool:
        return self.selection is not None

    @property
    def is_follow_up(self) -> bool:
        return self.clarification_question is not None


def encode_input(sample: DatasetSample) -> str:
    """Exact field order: utterance, selection, then the clarification turn."""
    out = f"{sample.utterance} | selection:"
    if sample.selection:
        out += f" {sample.selection}"
    if sample.is_follow_up:
        out += (f" | CLARIFICATION QUESTION: {sample.clarification_question}"
                f" | CLARIFICATION: {sample.clarification_answer}")
    return out


def decode_input(text: str) -> tuple[str, Optional[str], Optional[str], Optional[str]]:
    """Inverse of encode_input: (utterance, selection, question, answer)."""
    parts = [p.strip() for p in text.split(" | ")]
    if len(parts) < 2 or not parts[1].startswith("selection:"):
        raise DatasetFormatError(f"malformed input field: {text!r}")
    utterance = parts[0]
    selection = parts[1][len("selection:"):].strip() or None
    question = answer = None
    for part in parts[2:]:
        if part.startswith("CLARIFICATION QUESTION:"):
            question = part[len("CLARIFICATION QUESTION:"):].strip()
        elif part.startswith("CLARIFICATION:"):
            answer = part[len("CLARIFICATION:"):].strip()
        else:
            raise DatasetFormatError(f"unexpected input field: {part!r}")
    return utterance, selection, question, answer


def sample_to_json(sample: DatasetSample) -> dict:
    return {
        "input": encode_input(sample),
        "output": sample.expected,
        "op": sample.op.value,
        "error_category": sample.error_category.value,
        "has_selection": sample.has_selection,
    }


def sample_from_json(obj: Mapping, line: Optional[int] = None) -> DatasetSample:
    try:
        utterance, selection, question, answer = decode_input(obj["input"])
        if "has_selection" in obj and bool(obj["has_selection"]) != (selection is not None):
            raise DatasetFormatError(
                "has_selection flag contradicts the encoded input", line)
        return DatasetSample(
            utterance=utterance,
            selection=selection,
            expected=obj["output"],
            op=OperationKind(obj["op"]),
            error_category=ErrorCategory(obj["error_category"]),
            clarification_question=question,
            clarification_answer=answer,
        )
    except DatasetFormatError:
        raise
    except (KeyError, ValueError) as err:
        raise DatasetFormatError(f"malformed sample: {err}", line) from err


def write_jsonl(samples: Iterable[DatasetSample], path: Union[str, Path]) -> None:
    """UTF-8, LF line endings, stable key order."""
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as handle:
        for sample in samples:
            handle.write(json.dumps(sample_to_json(sample),
                                    ensure_ascii=False, sort_keys=True) + "\n")
    os.replace(tmp, path)


def read_jsonl(path: Union[str, Path]) -> list[DatasetSample]:
    samples = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as err:
                raise DatasetFormatError(f"invalid JSON: {err}", line_no) from err
            samples.append(sample_from_json(obj, line_no))
    return samples


# --- distribution specification -------------------------------------------


OP_ORDER = (OperationKind.CORRECT, OperationKind.SELECT, OperationKind.REPLACE,
            OperationKind.INSERT, OperationKind.DELETE, OperationKind.CHOOSE,
            OperationKind.UNDO, OperationKind.REDO)

ERROR_ORDER = (ErrorCategory.SUBSTITUTE_TEMPLATE, ErrorCategory.NATURAL_UTTERANCE,
               ErrorCategory.SUBSTITUTE_CMD, ErrorCategory.MISSING_ARGS,
               ErrorCategory.ADD_DEICTIC, ErrorCategory.IGNORE_DEICTIC,
               ErrorCategory.SUBSTITUTE_CTX, ErrorCategory.SWAP_CMD)


def _normalized(weights: Mapping, label: str) -> dict:
    total = sum(weights.values())
    if total <= 0:
        raise InfeasibleSpecError(f"{label} weights must be positive")
    return {k: v / total for k, v in weights.items()}


# Survey shares of the eight operations; the published percentages carry a
# rounding residue (sum 100.1), normalized away here.
DEFAULT_OP_WEIGHTS = _normalized({
    OperationKind.CORRECT: 0.185,
    OperationKind.SELECT: 0.176,
    OperationKind.REPLACE: 0.169,
    OperationKind.INSERT: 0.137,
    OperationKind.DELETE: 0.116,
    OperationKind.CHOOSE: 0.098,
    OperationKind.UNDO: 0.062,
    OperationKind.REDO: 0.058,
}, "operation")

# Error-category shares over the incorrect subset.  The published mix
# reports missing/added-deictic/ignored-deictic as one merged 15.4% bucket;
# its interior is split evenly here.  Verb swaps have no published share of
# their own and default to zero.
_MERGED_DEICTIC = 0.154
MERGED_DEICTIC_GROUP = (ErrorCategory.MISSING_ARGS, ErrorCategory.ADD_DEICTIC,
                        ErrorCategory.IGNORE_DEICTIC)
DEFAULT_ERROR_WEIGHTS = {
    ErrorCategory.SUBSTITUTE_TEMPLATE: 0.385,
    ErrorCategory.NATURAL_UTTERANCE: 0.213,
    ErrorCategory.SUBSTITUTE_CMD: 0.177,
    ErrorCategory.MISSING_ARGS: _MERGED_DEICTIC / 3,
    ErrorCategory.ADD_DEICTIC: _MERGED_DEICTIC / 3,
    ErrorCategory.IGNORE_DEICTIC: _MERGED_DEICTIC / 3,
    ErrorCategory.SUBSTITUTE_CTX: 0.071,
    ErrorCategory.SWAP_CMD: 0.0,
}

DEFAULT_SELECTION_RATIO = 0.292
DEFAULT_EXACT_SHARE = 0.20
DEFAULT_SIZES = (1000, 400, 150)
DEFAULT_QUOTA = 0.03

# Verb synonyms deliberately left out of the rule lexicon so evaluation has
# irreducible misses; a sample is a quota sample iff its utterance starts
# with one of these.
OUT_OF_LEXICON_SYNONYMS = {
    "transform": OperationKind.REPLACE,
    "rectify": OperationKind.CORRECT,
    "append": OperationKind.INSERT,
    "discard": OperationKind.DELETE,
}


@dataclass(frozen=True)
class DistributionSpec:
    op_weights: Mapping[OperationKind, float] = field(
        default_factory=lambda: dict(DEFAULT_OP_WEIGHTS))
    error_weights: Mapping[ErrorCategory, float] = field(
        default_factory=lambda: dict(DEFAULT_ERROR_WEIGHTS))
    exact_share: float = DEFAULT_EXACT_SHARE
    selection_ratio: float = DEFAULT_SELECTION_RATIO
    sizes: tuple[int, int, int] = DEFAULT_SIZES
    seed: int = 0
    out_of_lexicon_quota: float = DEFAULT_QUOTA

    def __post_init__(self) -> None:
        if abs(sum(self.op_weights.values()) - 1.0) > 1e-9:
            raise InfeasibleSpecError("operation weights must sum to 1")
        if abs(sum(self.error_weights.values()) - 1.0) > 1e-9:
            raise InfeasibleSpecError("error-category weights must sum to 1")
        if any(w < 0 for w in self.op_weights.values()):
            raise InfeasibleSpecError("operation weights must be non-negative")
        if any(w < 0 for w in self.error_weights.values()):
            raise InfeasibleSpecError("error-category weights must be non-negative")
        if ErrorCategory.EXACT in self.error_weights:
            raise InfeasibleSpecError("exact share is configured separately")
        if any(size <= 0 for size in self.sizes):
            raise InfeasibleSpecError("split sizes must be positive")
        if not 0.0 <= self.exact_share <= 1.0:
            raise InfeasibleSpecError("exact share must be within [0, 1]")
        if not 0.0 <= self.selection_ratio <= 1.0:
            raise InfeasibleSpecError("selection ratio must be within [0, 1]")
        if not 0.0 <= self.out_of_lexicon_quota <= 0.05:
            raise InfeasibleSpecError("out-of-lexicon quota is capped at 5%")

    def to_json(self) -> dict:
        return {
            "op_weights": {op.value: w for op, w in self.op_weights.items()},
            "error_weights": {cat.value: w for cat, w in self.error_weights.items()},
            "exact_share": self.exact_share,
            "selection_ratio": self.selection_ratio,
            "sizes": list(self.sizes),
            "seed": self.seed,
            "out_of_lexicon_quota": self.out_of_lexicon_quota,
        }


def largest_remainder(weights: Mapping, total: int, order: Sequence) -> dict:
    """Integer apportionment: floors plus the largest fractional remainders;
    ties broken by the given listing order."""
    quotas = {key: weights.get(key, 0.0) * total for key in order}
    counts = {key: math.floor(q) for key, q in quotas.items()}
    leftover = total - sum(counts.values())
    ranked = sorted(order, key=lambda k: (-(quotas[k] - counts[k]), order.index(k)))
    for key in ranked[:leftover]:
        counts[key] += 1
    return counts


# --- phrase banks and command pools ----------------------------------------

FOOD_WORDS = (
    "apple", "orange", "banana", "pie", "coffee", "sandwich", "salad",
    "cake", "tea", "lunch", "dinner", "pasta", "soup", "bread",
)
TIME_WORDS = (
    "tonight", "tomorrow", "today", "morning", "evening", "noon",
    "monday", "friday", "weekend", "midnight",
)
OFFICE_WORDS = (
    "meeting", "email", "report", "deadline", "agenda", "memo", "budget",
    "printer", "schedule", "invoice", "folder", "calendar", "desk", "laptop",
)
ALL_WORDS = FOOD_WORDS + TIME_WORDS + OFFICE_WORDS
MULTI_PHRASES = (
    "apple pie", "car wreck", "law enforcement", "email address",
    "coffee break", "team meeting", "monthly report", "budget review",
    "lunch break", "staff agenda", "at home", "in the morning",
)

POOL_SIZES = {
    OperationKind.SELECT: 30,   # plus the two relative entries
    OperationKind.CHOOSE: 9,
    OperationKind.DELETE: 23,   # plus THAT
    OperationKind.CORRECT: 27,  # plus THAT
    OperationKind.INSERT: 38,
    OperationKind.REPLACE: 38,
}


def _phrase(text: str) -> Phrase:
    return Phrase(tuple(text.split()))


def build_pools(seed: int) -> dict[OperationKind, tuple[Command, ...]]:
    """A bounded pool of distinct correct commands per operation, so every
    command accumulates several natural-language variations."""
    rng = random.Random(f"{seed}/pools")
    candidates = list(ALL_WORDS) + list(MULTI_PHRASES)

    def draw(k: int) -> list[str]:
        return rng.sample(candidates, k)

    pools: dict[OperationKind, tuple[Command, ...]] = {}
    select = [Command(OperationKind.SELECT, _phrase(p))
              for p in draw(POOL_SIZES[OperationKind.SELECT])]
    select += [Command(OperationKind.SELECT, RelativeWord(Direction.PREVIOUS)),
               Command(OperationKind.SELECT, RelativeWord(Direction.NEXT))]
    pools[OperationKind.SELECT] = tuple(select)
    pools[OperationKind.CHOOSE] = tuple(
        Command(OperationKind.CHOOSE, Number(n))
        for n in range(1, POOL_SIZES[OperationKind.CHOOSE] + 1))
    pools[OperationKind.DELETE] = tuple(
        [Command(OperationKind.DELETE, _phrase(p))
         for p in draw(POOL_SIZES[OperationKind.DELETE])]
        + [Command(OperationKind.DELETE, Deictic())])
    pools[OperationKind.CORRECT] = tuple(
        [Command(OperationKind.CORRECT, _phrase(p))
         for p in draw(POOL_SIZES[OperationKind.CORRECT])]
        + [Command(OperationKind.CORRECT, Deictic())])
    inserts = []
    for i in range(POOL_SIZES[OperationKind.INSERT]):
        content, anchor = draw(2)
        ctx = ContextKind.BEFORE if i % 2 == 0 else ContextKind.AFTER
        inserts.append(Command(OperationKind.INSERT, _phrase(content), ctx,
                               _phrase(anchor)))
    pools[OperationKind.INSERT] = tuple(inserts)
    replaces = []
    for _ in range(POOL_SIZES[OperationKind.REPLACE]):
        target, repl = draw(2)
        replaces.append(Command(OperationKind.REPLACE, _phrase(target),
                                ContextKind.WITH, _phrase(repl)))
    pools[OperationKind.REPLACE] = tuple(replaces)
    pools[OperationKind.UNDO] = (Command(OperationKind.UNDO, Deictic()),)
    pools[OperationKind.REDO] = (Command(OperationKind.REDO, Deictic()),)
    return pools


# --- plan assembly ----------------------------------------------------------


CATEGORY_OPS: dict[ErrorCategory, tuple[OperationKind, ...]] = {
    ErrorCategory.SWAP_CMD: (OperationKind.SELECT, OperationKind.CHOOSE),
    ErrorCategory.SUBSTITUTE_CTX: (OperationKind.SELECT, OperationKind.REPLACE),
    ErrorCategory.ADD_DEICTIC: (OperationKind.INSERT, OperationKind.REPLACE),
    ErrorCategory.MISSING_ARGS: (OperationKind.INSERT, OperationKind.REPLACE),
    ErrorCategory.SUBSTITUTE_CMD: (OperationKind.CORRECT, OperationKind.DELETE,
                                   OperationKind.INSERT, OperationKind.REPLACE),
    ErrorCategory.IGNORE_DEICTIC: (OperationKind.DELETE, OperationKind.CORRECT,
                                   OperationKind.UNDO, OperationKind.REDO),
    ErrorCategory.SUBSTITUTE_TEMPLATE: (OperationKind.INSERT, OperationKind.DELETE,
                                        OperationKind.SELECT, OperationKind.CORRECT,
                                        OperationKind.REPLACE),
    ErrorCategory.NATURAL_UTTERANCE: OP_ORDER,
    ErrorCategory.EXACT: OP_ORDER,
}


@dataclass
class _PlannedSample:
    op: OperationKind
    category: ErrorCategory
    has_selection: bool = False
    follow_up: bool = False
    out_of_lexicon: bool = False


def _fill_table(op_counts: dict, cat_counts: dict) -> dict:
    """Joint (category, op) counts honouring both marginals exactly."""
    remaining = dict(op_counts)
    table: dict[tuple[ErrorCategory, OperationKind], int] = {}
    def restrictiveness(cat):
        listing = list(ERROR_ORDER) + [ErrorCategory.EXACT]
        return (len(CATEGORY_OPS[cat]), cat is ErrorCategory.EXACT,
                listing.index(cat))
    for cat in sorted(cat_counts, key=restrictiveness):
        need = cat_counts[cat]
        ops = [op for op in CATEGORY_OPS[cat] if remaining.get(op, 0) > 0]
        capacity = {op: remaining[op] for op in ops}
        total_cap = sum(capacity.values())
        if need > total_cap:
            raise InfeasibleSpecError(
                f"cannot place {need} {cat.value} samples; only {total_cap} "
                f"compatible operation slots remain")
        if need == 0:
            continue
        weights = {op: capacity[op] / total_cap for op in ops}
        share = largest_remainder(weights, need, ops)
        for op, count in share.items():
            if count > capacity[op]:  # safety net; proportional shares fit caps
                raise InfeasibleSpecError(f"overfilled {op.value} for {cat.value}")
            if count:
                table[(cat, op)] = count
                remaining[op] -= count
    return table


def _category_counts(weights: Mapping[ErrorCategory, float], total: int
                     ) -> dict[ErrorCategory, int]:
    """Hierarchical apportionment: the deictic categories are published as
    one merged bucket, so their sum must track the merged weight within one
    sample; the interior split follows the per-category weights."""
    merged_weight = sum(weights.get(cat, 0.0) for cat in MERGED_DEICTIC_GROUP)
    top_order = [cat for cat in ERROR_ORDER if cat not in MERGED_DEICTIC_GROUP]
    top_weights: dict = {cat: weights.get(cat, 0.0) for cat in top_order}
    merged_key = "merged_deictic"
    top_weights[merged_key] = merged_weight
    order = top_order[:3] + [merged_key] + top_order[3:]
    top_counts = largest_remainder(top_weights, total, order)
    counts = {cat: top_counts[cat] for cat in top_order}
    if merged_weight > 0:
        inner = {cat: weights.get(cat, 0.0) / merged_weight
                 for cat in MERGED_DEICTIC_GROUP}
        counts.update(largest_remainder(inner, top_counts[merged_key],
                                        MERGED_DEICTIC_GROUP))
    else:
        counts.update({cat: 0 for cat in MERGED_DEICTIC_GROUP})
    return counts


def _plan_split(spec: DistributionSpec, size: int, split: str) -> list[_PlannedSample]:
    op_counts = largest_remainder(spec.op_weights, size, OP_ORDER)
    exact_count = largest_remainder(
        {"exact": spec.exact_share, "rest": 1 - spec.exact_share}, size,
        ("exact", "rest"))["exact"]
    cat_counts: dict = _category_counts(spec.error_weights, size - exact_count)
    cat_counts[ErrorCategory.EXACT] = exact_count
    table = _fill_table(op_counts, cat_counts)

    plan: list[_PlannedSample] = []
    listing = list(ERROR_ORDER) + [ErrorCategory.EXACT]
    for cat in listing:
        for op in CATEGORY_OPS[cat]:
            plan.extend(_PlannedSample(op, cat)
                        for _ in range(table.get((cat, op), 0)))

    # Ask-only vs follow-up alternation for missing-argument samples.
    missing_seen = 0
    for planned in plan:
        if planned.category is ErrorCategory.MISSING_ARGS:
            planned.follow_up = missing_seen % 2 == 1
            missing_seen += 1

    # Out-of-lexicon quota comes out of the substituted-verb samples.
    quota = math.floor(spec.out_of_lexicon_quota * size)
    for planned in plan:
        if quota == 0:
            break
        if planned.category is ErrorCategory.SUBSTITUTE_CMD:
            planned.out_of_lexicon = True
            quota -= 1

    # Selection context: reference repairs force one, missing-argument
    # samples force none, the rest fill up to the configured ratio.
    forced_on = [p for p in plan
                 if p.category is ErrorCategory.ADD_DEICTIC
                 or (p.category is ErrorCategory.SUBSTITUTE_TEMPLATE
                     and p.op is OperationKind.INSERT)]
    forced_off = [p for p in plan if p.category is ErrorCategory.MISSING_ARGS]
    for planned in forced_on:
        planned.has_selection = True
    want = largest_remainder({"sel": spec.selection_ratio,
                              "no": 1 - spec.selection_ratio}, size,
                             ("sel", "no"))["sel"]
    want -= len(forced_on)
    if want < 0:
        raise InfeasibleSpecError("selection ratio below the forced minimum")
    constrained = {id(p) for p in forced_on} | {id(p) for p in forced_off}
    free = [p for p in plan if id(p) not in constrained]
    if want > len(free):
        raise InfeasibleSpecError("selection ratio above the feasible maximum")
    stride = random.Random(f"{spec.seed}/{split}/selection")
    for planned in stride.sample(free, want):
        planned.has_selection = True

    order = random.Random(f"{spec.seed}/{split}/order")
    order.shuffle(plan)
    return plan


# --- utterance recipes ------------------------------------------------------


def _reverse_synonyms(lexicon: NormalizerLexicon) -> dict[OperationKind, list[str]]:
    table: dict[OperationKind, list[str]] = {}
    for word, op in lexicon.cmd_synonyms.items():
        table.setdefault(op, []).append(word)
    for words in table.values():
        words.sort()
    return table


def _relative_variants(lexicon: NormalizerLexicon) -> dict[Direction, list[str]]:
    table: dict[Direction, list[str]] = {Direction.PREVIOUS: [], Direction.NEXT: []}
    for variant, canonical in sorted(lexicon.relative_synonyms.items()):
        table[Direction(canonical[0])].append(" ".join(variant))
    return table


class _SampleBuilder:
    def __init__(self, spec: DistributionSpec, lexicon: NormalizerLexicon):
        self.spec = spec
        self.lexicon = lexicon
        self.pools = build_pools(spec.seed)
        self.synonyms = _reverse_synonyms(lexicon)
        self.relative_variants = _relative_variants(lexicon)
        self.fillers = [" ".join(f) for f in lexicon.fillers]
        self._cursor: dict[OperationKind, int] = {}

    def _next_entry(self, op: OperationKind, wants) -> Command:
        pool = self.pools[op]
        start = self._cursor.get(op, 0)
        for offset in range(len(pool)):
            entry = pool[(start + offset) % len(pool)]
            if wants(entry):
                self._cursor[op] = (start + offset + 1) % len(pool)
                return entry
        raise InfeasibleSpecError(f"no pool entry of {op.value} fits the category")

    def build(self, planned: _PlannedSample, rng: random.Random) -> DatasetSample:
        recipe = {
            ErrorCategory.EXACT: self._exact,
            ErrorCategory.NATURAL_UTTERANCE: self._natural,
            ErrorCategory.SWAP_CMD: self._swap,
            ErrorCategory.SUBSTITUTE_CMD: self._substitute_cmd,
            ErrorCategory.SUBSTITUTE_CTX: self._substitute_ctx,
            ErrorCategory.SUBSTITUTE_TEMPLATE: self._substitute_template,
            ErrorCategory.IGNORE_DEICTIC: self._ignore_deictic,
            ErrorCategory.ADD_DEICTIC: self._add_deictic,
            ErrorCategory.MISSING_ARGS: self._missing_args,
        }[planned.category]
        sample = recipe(planned, rng)
        if planned.has_selection and sample.selection is None:
            sample = replace(sample, selection=rng.choice(ALL_WORDS))
        return sample

    # -- helpers

    @staticmethod
    def _is_phrase_entry(entry: Command) -> bool:
        return isinstance(entry.cmd_arg, Phrase)

    @staticmethod
    def _is_deictic_entry(entry: Command) -> bool:
        return isinstance(entry.cmd_arg, Deictic)

    @staticmethod
    def _is_relative_entry(entry: Command) -> bool:
        return isinstance(entry.cmd_arg, RelativeWord)

    def _sample_of(self, planned, utterance, entry, selection=None,
                   expected=None, question=None, answer=None) -> DatasetSample:
        return DatasetSample(
            utterance=utterance,
            selection=selection,
            expected=expected if expected is not None else serialize_canonical(entry),
            op=planned.op,
            error_category=planned.category,
            clarification_question=question,
            clarification_answer=answer,
        )

    # -- recipes

    def _exact(self, planned, rng):
        entry = self._next_entry(planned.op, lambda e: True)
        return self._sample_of(planned, serialize_canonical(entry).lower(), entry)

    def _natural(self, planned, rng):
        entry = self._next_entry(planned.op, lambda e: True)
        base = serialize_canonical(entry).lower()
        tokens = base.split()
        styles = ["filler"]
        if self._is_deictic_entry(entry):
            styles.append("deictic_variant")
        if isinstance(entry.cmd_arg, Phrase) and len(entry.cmd_arg.words) == 1:
            styles.append("the_word")
        if isinstance(entry.cmd_arg, Number):
            styles.append("number_prefix")
        if self._is_relative_entry(entry):
            styles.append("article")
        style = rng.choice(styles)
        if style == "deictic_variant":
            surface = rng.choice(["this", "it", "the selected word"])
            utterance = f"{tokens[0]} {surface}"
        elif style == "the_word":
            rest = " ".join(tokens[2:])
            utterance = f"{tokens[0]} the word {tokens[1]}" + (f" {rest}" if rest else "")
        elif style == "number_prefix":
            utterance = f"{tokens[0]} {self.lexicon.number_prefix} {tokens[1]}"
        elif style == "article":
            utterance = f"{tokens[0]} the {tokens[1]} {tokens[2]}"
        else:
            utterance = f"{rng.choice(self.fillers)} {base}"
        return self._sample_of(planned, utterance, entry)

    def _swap(self, planned, rng):
        if planned.op is OperationKind.CHOOSE:
            entry = self._next_entry(planned.op, lambda e: True)
            assert isinstance(entry.cmd_arg, Number)
            utterance = f"select {entry.cmd_arg.value}"
        else:
            entry = self._next_entry(planned.op, self._is_phrase_entry)
            utterance = f"choose {entry.cmd_arg.text()}"
        return self._sample_of(planned, utterance, entry)

    def _substitute_cmd(self, planned, rng):
        entry = self._next_entry(planned.op, self._is_phrase_entry)
        canonical = serialize_canonical(entry).lower()
        rest = canonical.split(" ", 1)[1]
        if planned.out_of_lexicon:
            verbs = sorted(w for w, op in OUT_OF_LEXICON_SYNONYMS.items()
                           if op is planned.op)
            verb = rng.choice(verbs)
        else:
            verb = rng.choice(self.synonyms[planned.op])
        return self._sample_of(planned, f"{verb} {rest}", entry)

    def _substitute_ctx(self, planned, rng):
        if planned.op is OperationKind.SELECT:
            entry = self._next_entry(planned.op, self._is_relative_entry)
            assert isinstance(entry.cmd_arg, RelativeWord)
            variant = rng.choice(self.relative_variants[entry.cmd_arg.direction])
            return self._sample_of(planned, f"select {variant}", entry)
        entry = self._next_entry(planned.op, lambda e: True)
        connective = rng.choice(sorted(self.lexicon.connective_synonyms))
        assert isinstance(entry.cmd_arg, Phrase) and isinstance(entry.ctx_arg, Phrase)
        utterance = f"replace {entry.cmd_arg.text()} {connective} {entry.ctx_arg.text()}"
        return self._sample_of(planned, utterance, entry)

    def _substitute_template(self, planned, rng):
        if planned.op is OperationKind.INSERT:
            entry = self._next_entry(
                planned.op, lambda e: e.ctx is ContextKind.BEFORE)
            assert isinstance(entry.cmd_arg, Phrase) and isinstance(entry.ctx_arg, Phrase)
            return self._sample_of(planned, f"insert {entry.cmd_arg.text()}", entry,
                                   selection=entry.ctx_arg.text())
        if planned.op is OperationKind.REPLACE:
            entry = self._next_entry(planned.op, lambda e: True)
            assert isinstance(entry.cmd_arg, Phrase)
            target = entry.cmd_arg.text()
            question = self.lexicon.question("replace_missing_replacement", target=target)
            return self._sample_of(planned, f"replace {target}", entry,
                                   expected=f"ASK: {question}")
        entry = self._next_entry(planned.op, self._is_phrase_entry)
        ctx = rng.choice(["before", "after"])
        other = rng.choice(ALL_WORDS)
        utterance = f"{planned.op.value} {entry.cmd_arg.text()} {ctx} {other}"
        return self._sample_of(planned, utterance, entry)

    def _ignore_deictic(self, planned, rng):
        entry = self._next_entry(planned.op, self._is_deictic_entry)
        return self._sample_of(planned, planned.op.value, entry)

    def _add_deictic(self, planned, rng):
        surface = rng.choice(["that", "that", "this"])
        if planned.op is OperationKind.INSERT:
            entry = self._next_entry(planned.op, lambda e: True)
            assert isinstance(entry.cmd_arg, Phrase) and isinstance(entry.ctx_arg, Phrase)
            assert entry.ctx is not None
            utterance = f"insert {entry.cmd_arg.text()} {entry.ctx.value} {surface}"
            return self._sample_of(planned, utterance, entry,
                                   selection=entry.ctx_arg.text())
        entry = self._next_entry(planned.op, lambda e: True)
        assert isinstance(entry.cmd_arg, Phrase) and isinstance(entry.ctx_arg, Phrase)
        utterance = f"replace {surface} with {entry.ctx_arg.text()}"
        return self._sample_of(planned, utterance, entry,
                               selection=entry.cmd_arg.text())

    def _missing_args(self, planned, rng):
        if planned.op is OperationKind.INSERT:
            entry = self._next_entry(planned.op, lambda e: True)
            assert isinstance(entry.cmd_arg, Phrase) and isinstance(entry.ctx_arg, Phrase)
            assert entry.ctx is not None
            style_anchor_missing = rng.random() < 0.5
            if style_anchor_missing:
                utterance = f"insert {entry.cmd_arg.text()} {entry.ctx.value}"
                question = self.lexicon.question(
                    "insert_missing_anchor", content=entry.cmd_arg.text(),
                    ctx=entry.ctx.value)
                answer = entry.ctx_arg.text()
            else:
                utterance = f"insert {entry.ctx.value} {entry.ctx_arg.text()}"
                question = self.lexicon.question(
                    "insert_missing_content", ctx=entry.ctx.value,
                    anchor=entry.ctx_arg.text())
                answer = entry.cmd_arg.text()
        else:
            entry = self._next_entry(planned.op, lambda e: True)
            assert isinstance(entry.cmd_arg, Phrase) and isinstance(entry.ctx_arg, Phrase)
            style_target_missing = rng.random() < 0.5
            if style_target_missing:
                utterance = f"replace with {entry.ctx_arg.text()}"
                question = self.lexicon.question(
                    "replace_missing_target", replacement=entry.ctx_arg.text())
                answer = entry.cmd_arg.text()
            else:
                utterance = f"replace {entry.cmd_arg.text()} with"
                question = self.lexicon.question(
                    "replace_missing_replacement", target=entry.cmd_arg.text())
                answer = entry.ctx_arg.text()
        if planned.follow_up:
            return self._sample_of(planned, utterance, entry,
                                   question=question, answer=answer)
        return self._sample_of(planned, utterance, entry,
                               expected=f"ASK: {question}")


# --- generation -------------------------------------------------------------


SPLIT_NAMES = ("train", "val", "test")


def generate(spec: Optional[DistributionSpec] = None,
             lexicon: Optional[NormalizerLexicon] = None
             ) -> tuple[list[DatasetSample], list[DatasetSample], list[DatasetSample]]:
    """Three sample lists (train, val, test); same spec => same output."""
    spec = spec or DistributionSpec()
    lexicon = lexicon or default_lexicon()
    builder = _SampleBuilder(spec, lexicon)
    splits = []
    for name, size in zip(SPLIT_NAMES, spec.sizes):
        plan = _plan_split(spec, size, name)
        samples = []
        for index, planned in enumerate(plan):
            rng = random.Random(f"{spec.seed}/{name}/{index}")
            samples.append(builder.build(planned, rng))
        splits.append(samples)
    return splits[0], splits[1], splits[2]


def is_out_of_lexicon(sample: DatasetSample) -> bool:
    """Quota samples are identified by their out-of-lexicon leading verb."""
    head = sample.utterance.split(" ", 1)[0]
    return head in OUT_OF_LEXICON_SYNONYMS


def write_splits(out_dir: Union[str, Path], spec: Optional[DistributionSpec] = None,
                 lexicon: Optional[NormalizerLexicon] = None) -> dict:
    """Write train/val/test JSONL plus a manifest; returns the manifest."""
    spec = spec or DistributionSpec()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    splits = generate(spec, lexicon)
    manifest = {"spec": spec.to_json(), "files": {}}
    for name, samples in zip(SPLIT_NAMES, splits):
        path = out / f"{name}.jsonl"
        write_jsonl(samples, path)
        manifest["files"][name] = {"path": path.name, "count": len(samples)}
    manifest_path = out / "manifest.json"
    tmp = manifest_path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                   encoding="utf-8")
    os.replace(tmp, manifest_path)
    return manifest
