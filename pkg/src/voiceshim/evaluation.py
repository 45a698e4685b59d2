"""Metrics and experiments for the command adapter.

Two sample-level metrics: exact match on canonicalized token sequences, and
a token-level longest-common-subsequence F-score.  ``evaluate`` runs a
backend over dataset samples, including the two-turn clarification
protocol: the asked question is scored as its own pass/fail column, then
the recorded answer is applied and only the final command feeds the
primary exact-match number.

``replay_compare`` reproduces the failure-analysis experiment in
direction: the same timed token streams run once against the legacy
segmenter wired straight into the simulator, and once through the full
shim (extended window, rule normalizer, identity transport), counting
timeout, syntax, and recognition failures per condition.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Protocol, Sequence

from . import sim
from .dataset import DatasetSample, encode_input
from .fixtures import REPAIR_GOLDEN
from .grammar import serialize_canonical
from .lexicon import NormalizerLexicon
from .normalizer import (
    Clarify,
    Corrected,
    PassThrough,
    RuleBackend,
    SelectionContext,
    Suggest,
)
from .segmenter import (
    Discarded,
    SegmenterConfig,
    UtteranceComplete,
    flush,
    new_segmenter,
    push_token,
)

# --- metrics ----------------------------------------------------------------


def exact_match(pred: str, gold: str) -> bool:
    """Equality of canonical-case-normalized token sequences."""
    return pred.casefold().split() == gold.casefold().split()


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        row = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                row.append(prev[j - 1] + 1)
            else:
                row.append(max(prev[j], row[-1]))
        prev = row
    return prev[-1]


def rouge_l(pred: str, gold: str) -> float:
    """LCS F-score over casefolded tokens (harmonic mean, beta = 1)."""
    pred_tokens = pred.casefold().split()
    gold_tokens = gold.casefold().split()
    if not pred_tokens or not gold_tokens:
        return 0.0
    lcs = _lcs_length(pred_tokens, gold_tokens)
    precision = lcs / len(pred_tokens)
    recall = lcs / len(gold_tokens)
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


# --- evaluation backends ----------------------------------------------------


@dataclass
class BackendReply:
    text: str
    partial: object = None  # opaque continuation for a clarification turn


class EvalBackend(Protocol):
    def respond(self, utterance: str, selection: Optional[str]) -> BackendReply: ...

    def answer(self, reply: BackendReply, answer_text: str) -> BackendReply: ...


class RuleEvalBackend:
    """The rule normalizer behind the evaluation interface."""

    def __init__(self, lexicon: Optional[NormalizerLexicon] = None):
        self._backend = RuleBackend(lexicon)

    @staticmethod
    def _to_reply(result) -> BackendReply:
        if isinstance(result, (Corrected, PassThrough)):
            return BackendReply(serialize_canonical(result.command))
        if isinstance(result, Clarify):
            return BackendReply(f"ASK: {result.question}", partial=result.partial)
        assert isinstance(result, Suggest)
        first = result.suggestions[0].text if result.suggestions else ""
        return BackendReply(f"SUGGEST: {first}".strip())

    def respond(self, utterance: str, selection: Optional[str]) -> BackendReply:
        result = self._backend.normalize(utterance, SelectionContext.of(selection), ())
        return self._to_reply(result)

    def answer(self, reply: BackendReply, answer_text: str) -> BackendReply:
        if reply.partial is None:
            return reply
        return self._to_reply(self._backend.clarify(reply.partial, answer_text))


class EchoBackend:
    """Returns its input verbatim; the do-nothing baseline."""

    def respond(self, utterance: str, selection: Optional[str]) -> BackendReply:
        return BackendReply(utterance)

    def answer(self, reply: BackendReply, answer_text: str) -> BackendReply:
        return BackendReply(answer_text)


# --- evaluation -------------------------------------------------------------


@dataclass
class CategoryStats:
    correct: int = 0
    total: int = 0

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0


@dataclass
class FailureRecord:
    index: int
    input: str
    prediction: str
    gold: str


@dataclass
class EvalReport:
    exact_match: float
    rouge_l: float
    total: int
    per_op: dict[str, CategoryStats]
    per_category: dict[str, CategoryStats]
    failures: list[FailureRecord]
    question_accuracy: Optional[float]
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "exact_match": self.exact_match,
            "rouge_l": self.rouge_l,
            "total": self.total,
            "per_op": {k: {"correct": v.correct, "total": v.total,
                           "accuracy": v.accuracy}
                       for k, v in sorted(self.per_op.items())},
            "per_category": {k: {"correct": v.correct, "total": v.total,
                                 "accuracy": v.accuracy}
                             for k, v in sorted(self.per_category.items())},
            "failures": [vars(f) for f in self.failures],
            "question_accuracy": self.question_accuracy,
            "metadata": self.metadata,
        }

    def format_table(self) -> str:
        lines = [
            f"samples        {self.total}",
            f"exact match    {self.exact_match:.4f}",
            f"rouge-l        {self.rouge_l:.4f}",
        ]
        if self.question_accuracy is not None:
            lines.append(f"questions      {self.question_accuracy:.4f}")
        lines.append("")
        lines.append("per operation")
        for name, stats in sorted(self.per_op.items()):
            lines.append(f"  {name:<12} {stats.correct:>4}/{stats.total:<4} "
                         f"{stats.accuracy:.3f}")
        lines.append("per error category")
        for name, stats in sorted(self.per_category.items()):
            lines.append(f"  {name:<20} {stats.correct:>4}/{stats.total:<4} "
                         f"{stats.accuracy:.3f}")
        return "\n".join(lines)


def evaluate(backend: EvalBackend, samples: Iterable[DatasetSample]) -> EvalReport:
    """Score a backend; backend errors are recorded, never raised."""
    per_op: dict[str, CategoryStats] = {}
    per_category: dict[str, CategoryStats] = {}
    failures: list[FailureRecord] = []
    em_count = 0
    rouge_total = 0.0
    question_total = question_ok = 0
    samples = list(samples)
    for index, sample in enumerate(samples):
        try:
            reply = backend.respond(sample.utterance, sample.selection)
            if sample.is_follow_up:
                question_total += 1
                expected_question = f"ASK: {sample.clarification_question}"
                if exact_match(reply.text, expected_question):
                    question_ok += 1
                reply = backend.answer(reply, sample.clarification_answer)
            prediction = reply.text
        except Exception as err:  # backend bugs become scored failures
            prediction = f"BACKEND ERROR: {err}"
        matched = exact_match(prediction, sample.expected)
        em_count += matched
        rouge_total += rouge_l(prediction, sample.expected)
        op_stats = per_op.setdefault(sample.op.value, CategoryStats())
        cat_stats = per_category.setdefault(sample.error_category.value, CategoryStats())
        op_stats.total += 1
        cat_stats.total += 1
        if matched:
            op_stats.correct += 1
            cat_stats.correct += 1
        else:
            failures.append(FailureRecord(index, encode_input(sample),
                                          prediction, sample.expected))
    total = len(samples)
    return EvalReport(
        exact_match=em_count / total if total else 0.0,
        rouge_l=rouge_total / total if total else 0.0,
        total=total,
        per_op=per_op,
        per_category=per_category,
        failures=failures,
        question_accuracy=(question_ok / question_total) if question_total else None,
        metadata={"rouge_beta": 1.0, "case_insensitive": True},
    )


# --- replay experiment -------------------------------------------------------


@dataclass(frozen=True)
class ReplayCase:
    """One utterance played against a prepared editor state.

    ``setup`` commands run directly on the simulator before the measured
    utterance, establishing selection, pending candidates, or undo history.
    ``timing`` optionally fixes the inter-token gaps in milliseconds (one
    per gap); without it, gaps are drawn from the seeded jitter model.
    """

    name: str
    utterance: str
    buffer: str
    setup: tuple[str, ...] = ()
    timing: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        gaps = len(self.utterance.split()) - 1
        if self.timing is not None and len(self.timing) != gaps:
            raise ValueError(f"{self.name!r} needs {gaps} gap timings")


@dataclass(frozen=True)
class ReplayConfig:
    seed: int = 0
    jitter_min_ms: int = 200
    jitter_max_ms: int = 2500
    legacy_window_ms: int = 1500
    shim_window_ms: int = 3000
    lexicon: Optional[NormalizerLexicon] = None

    def __post_init__(self) -> None:
        if not 0 <= self.jitter_min_ms <= self.jitter_max_ms:
            raise ValueError("jitter range must satisfy 0 <= min <= max")


@dataclass
class ConditionStats:
    commands: int = 0
    timeouts: int = 0
    syntax: int = 0
    recognition: int = 0
    clarifications: int = 0
    successes: int = 0

    @property
    def total_failures(self) -> int:
        return self.timeouts + self.syntax + self.recognition

    def to_json(self) -> dict:
        return {
            "commands": self.commands,
            "timeouts": self.timeouts,
            "syntax": self.syntax,
            "recognition": self.recognition,
            "clarifications": self.clarifications,
            "successes": self.successes,
            "total_failures": self.total_failures,
        }


@dataclass
class FailureReport:
    legacy: ConditionStats
    shimmed: ConditionStats
    cases: int = 0

    def to_json(self) -> dict:
        return {"cases": self.cases, "legacy": self.legacy.to_json(),
                "shimmed": self.shimmed.to_json()}

    def format_table(self) -> str:
        rows = [("condition", "timeouts", "syntax", "recognition", "failed", "ok")]
        for name, stats in (("legacy", self.legacy), ("shimmed", self.shimmed)):
            rows.append((name, str(stats.timeouts), str(stats.syntax),
                         str(stats.recognition), str(stats.total_failures),
                         str(stats.successes)))
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths))
                         for row in rows)


DEFAULT_CORRECTIONS: Mapping[str, tuple[str, ...]] = {
    "meeting": ("meetings",),
    "freqwuent": ("frequent",),
}


def golden_replay_corpus() -> list[ReplayCase]:
    """The sixteen primary incorrect commands, each given an editor state in
    which its corrected form succeeds."""
    contexts = {
        "select 3": ("apple pie apple tart apple", ("SELECT apple",)),
        "choose meeting": ("team meeting tomorrow", ()),
        "add at home before tonight": ("we should meet tonight", ()),
        "fix meeting": ("the meeting today", ()),
        "select left word": ("the meeting today", ("SELECT today",)),
        "replace apple to orange": ("apple pie", ()),
        "insert law": ("the enforcement has responsibility", ("SELECT enforcement",)),
        "delete apple before pie": ("apple pie", ()),
        "delete": ("was is it a car wreck", ("SELECT is",)),
        "undo": ("was is it a car wreck", ("DELETE is",)),
        "insert law before that": ("the enforcement has responsibility",
                                   ("SELECT enforcement",)),
        "replace that with orange": ("apple pie", ("SELECT apple",)),
        "insert law before": ("the enforcement has responsibility",
                              ("SELECT enforcement",)),
        "replace with orange": ("apple pie", ("SELECT apple",)),
        "choose number 3": ("apple pie apple tart apple", ("SELECT apple",)),
        "correct the selected word": ("there were freqwuent shortages",
                                      ("SELECT freqwuent",)),
    }
    corpus = []
    for case in REPAIR_GOLDEN:
        if case.variant:
            continue
        buffer, setup = contexts[case.utterance]
        corpus.append(ReplayCase(case.utterance, case.utterance, buffer, setup))
    return corpus


def _prepare_sim(case: ReplayCase) -> sim.SimState:
    state = sim.init(case.buffer, DEFAULT_CORRECTIONS)
    for command in case.setup:
        state, outcome = sim.execute(state, command)
        if isinstance(outcome, sim.Failed):
            raise ValueError(f"setup command {command!r} failed for {case.name!r}")
    return state


def _timed_tokens(case: ReplayCase, cfg: ReplayConfig,
                  index: int) -> list[tuple[str, int]]:
    rng = random.Random(f"{cfg.seed}/case/{index}")
    at = 0
    timed = []
    for i, token in enumerate(case.utterance.split()):
        timed.append((token, at))
        if case.timing is not None and i < len(case.timing):
            at += case.timing[i]
        else:
            at += rng.randint(cfg.jitter_min_ms, cfg.jitter_max_ms)
    return timed


def _classify(stats: ConditionStats, outcome: sim.Outcome) -> None:
    if isinstance(outcome, sim.Failed):
        if outcome.reason is sim.FailReason.UNRECOGNIZED:
            stats.syntax += 1
        else:
            stats.recognition += 1
    else:
        stats.successes += 1


def replay_compare(corpus: Sequence[ReplayCase],
                   config: Optional[ReplayConfig] = None) -> FailureReport:
    """Play every case through both conditions with identical token timing."""
    cfg = config or ReplayConfig()
    if not corpus:
        raise ValueError("corpus must be non-empty")
    legacy = ConditionStats()
    shimmed = ConditionStats()
    backend = RuleBackend(cfg.lexicon)

    for index, case in enumerate(corpus):
        timed = _timed_tokens(case, cfg, index)

        # Condition A: legacy segmenter straight into the simulator.
        state = _prepare_sim(case)
        seg = new_segmenter(SegmenterConfig.legacy(cfg.legacy_window_ms))
        events = []
        for token, at in timed:
            seg, evs = push_token(seg, token, at)
            events.extend(evs)
        seg, evs = flush(seg, timed[-1][1])
        events.extend(evs)
        for event in events:
            if isinstance(event, Discarded):
                legacy.commands += 1
                legacy.timeouts += 1
            elif isinstance(event, UtteranceComplete) and event.tokens:
                legacy.commands += 1
                state, outcome = sim.execute(state, " ".join(event.tokens))
                _classify(legacy, outcome)

        # Condition B: extended window plus the rule adapter.
        state = _prepare_sim(case)
        seg = new_segmenter(SegmenterConfig.shim(cfg.shim_window_ms))
        events = []
        for token, at in timed:
            seg, evs = push_token(seg, token, at)
            events.extend(evs)
        seg, evs = flush(seg, timed[-1][1])
        events.extend(evs)
        selection = None
        if state.selection is not None:
            selection = " ".join(
                state.buffer[state.selection.start:state.selection.end])
        for event in events:
            if isinstance(event, Discarded):
                shimmed.commands += 1
                shimmed.timeouts += 1
            elif isinstance(event, UtteranceComplete) and event.tokens:
                shimmed.commands += 1
                result = backend.normalize(" ".join(event.tokens),
                                           SelectionContext.of(selection), ())
                if isinstance(result, (Corrected, PassThrough)):
                    state, outcome = sim.execute(
                        state, serialize_canonical(result.command))
                    _classify(shimmed, outcome)
                elif isinstance(result, Clarify):
                    shimmed.clarifications += 1
                else:
                    shimmed.syntax += 1

    return FailureReport(legacy=legacy, shimmed=shimmed, cases=len(corpus))
