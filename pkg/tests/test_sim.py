"""Simulator behaviour: edits, disambiguation, undo/redo, snapshots."""

import random

import pytest

from voiceshim.fixtures import INSERTION_TRACES
from voiceshim.sim import (
    Applied,
    Failed,
    FailReason,
    PendingCorrections,
    PendingDisambiguation,
    PendingTargets,
    SimState,
    Span,
    buffer_text,
    execute,
    export_snapshot,
    import_snapshot,
    init,
)

WORDS = ["alpha", "bravo", "delta", "echo", "foxtrot", "golf", "hotel",
         "india", "juliet", "kilo", "lima", "mike", "november", "oscar"]
# "delta" is a plain buffer word here, not a keyword: commands are parsed
# before matching, so buffer content never collides with the grammar.


def run(state, *commands):
    outcomes = []
    for c in commands:
        state, outcome = execute(state, c)
        outcomes.append(outcome)
    return state, outcomes


class TestInit:
    def test_init_splits_words(self):
        state = init("was is it a car wreck")
        assert state.buffer == ("was", "is", "it", "a", "car", "wreck")
        assert state.selection is None

    def test_empty_buffer_commands_fail(self):
        state = init("")
        for text in ("SELECT apple", "DELETE apple", "INSERT a BEFORE b",
                     "REPLACE a WITH b", "CORRECT apple"):
            new, outcome = execute(state, text)
            assert outcome == Failed(FailReason.TARGET_NOT_FOUND)
            assert new == state
        _, undo = execute(state, "UNDO THAT")
        assert undo == Failed(FailReason.NOTHING_TO_UNDO)
        _, redo = execute(state, "REDO THAT")
        assert redo == Failed(FailReason.NOTHING_TO_REDO)

    def test_init_idempotent(self):
        assert init("a b c") == init("a b c")


class TestBasicEdits:
    def test_insert_before(self):
        state = init("the enforcement has responsibility")
        state, outcome = execute(state, "INSERT law BEFORE enforcement")
        assert isinstance(outcome, Applied)
        assert buffer_text(state) == "the law enforcement has responsibility"

    def test_insert_after(self):
        state = init("was it a car")
        state, _ = execute(state, "INSERT wreck AFTER car")
        assert buffer_text(state) == "was it a car wreck"

    def test_delete_phrase(self):
        state = init("was is it a car wreck")
        state, _ = execute(state, "DELETE is")
        assert buffer_text(state) == "was it a car wreck"

    def test_replace_phrase(self):
        state = init("every employee had an internet email address")
        state, _ = execute(state, "REPLACE internet WITH internal")
        assert buffer_text(state) == "every employee had an internal email address"

    def test_unrecognized_keeps_state(self):
        state = init("a b c")
        new, outcome = execute(state, "remove apple")
        assert outcome == Failed(FailReason.UNRECOGNIZED)
        assert new == state

    def test_edits_are_case_insensitive_on_targets(self):
        state = init("The Enforcement has Responsibility")
        state, outcome = execute(state, "DELETE enforcement")
        assert isinstance(outcome, Applied)
        assert buffer_text(state) == "The has Responsibility"


class TestSelection:
    def test_select_unique(self):
        state = init("the law enforcement")
        state, outcome = execute(state, "SELECT law")
        assert isinstance(outcome, Applied)
        assert state.selection == Span(1, 2)

    def test_select_relative(self):
        state = init("the law enforcement has responsibility")
        state, _ = execute(state, "SELECT law")
        state, _ = execute(state, "SELECT NEXT WORD")
        assert state.selection == Span(2, 3)
        state, _ = execute(state, "SELECT PREVIOUS WORD")
        assert state.selection == Span(1, 2)

    def test_select_relative_at_edges(self):
        state = init("alpha bravo")
        state, _ = execute(state, "SELECT alpha")
        _, outcome = execute(state, "SELECT PREVIOUS WORD")
        assert outcome == Failed(FailReason.TARGET_NOT_FOUND)

    def test_delete_that_uses_selection(self):
        state = init("was is it a car wreck")
        state, _ = execute(state, "SELECT is")
        state, outcome = execute(state, "DELETE THAT")
        assert isinstance(outcome, Applied)
        assert buffer_text(state) == "was it a car wreck"
        assert state.selection is None

    def test_delete_that_without_selection(self):
        state = init("a b c")
        _, outcome = execute(state, "DELETE THAT")
        assert outcome == Failed(FailReason.NO_SELECTION)

    def test_explicit_edit_ignores_selection(self):
        # Selection does not persist through explicit-phrase commands.
        state = init("alpha bravo alpha")
        state, _ = execute(state, "SELECT bravo")
        state, outcome = execute(state, "SELECT alpha")
        assert isinstance(outcome, PendingDisambiguation)
        assert len(outcome.options) == 2


class TestDisambiguation:
    def test_numbering_is_dense_and_left_to_right(self):
        state = init("apple pie apple tart apple")
        state, outcome = execute(state, "SELECT apple")
        assert isinstance(outcome, PendingDisambiguation)
        assert [o.number for o in outcome.options] == [1, 2, 3]
        assert [o.start for o in outcome.options] == [0, 2, 4]

    def test_choose_resolves_select(self):
        state = init("apple pie apple tart apple")
        state, _ = execute(state, "SELECT apple")
        state, outcome = execute(state, "CHOOSE 2")
        assert isinstance(outcome, Applied)
        assert state.selection == Span(2, 3)

    def test_choose_without_pending(self):
        state = init("a b c")
        _, outcome = execute(state, "CHOOSE 1")
        assert outcome == Failed(FailReason.TARGET_NOT_FOUND)

    def test_choose_out_of_range(self):
        state = init("apple pie apple")
        state, _ = execute(state, "SELECT apple")
        new, outcome = execute(state, "CHOOSE 5")
        assert outcome == Failed(FailReason.TARGET_NOT_FOUND)
        assert new == state

    def test_insert_disambiguates_anchor(self):
        state = init("the law enforcement has responsibility "
                     "the enforcement has responsibility")
        state, outcome = execute(state, "INSERT law BEFORE enforcement")
        assert isinstance(outcome, PendingDisambiguation)
        state, outcome = execute(state, "CHOOSE 2")
        assert isinstance(outcome, Applied)
        assert buffer_text(state) == ("the law enforcement has responsibility "
                                      "the law enforcement has responsibility")

    def test_new_command_supersedes_pending(self):
        state = init("apple pie apple")
        state, _ = execute(state, "SELECT apple")
        assert isinstance(state.pending, PendingTargets)
        state, outcome = execute(state, "DELETE pie")
        assert isinstance(outcome, Applied)
        assert state.pending is None

    def test_failed_command_leaves_pending(self):
        state = init("apple pie apple")
        state, _ = execute(state, "SELECT apple")
        new, outcome = execute(state, "DELETE zebra")
        assert outcome == Failed(FailReason.TARGET_NOT_FOUND)
        assert new == state


class TestCorrection:
    LEX = {"freqwuent": ["frequent"], "cintrol": ["control", "central"]}

    def test_unique_candidate_applies(self):
        state = init("there were freqwuent shortages", self.LEX)
        state, outcome = execute(state, "CORRECT freqwuent")
        assert isinstance(outcome, Applied)
        assert buffer_text(state) == "there were frequent shortages"

    def test_multiple_candidates_disambiguate_words(self):
        state = init("cintrol room", self.LEX)
        state, outcome = execute(state, "CORRECT cintrol")
        assert isinstance(outcome, PendingDisambiguation)
        assert [o.label for o in outcome.options] == ["control", "central"]
        assert isinstance(state.pending, PendingCorrections)
        state, outcome = execute(state, "CHOOSE 2")
        assert buffer_text(state) == "central room"

    def test_correct_that(self):
        state = init("cintrol room", self.LEX)
        state, _ = execute(state, "SELECT cintrol")
        state, outcome = execute(state, "CORRECT THAT")
        assert isinstance(outcome, PendingDisambiguation)

    def test_no_candidates(self):
        state = init("alpha bravo", self.LEX)
        _, outcome = execute(state, "CORRECT alpha")
        assert outcome == Failed(FailReason.TARGET_NOT_FOUND)


class TestMove:
    def test_move_before(self):
        state = init("the law enforcement")
        state, outcome = execute(state, "MOVE BEFORE law")
        assert isinstance(outcome, Applied)
        assert state.cursor == 1
        assert buffer_text(state) == "the law enforcement"

    def test_move_after(self):
        state = init("the law enforcement")
        state, _ = execute(state, "MOVE AFTER law")
        assert state.cursor == 2

    def test_move_disambiguates_duplicates(self):
        state = init("apple pie apple")
        state, outcome = execute(state, "MOVE AFTER apple")
        assert isinstance(outcome, PendingDisambiguation)
        state, outcome = execute(state, "CHOOSE 2")
        assert isinstance(outcome, Applied)
        assert state.cursor == 3
        assert state.buffer == ("apple", "pie", "apple")

    def test_move_keeps_selection(self):
        state = init("apple pie")
        state, _ = execute(state, "SELECT pie")
        state, _ = execute(state, "MOVE BEFORE apple")
        assert state.selection == Span(1, 2)


class TestUndoRedo:
    def test_undo_redo_round_trip(self):
        state = init("was is it a car wreck")
        state, _ = execute(state, "SELECT is")
        before = (state.buffer, state.selection)
        state, _ = execute(state, "DELETE THAT")
        state, outcome = execute(state, "UNDO THAT")
        assert isinstance(outcome, Applied)
        assert (state.buffer, state.selection) == before
        state, _ = execute(state, "REDO THAT")
        assert buffer_text(state) == "was it a car wreck"

    def test_new_edit_clears_redo(self):
        state = init("a b c")
        state, _ = execute(state, "DELETE b")
        state, _ = execute(state, "UNDO THAT")
        state, _ = execute(state, "DELETE c")
        _, outcome = execute(state, "REDO THAT")
        assert outcome == Failed(FailReason.NOTHING_TO_REDO)

    def test_select_is_not_undoable(self):
        state = init("a b c")
        state, _ = execute(state, "SELECT b")
        _, outcome = execute(state, "UNDO THAT")
        assert outcome == Failed(FailReason.NOTHING_TO_UNDO)


class TestInsertionTraces:
    @pytest.mark.parametrize("trace", INSERTION_TRACES, ids=lambda t: t.name)
    def test_trace_reaches_target(self, trace):
        state = init(trace.start_text)
        for command in trace.commands:
            state, outcome = execute(state, command)
            assert not isinstance(outcome, Failed), (command, outcome)
        assert buffer_text(state) == trace.target_text

    def test_optimal_traces_present(self):
        assert any(t.optimal for t in INSERTION_TRACES)


class TestSnapshot:
    def test_round_trip(self):
        state = init("apple pie apple", {"pie": ["tart"]})
        state, _ = execute(state, "SELECT apple")
        snap = export_snapshot(state)
        restored = import_snapshot(snap, {"pie": ["tart"]})
        assert restored.buffer == state.buffer
        assert restored.selection == state.selection
        assert restored.pending == state.pending
        assert restored.cursor == state.cursor

    def test_plain_state(self):
        state = init("a b c")
        snap = export_snapshot(state)
        assert "pending: -" in snap
        assert import_snapshot(snap).buffer == ("a", "b", "c")

    def test_corrections_pending_round_trip(self):
        state = init("cintrol room", {"cintrol": ["control", "central"]})
        state, _ = execute(state, "CORRECT cintrol")
        restored = import_snapshot(export_snapshot(state),
                                   {"cintrol": ["control", "central"]})
        assert restored.pending == state.pending

    def test_malformed_snapshots_rejected(self):
        from voiceshim.sim import SnapshotFormatError
        for text in ("just words\n",
                     "buffer: a b\nselection: -\npending: bogus 1:2 | x",
                     "buffer: a b\npending: -\n"):
            with pytest.raises(SnapshotFormatError):
                import_snapshot(text)


def splice_oracle(text: str, command: str) -> str:
    """Independent string-level model for unique-target edits."""
    tokens = command.split()
    op = tokens[0].upper()
    padded = f" {text} "

    def find(phrase):
        return padded.index(f" {phrase} ")

    if op == "DELETE":
        phrase = " ".join(tokens[1:])
        at = find(phrase)
        padded = padded[:at] + padded[at + len(phrase) + 1:]
    elif op == "INSERT":
        upper = command.split()
        ctx = "BEFORE" if "BEFORE" in upper else "AFTER"
        i = upper.index(ctx)
        content, anchor = " ".join(tokens[1:i]), " ".join(tokens[i + 1:])
        at = find(anchor)
        if ctx == "BEFORE":
            padded = padded[:at] + " " + content + padded[at:]
        else:
            end = at + len(anchor) + 1
            padded = padded[:end] + " " + content + padded[end:]
    elif op == "REPLACE":
        upper = command.split()
        i = upper.index("WITH")
        target, repl = " ".join(tokens[1:i]), " ".join(tokens[i + 1:])
        at = find(target)
        padded = padded[:at + 1] + repl + padded[at + len(target) + 1:]
    else:
        raise AssertionError(op)
    return " ".join(padded.split())


class TestOracle:
    N = 300  # the 1,000-case run lives in the acceptance suite

    def test_matches_string_splice_oracle(self):
        rng = random.Random(11)
        for _ in range(self.N):
            buffer, command = random_unique_case(rng)
            state = init(buffer)
            state, outcome = execute(state, command)
            assert isinstance(outcome, Applied), (buffer, command, outcome)
            assert buffer_text(state) == splice_oracle(buffer, command)


def random_unique_case(rng: random.Random) -> tuple[str, str]:
    """A random buffer (<= 30 words) plus an edit whose target is unique."""
    n = rng.randint(1, 30)
    buffer = rng.choices(WORDS, k=n)
    start = rng.randrange(n)
    length = min(rng.randint(1, 2), n - start)
    target = buffer[start:start + length]
    # Re-mint the target span with fresh unique words so it occurs exactly once.
    unique = [f"zz{rng.randrange(10 ** 6)}x{i}" for i in range(length)]
    buffer[start:start + length] = unique
    target = unique
    op = rng.choice(["DELETE", "INSERT", "REPLACE"])
    phrase = " ".join(rng.choices(WORDS, k=rng.randint(1, 2)))
    anchor = " ".join(target)
    if op == "DELETE":
        command = f"DELETE {anchor}"
    elif op == "INSERT":
        ctx = rng.choice(["BEFORE", "AFTER"])
        command = f"INSERT {phrase} {ctx} {anchor}"
    else:
        command = f"REPLACE {anchor} WITH {phrase}"
    return " ".join(buffer), command
