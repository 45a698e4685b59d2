"""Replayable fixtures observed in real correction sessions.

The insertion traces reproduce the classic "add a missing word" task: the
erroneous sentence drops one word ("the enforcement has responsibility")
and each trace is one command sequence a speaker actually used to reach the
corrected text.  The starred optimal sequence does it in a single insert;
the longer ones show the select-first habit whose selection the legacy
interface then ignores, forcing a second disambiguation.

The duplicated variant embeds the erroneous sentence after an already
correct copy, the way study prompts pad targets with distractor sentences,
so the insert command has to be disambiguated with a numbered choose.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .lexicon import RepairCategory


@dataclass(frozen=True)
class RepairCase:
    """One observed incorrect command with its canonical correction.

    ``selection`` is the editor selection that has to exist for reference-
    and missing-argument repairs to resolve.  ``variant`` marks alternate
    phrasings of a primary case.
    """

    utterance: str
    selection: Optional[str]
    expected: str
    category: RepairCategory
    variant: bool = False


REPAIR_GOLDEN: tuple[RepairCase, ...] = (
    RepairCase("select 3", None, "CHOOSE 3", RepairCategory.SWAP_CMD),
    RepairCase("choose meeting", None, "SELECT meeting", RepairCategory.SWAP_CMD),
    RepairCase("add at home before tonight", None, "INSERT at home BEFORE tonight",
               RepairCategory.SUBSTITUTE_CMD),
    RepairCase("fix meeting", None, "CORRECT meeting", RepairCategory.SUBSTITUTE_CMD),
    RepairCase("select left word", None, "SELECT PREVIOUS WORD",
               RepairCategory.SUBSTITUTE_CTX),
    RepairCase("replace apple to orange", None, "REPLACE apple WITH orange",
               RepairCategory.SUBSTITUTE_CTX),
    RepairCase("insert law", "enforcement", "INSERT law BEFORE enforcement",
               RepairCategory.SUBSTITUTE_TEMPLATE),
    RepairCase("delete apple before pie", None, "DELETE apple",
               RepairCategory.SUBSTITUTE_TEMPLATE),
    RepairCase("delete", None, "DELETE THAT", RepairCategory.IGNORE_DEICTIC),
    RepairCase("undo", None, "UNDO THAT", RepairCategory.IGNORE_DEICTIC),
    RepairCase("insert law before that", "enforcement",
               "INSERT law BEFORE enforcement", RepairCategory.ADD_DEICTIC),
    RepairCase("replace that with orange", "apple", "REPLACE apple WITH orange",
               RepairCategory.ADD_DEICTIC),
    RepairCase("insert law before", "enforcement", "INSERT law BEFORE enforcement",
               RepairCategory.MISSING_ARGS),
    RepairCase("replace with orange", "apple", "REPLACE apple WITH orange",
               RepairCategory.MISSING_ARGS),
    RepairCase("choose number 3", None, "CHOOSE 3", RepairCategory.NATURAL_UTTERANCE),
    RepairCase("correct the selected word", None, "CORRECT THAT",
               RepairCategory.NATURAL_UTTERANCE),
    # Alternate phrasings of the same repair families.
    RepairCase("remove apple", None, "DELETE apple",
               RepairCategory.SUBSTITUTE_CMD, variant=True),
    RepairCase("select word before", None, "SELECT PREVIOUS WORD",
               RepairCategory.SUBSTITUTE_CTX, variant=True),
    RepairCase("select right word", None, "SELECT NEXT WORD",
               RepairCategory.SUBSTITUTE_CTX, variant=True),
    RepairCase("select word after", None, "SELECT NEXT WORD",
               RepairCategory.SUBSTITUTE_CTX, variant=True),
    RepairCase("replace apple using orange", None, "REPLACE apple WITH orange",
               RepairCategory.SUBSTITUTE_CTX, variant=True),
    RepairCase("redo", None, "REDO THAT", RepairCategory.IGNORE_DEICTIC, variant=True),
)


@dataclass(frozen=True)
class InsertionTrace:
    name: str
    start_text: str
    commands: tuple[str, ...]
    target_text: str
    optimal: bool = False


INSERTION_TRACES: tuple[InsertionTrace, ...] = (
    InsertionTrace(
        name="direct insert",
        start_text="the enforcement has responsibility",
        commands=("INSERT law BEFORE enforcement",),
        target_text="the law enforcement has responsibility",
        optimal=True,
    ),
    InsertionTrace(
        name="direct insert with distractor copy",
        start_text="the law enforcement has responsibility "
                   "the enforcement has responsibility",
        commands=("INSERT law BEFORE enforcement", "CHOOSE 2"),
        target_text="the law enforcement has responsibility "
                    "the law enforcement has responsibility",
        optimal=True,
    ),
    InsertionTrace(
        # Selecting first does not help: the insert re-disambiguates anyway.
        name="select first, then insert",
        start_text="the law enforcement has responsibility "
                   "the enforcement has responsibility",
        commands=("SELECT enforcement", "CHOOSE 2",
                  "INSERT law BEFORE enforcement", "CHOOSE 2"),
        target_text="the law enforcement has responsibility "
                    "the law enforcement has responsibility",
    ),
    InsertionTrace(
        name="replace instead of insert",
        start_text="the enforcement has responsibility",
        commands=("REPLACE enforcement WITH law enforcement",),
        target_text="the law enforcement has responsibility",
    ),
    InsertionTrace(
        name="insert after the preceding word",
        start_text="the enforcement has responsibility",
        commands=("INSERT law AFTER the",),
        target_text="the law enforcement has responsibility",
    ),
)
