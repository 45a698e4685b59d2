"""Cross-cutting session properties over mixed utterance scripts."""

from voiceshim.normalizer import SelectionContext
from voiceshim.session import open_session

SCRIPT = [
    "select apple",
    "choose 2",
    "fix that",
    "please add at home before tonight",
    "insert before apple pie",
    "in the morning",
    "remove pie",
    "undo",
    "redo",
    "select the next word",
    "delete that",
    "insert the word coffee",
    "replace work",
    "select tart",
]


def cache_projection(session):
    selection = session.sim.selection
    if selection is None:
        return SelectionContext()
    words = session.sim.buffer[selection.start:selection.end]
    return SelectionContext(tuple(w.lower() for w in words))


def test_cache_mirrors_sim_selection_after_every_batch():
    session = open_session("apple pie apple tart tonight work",
                           {"apple": ["apples"]})
    for utterance in SCRIPT:
        session.utter(utterance)
        assert session.cache == cache_projection(session), utterance


def test_history_never_exceeds_five_and_stays_canonical():
    session = open_session("apple pie apple tart tonight work",
                           {"apple": ["apples"]})
    for utterance in SCRIPT:
        session.utter(utterance)
        assert len(session.history()) <= 5
        for command in session.history():
            assert command == command.strip()
