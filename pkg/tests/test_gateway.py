"""Gateway protocol tests over an in-process client."""

import pytest
from fastapi.testclient import TestClient

from voiceshim.gateway import make_app


@pytest.fixture()
def client():
    return TestClient(make_app())


def drain_batch(socket):
    """Receive one utterance's frames: everything up to listening-on."""
    frames = []
    while True:
        frame = socket.receive_json()
        frames.append(frame)
        if frame == {"type": "listening", "on": True}:
            return frames
        if frame["type"] == "error":
            return frames


class TestHealth:
    def test_healthz(self, client):
        body = client.get("/healthz").json()
        assert body["service"] == "voiceshim-gateway"
        assert body["sessions"] == 0


class TestSessionProtocol:
    def test_open_echoes_buffer(self, client):
        with client.websocket_connect("/session") as socket:
            socket.send_json({"type": "open", "initial_text": "apple pie apple"})
            opened = socket.receive_json()
            assert opened["type"] == "session_opened"
            assert opened["buffer"] == "apple pie apple"

    def test_utter_emits_ordered_frames(self, client):
        with client.websocket_connect("/session") as socket:
            socket.send_json({"type": "open", "initial_text": "apple pie"})
            socket.receive_json()
            socket.send_json({"type": "utter", "text": "select apple"})
            frames = drain_batch(socket)
            kinds = [f["type"] for f in frames]
            assert kinds == ["transcript", "listening", "normalized",
                             "relayed", "vui_outcome", "listening"]
            assert frames[0]["text"] == "select apple"
            assert frames[3]["command"] == "SELECT apple"
            assert frames[4]["outcome"]["status"] == "applied"

    def test_disambiguation_candidates_over_wire(self, client):
        with client.websocket_connect("/session") as socket:
            socket.send_json({"type": "open",
                              "initial_text": "apple pie apple tart apple"})
            socket.receive_json()
            socket.send_json({"type": "utter", "text": "select apple"})
            frames = drain_batch(socket)
            outcome = [f for f in frames if f["type"] == "vui_outcome"][0]
            numbers = [c["number"] for c in outcome["outcome"]["candidates"]]
            assert numbers == [1, 2, 3]

    def test_clarification_round_trip(self, client):
        with client.websocket_connect("/session") as socket:
            socket.send_json({"type": "open", "initial_text": "apple pie"})
            socket.receive_json()
            socket.send_json({"type": "utter", "text": "insert before apple pie"})
            frames = drain_batch(socket)
            asked = [f for f in frames if f["type"] == "clarification_asked"]
            assert asked[0]["question"] == "What should I insert before apple pie?"
            socket.send_json({"type": "answer", "text": "in the morning"})
            frames = drain_batch(socket)
            relayed = [f for f in frames if f["type"] == "relayed"]
            assert relayed[0]["command"] == "INSERT in the morning BEFORE apple pie"

    def test_answer_without_question_is_error(self, client):
        with client.websocket_connect("/session") as socket:
            socket.send_json({"type": "open"})
            socket.receive_json()
            socket.send_json({"type": "answer", "text": "apple"})
            frame = socket.receive_json()
            assert frame["type"] == "error"
            assert frame["code"] == "no_pending_clarification"


class TestErrors:
    def test_malformed_frame_keeps_connection(self, client):
        with client.websocket_connect("/session") as socket:
            socket.send_text("{not json")
            assert socket.receive_json()["code"] == "bad_request"
            socket.send_json({"type": "open", "initial_text": "a b"})
            assert socket.receive_json()["type"] == "session_opened"

    def test_utter_before_open(self, client):
        with client.websocket_connect("/session") as socket:
            socket.send_json({"type": "utter", "text": "select apple"})
            assert socket.receive_json()["code"] == "no_session"

    def test_unknown_type(self, client):
        with client.websocket_connect("/session") as socket:
            socket.send_json({"type": "dance"})
            assert socket.receive_json()["code"] == "bad_request"

    def test_empty_utterance(self, client):
        with client.websocket_connect("/session") as socket:
            socket.send_json({"type": "open"})
            socket.receive_json()
            socket.send_json({"type": "utter", "text": "   "})
            assert socket.receive_json()["code"] == "bad_request"

    def test_unknown_config_key(self, client):
        with client.websocket_connect("/session") as socket:
            socket.send_json({"type": "open", "config": {"bogus": 1}})
            assert socket.receive_json()["code"] == "bad_request"

    def test_double_open_is_error(self, client):
        with client.websocket_connect("/session") as socket:
            socket.send_json({"type": "open"})
            socket.receive_json()
            socket.send_json({"type": "open"})
            assert socket.receive_json()["code"] == "already_open"

    def test_config_window_and_correction_lexicon(self, client):
        with client.websocket_connect("/session") as socket:
            socket.send_json({"type": "open", "initial_text": "cintrol room",
                              "config": {"window_ms": 4500,
                                         "correction_lexicon":
                                             {"cintrol": ["control"]}}})
            opened = socket.receive_json()
            assert opened["type"] == "session_opened"
            socket.send_json({"type": "utter", "text": "correct cintrol"})
            frames = drain_batch(socket)
            outcome = [f for f in frames if f["type"] == "vui_outcome"][0]
            assert outcome["outcome"]["buffer"] == "control room"


class TestIsolation:
    def test_two_connections_do_not_share_state(self, client):
        with client.websocket_connect("/session") as first:
            first.send_json({"type": "open", "initial_text": "apple pie"})
            first.receive_json()
            with client.websocket_connect("/session") as second:
                second.send_json({"type": "open", "initial_text": "car wreck"})
                second.receive_json()
                second.send_json({"type": "utter", "text": "delete car"})
                frames = drain_batch(second)
                outcome = [f for f in frames if f["type"] == "vui_outcome"][0]
                assert outcome["outcome"]["buffer"] == "wreck"
            first.send_json({"type": "utter", "text": "select apple"})
            frames = drain_batch(first)
            outcome = [f for f in frames if f["type"] == "vui_outcome"][0]
            assert outcome["outcome"]["status"] == "applied"

    def test_close_frame_ends_session(self, client):
        app_client = client
        with app_client.websocket_connect("/session") as socket:
            socket.send_json({"type": "open"})
            socket.receive_json()
            socket.send_json({"type": "close"})
        assert app_client.get("/healthz").json()["sessions"] == 0
