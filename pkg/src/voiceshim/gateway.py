"""WebSocket gateway: one live shim session per connection.

Clients connect to ``/session`` and exchange single-object JSON frames.

Client -> server::

    {"type": "open", "initial_text": "...", "config": {...}}
    {"type": "utter", "text": "..."}
    {"type": "answer", "text": "..."}
    {"type": "close"}

Server -> client: ``{"type": "session_opened", "id": ..., "buffer": ...}``,
the session event frames (transcript, listening, normalized, relayed,
vui_outcome, clarification_asked, suggestion_shown, utterance_discarded),
and ``{"type": "error", "code": ..., "message": ...}``.  Every client frame
is answered by at least one server frame, in session-event order.  Closing
the connection destroys the session; nothing is shared across connections.

``GET /healthz`` reports service metadata.
"""

from __future__ import annotations

import json
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import __version__
from .lexicon import NormalizerLexicon, default_lexicon
from .segmenter import SegmenterConfig
from .session import Session, SessionConfig, event_to_dict
from .sim import buffer_text

OPEN_CONFIG_KEYS = {"window_ms", "auto_apply_threshold", "correction_lexicon"}


def _error(code: str, message: str) -> dict:
    return {"type": "error", "code": code, "message": message}


def _open_session(frame: dict, lexicon: NormalizerLexicon) -> Session:
    config = frame.get("config") or {}
    unknown = set(config) - OPEN_CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    window = int(config.get("window_ms", SegmenterConfig.shim().window_ms))
    session_config = SessionConfig(
        segmenter=SegmenterConfig.shim(window_ms=window),
        lexicon=lexicon,
    )
    return Session(
        initial_text=str(frame.get("initial_text", "")),
        correction_lexicon=config.get("correction_lexicon"),
        config=session_config,
    )


def make_app(lexicon: Optional[NormalizerLexicon] = None) -> FastAPI:
    lexicon = lexicon or default_lexicon()
    app = FastAPI(title="voiceshim gateway", version=__version__)
    live_sessions: set[str] = set()

    @app.get("/healthz")
    def healthz() -> dict:
        return {"service": "voiceshim-gateway", "version": __version__,
                "sessions": len(live_sessions)}

    @app.websocket("/session")
    async def session_socket(socket: WebSocket) -> None:
        await socket.accept()
        session: Optional[Session] = None
        try:
            while True:
                raw = await socket.receive_text()
                try:
                    frame = json.loads(raw)
                except json.JSONDecodeError:
                    await socket.send_json(_error("bad_request", "frame is not valid JSON"))
                    continue
                if not isinstance(frame, dict) or "type" not in frame:
                    await socket.send_json(_error("bad_request", "frame needs a type"))
                    continue
                kind = frame["type"]
                if kind == "open":
                    if session is not None:
                        await socket.send_json(_error(
                            "already_open", "this connection already has a session"))
                        continue
                    try:
                        session = _open_session(frame, lexicon)
                    except (ValueError, TypeError) as err:
                        await socket.send_json(_error("bad_request", str(err)))
                        continue
                    live_sessions.add(session.id)
                    await socket.send_json({
                        "type": "session_opened",
                        "id": session.id,
                        "buffer": buffer_text(session.sim),
                    })
                elif kind in ("utter", "answer"):
                    if session is None:
                        await socket.send_json(_error(
                            "no_session", "open a session first"))
                        continue
                    text = frame.get("text", "")
                    if not isinstance(text, str) or not text.split():
                        await socket.send_json(_error(
                            "bad_request", "text must be a non-empty string"))
                        continue
                    if kind == "answer" and session.pending_clarification is None:
                        await socket.send_json(_error(
                            "no_pending_clarification",
                            "there is no question to answer"))
                        continue
                    for event in session.utter(text):
                        await socket.send_json(event_to_dict(event))
                elif kind == "close":
                    break
                else:
                    await socket.send_json(_error(
                        "bad_request", f"unknown frame type {kind!r}"))
        except WebSocketDisconnect:
            pass
        finally:
            if session is not None:
                live_sessions.discard(session.id)

    return app


def serve(port: int, host: str = "127.0.0.1",
          lexicon: Optional[NormalizerLexicon] = None) -> None:
    """Run the gateway until interrupted; raises OSError if the port is taken."""
    import uvicorn

    uvicorn.run(make_app(lexicon), host=host, port=port, log_level="warning")
