"""Record a live gateway dialog into the test fixture.

Starts the voiceshim gateway on a free port, plays the scripted console
dialog over a real WebSocket, and writes every frame (both directions, in
order) to test/fixtures/recorded-frames.json.  Rerun after protocol
changes:

    python3 scripts/record_frames.py
"""

import asyncio
import contextlib
import json
import socket
import subprocess
import sys
import time
from pathlib import Path

import websockets

FIXTURE = Path(__file__).resolve().parent.parent / "test" / "fixtures" / "recorded-frames.json"

DIALOG = [
    {"type": "open", "initial_text": "apple pie apple tart apple"},
    {"type": "utter", "text": "select apple"},
    {"type": "utter", "text": "choose 2"},
    {"type": "utter", "text": "insert before apple pie"},
    {"type": "answer", "text": "in the morning"},
    {"type": "close"},
]

TERMINALS = {"session_opened", "error"}


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


async def record(port: int) -> list:
    log = []
    async with websockets.connect(f"ws://127.0.0.1:{port}/session") as ws:
        for frame in DIALOG:
            log.append({"direction": "send", "frame": frame})
            await ws.send(json.dumps(frame))
            if frame["type"] == "close":
                break
            while True:
                received = json.loads(await ws.recv())
                log.append({"direction": "recv", "frame": received})
                if received["type"] in TERMINALS:
                    break
                if received == {"type": "listening", "on": True}:
                    break
    return log


def main() -> None:
    port = free_port()
    server = subprocess.Popen(
        [sys.executable, "-m", "voiceshim.cli", "serve", "--port", str(port)],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
    )
    try:
        deadline = time.time() + 15
        while time.time() < deadline:
            with contextlib.suppress(OSError):
                with socket.create_connection(("127.0.0.1", port), timeout=0.2):
                    break
            time.sleep(0.1)
        else:
            raise RuntimeError("gateway did not come up")
        log = asyncio.run(record(port))
    finally:
        server.terminate()
        server.wait(timeout=10)
    FIXTURE.parent.mkdir(parents=True, exist_ok=True)
    FIXTURE.write_text(json.dumps(log, indent=2, sort_keys=True) + "\n",
                       encoding="utf-8")
    print(f"wrote {len(log)} frames to {FIXTURE}")


if __name__ == "__main__":
    main()
