"""Backend server loop and the procedural implementation behind it.

One connection is one serial JSON reader plus one serial writer; the mock
processes requests inline, which trivially satisfies the write-serialization
rule. Runs over stdio (for subprocess launch) or a localhost TCP socket.
"""

from __future__ import annotations

import json
import socket
import sys
import threading
from typing import Any, BinaryIO

from txt2vid.backend import mock, protocol
from txt2vid.media import PcmAudio, RawVideo

MAX_CHUNK_MS = 60_000


class MockBackend:
    """Deterministic procedural backend: no models, no state beyond profiles."""

    ops = ("hello", "tts", "lipsync", "register_profile", "shutdown")

    def __init__(self, voices: dict[str, mock.MockVoiceModel] | None = None):
        self._voices = voices or {"default": mock.MockVoiceModel()}
        self._profiles: dict[str, RawVideo] = {}

    def capabilities(self) -> dict[str, Any]:
        return {
            "ops": [op for op in self.ops if op not in ("hello", "shutdown")],
            "max_chunk_ms": MAX_CHUNK_MS,
            "sample_rate": mock.MOCK_SAMPLE_RATE,
            "impl": "mock-procedural",
        }

    def handle(self, request: dict) -> dict:
        request_id = request.get("request_id", 0)
        op = request.get("op")
        try:
            if op == "hello":
                return {"request_id": request_id, "status": "ok", **self.capabilities()}
            if op == "tts":
                return self._tts(request_id, request)
            if op == "lipsync":
                return self._lipsync(request_id, request)
            if op == "register_profile":
                return self._register(request_id, request)
            if op == "shutdown":
                return {"request_id": request_id, "status": "ok"}
            return _error(request_id, protocol.ERR_UNSUPPORTED, f"unknown op {op!r}")
        except KeyError as exc:
            return _error(request_id, protocol.ERR_BAD_REQUEST, f"missing field {exc}")
        except (ValueError, TypeError) as exc:
            return _error(request_id, protocol.ERR_BAD_REQUEST, str(exc))

    def _tts(self, request_id: int, request: dict) -> dict:
        text = request["text"]
        if not isinstance(text, str) or not text:
            return _error(request_id, protocol.ERR_EMPTY_TEXT, "text must be non-empty")
        model = self._voices.get(str(request.get("voice_id", "default")))
        if model is None:
            model = self._voices["default"]
        audio = mock.mock_tts(text, model)
        return {
            "request_id": request_id,
            "status": "ok",
            "audio_b64": protocol.b64(audio.data),
            "sample_rate": audio.sample_rate,
        }

    def _lipsync(self, request_id: int, request: dict) -> dict:
        profile = self._profiles.get(str(request["profile_id"]))
        if profile is None:
            return _error(request_id, protocol.ERR_UNKNOWN_PROFILE, "profile not registered")
        audio = PcmAudio(protocol.unb64(request["audio_b64"]), int(request["sample_rate"]))
        fps = int(request["fps"])
        try:
            frames = mock.mock_lipsync(audio, profile, fps)
        except mock.AudioTooShort as exc:
            return _error(request_id, protocol.ERR_AUDIO_TOO_SHORT, str(exc))
        return {
            "request_id": request_id,
            "status": "ok",
            "frame_count": len(frames),
            "width": profile.width,
            "height": profile.height,
            "frames_b64": protocol.b64(b"".join(f.data for f in frames)),
        }

    def _register(self, request_id: int, request: dict) -> dict:
        tag = request["container_tag"]
        if tag != "RAW0":
            return _error(
                request_id,
                protocol.ERR_UNSUPPORTED_CONTAINER,
                f"mock backend only decodes RAW0 driving videos, got {tag!r}",
            )
        blob = protocol.unb64(request["driving_video_b64"])
        self._profiles[str(request["profile_id"])] = RawVideo.decode(blob)
        return {"request_id": request_id, "status": "ok"}


def _error(request_id: int, code: str, message: str) -> dict:
    return {
        "request_id": request_id,
        "status": "error",
        "error": {"code": code, "message": message},
    }


def serve_connection(rfile: BinaryIO, wfile: BinaryIO, impl: MockBackend) -> None:
    """Serve one connection until shutdown or EOF."""
    while True:
        line = rfile.readline()
        if not line:
            return
        if not line.strip():
            continue
        try:
            request = json.loads(line)
            if not isinstance(request, dict):
                raise ValueError("request must be a JSON object")
        except (json.JSONDecodeError, ValueError) as exc:
            wfile.write(protocol.encode_message(_error(0, protocol.ERR_PARSE, str(exc))))
            wfile.flush()
            continue
        response = impl.handle(request)
        wfile.write(protocol.encode_message(response))
        wfile.flush()
        if request.get("op") == "shutdown" and response.get("status") == "ok":
            return


def serve_stdio(impl: MockBackend | None = None) -> None:
    serve_connection(sys.stdin.buffer, sys.stdout.buffer, impl or MockBackend())


def serve_tcp(host: str, port: int, impl_factory=MockBackend, ready_event: threading.Event | None = None) -> None:
    """Accept loop; each connection gets its own impl and thread."""
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as server:
        server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        server.bind((host, port))
        server.listen()
        if ready_event is not None:
            ready_event.set()
        while True:
            conn, _addr = server.accept()
            thread = threading.Thread(
                target=_serve_socket, args=(conn, impl_factory()), daemon=True
            )
            thread.start()


def _serve_socket(conn: socket.socket, impl: MockBackend) -> None:
    with conn:
        rfile = conn.makefile("rb")
        wfile = conn.makefile("wb")
        try:
            serve_connection(rfile, wfile, impl)
        except (BrokenPipeError, ConnectionResetError):
            pass
