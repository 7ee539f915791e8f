"""Backend protocol server with a request watchdog.

Same newline-delimited JSON protocol as the main stack's procedural backend
(see its protocol module for the field-by-field layout). The reader stays
serial, but every request body runs on a worker thread bounded by the
configured watchdog, so a wedged model yields a "timeout" error response
instead of a dead process. Per-request failures of any kind become error
responses; the process never dies on traffic.
"""

from __future__ import annotations

import base64
import concurrent.futures
import json
import socket
import sys
import threading
from typing import Any, BinaryIO

from txt2vid_adapter.config import AdapterConfig, ResolvedOps, resolve_ops
from txt2vid_adapter.synth import SynthError, decode_raw_video

MAX_CHUNK_MS = 60_000


def _error(request_id: int, code: str, message: str) -> dict:
    return {
        "request_id": request_id,
        "status": "error",
        "error": {"code": code, "message": message},
    }


class AdapterServer:
    def __init__(self, config: AdapterConfig | None = None):
        self.config = config or AdapterConfig()
        self.ops: ResolvedOps = resolve_ops(self.config)
        self._profiles: dict[str, tuple[bytes, int, int, int]] = {}
        self._worker = concurrent.futures.ThreadPoolExecutor(max_workers=1)

    # -- request handling -------------------------------------------------------

    def handle(self, request: dict) -> dict:
        request_id = request.get("request_id", 0)
        op = request.get("op")
        if op == "hello":
            return {
                "request_id": request_id,
                "status": "ok",
                "ops": self.ops.capabilities,
                "max_chunk_ms": MAX_CHUNK_MS,
                "sample_rate": 16000,
                "impl": "adapter-" + "-".join(
                    sorted(set(self.ops.notes.values()))
                ),
            }
        if op == "shutdown":
            return {"request_id": request_id, "status": "ok"}
        handler = {
            "tts": self._tts,
            "lipsync": self._lipsync,
            "register_profile": self._register,
        }.get(op)
        if handler is None:
            return _error(request_id, "unsupported", f"unknown op {op!r}")
        future = self._worker.submit(self._guarded, handler, request_id, request)
        try:
            return future.result(timeout=self.config.watchdog_s)
        except concurrent.futures.TimeoutError:
            return _error(
                request_id,
                "timeout",
                f"request exceeded the {self.config.watchdog_s:.1f}s watchdog",
            )

    def _guarded(self, handler, request_id: int, request: dict) -> dict:
        try:
            return handler(request_id, request)
        except SynthError as exc:
            return _error(request_id, exc.code, exc.message)
        except KeyError as exc:
            return _error(request_id, "bad_request", f"missing field {exc}")
        except (ValueError, TypeError) as exc:
            return _error(request_id, "bad_request", str(exc))
        except Exception as exc:  # never let a model error kill the process
            return _error(request_id, "internal", repr(exc))

    def _tts(self, request_id: int, request: dict) -> dict:
        if self.ops.tts is None:
            return _error(request_id, "unsupported", self.ops.notes.get("tts", "tts unavailable"))
        text = request["text"]
        if not isinstance(text, str) or not text:
            return _error(request_id, "empty_text", "text must be non-empty")
        pcm, rate = self.ops.tts(text, str(request.get("voice_id", "default")))
        return {
            "request_id": request_id,
            "status": "ok",
            "audio_b64": base64.b64encode(pcm).decode("ascii"),
            "sample_rate": rate,
        }

    def _lipsync(self, request_id: int, request: dict) -> dict:
        if self.ops.lipsync is None:
            return _error(
                request_id, "unsupported", self.ops.notes.get("lipsync", "lipsync unavailable")
            )
        profile = self._profiles.get(str(request["profile_id"]))
        if profile is None:
            return _error(request_id, "unknown_profile", "profile not registered")
        pcm = base64.b64decode(request["audio_b64"].encode("ascii"), validate=True)
        frames, count, width, height = self.ops.lipsync(
            profile, pcm, int(request["sample_rate"]), int(request["fps"])
        )
        return {
            "request_id": request_id,
            "status": "ok",
            "frame_count": count,
            "width": width,
            "height": height,
            "frames_b64": base64.b64encode(frames).decode("ascii"),
        }

    def _register(self, request_id: int, request: dict) -> dict:
        if self.ops.lipsync is None:
            return _error(request_id, "unsupported", "no lipsync implementation to register for")
        if request["container_tag"] != "RAW0":
            return _error(
                request_id,
                "unsupported_container",
                f"adapter only decodes RAW0 driving videos, got {request['container_tag']!r}",
            )
        blob = base64.b64decode(request["driving_video_b64"].encode("ascii"), validate=True)
        self._profiles[str(request["profile_id"])] = decode_raw_video(blob)
        return {"request_id": request_id, "status": "ok"}


def serve_connection(rfile: BinaryIO, wfile: BinaryIO, server: AdapterServer) -> None:
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
            response: dict[str, Any] = _error(0, "parse", str(exc))
            request = {}
        else:
            response = server.handle(request)
        wfile.write(json.dumps(response, separators=(",", ":")).encode("utf-8") + b"\n")
        wfile.flush()
        if request.get("op") == "shutdown" and response.get("status") == "ok":
            return


def serve_stdio(config: AdapterConfig | None = None) -> None:
    serve_connection(sys.stdin.buffer, sys.stdout.buffer, AdapterServer(config))


def serve_tcp(host: str, port: int, config: AdapterConfig | None = None) -> None:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as listener:
        listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        listener.bind((host, port))
        listener.listen()
        while True:
            conn, _addr = listener.accept()
            thread = threading.Thread(
                target=_serve_socket, args=(conn, AdapterServer(config)), daemon=True
            )
            thread.start()


def _serve_socket(conn: socket.socket, server: AdapterServer) -> None:
    with conn:
        try:
            serve_connection(conn.makefile("rb"), conn.makefile("wb"), server)
        except (BrokenPipeError, ConnectionResetError):
            pass
