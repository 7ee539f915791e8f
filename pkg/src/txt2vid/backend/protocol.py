"""Synthesis backend wire protocol: newline-delimited JSON over stdio or TCP.

Requests:
    {"op": "hello",            "request_id": N}
    {"op": "tts",              "request_id": N, "voice_id": S, "text": S}
    {"op": "lipsync",          "request_id": N, "profile_id": S, "audio_b64": S,
                               "sample_rate": I, "fps": I}
    {"op": "register_profile", "request_id": N, "profile_id": S,
                               "driving_video_b64": S, "container_tag": S}
    {"op": "shutdown",         "request_id": N}

Responses carry the matching request_id and "status": "ok" | "error".
    hello ok adds:    ops (list), max_chunk_ms, sample_rate, impl
    tts ok adds:      audio_b64 (PCM s16le mono), sample_rate
    lipsync ok adds:  frame_count, width, height, frames_b64 (RGB24 concat)
    error adds:       error: {code, message}

A line that fails to parse as JSON is answered with request_id 0 and error
code "parse". Requests may be pipelined; responses match by request_id and
may arrive in any order. Audio/video payloads ride as base64; a "binary"
capability is reserved in hello for a future length-prefixed lane.
"""

from __future__ import annotations

import base64
import json
import socket
import subprocess
from typing import Any, BinaryIO

# error codes
ERR_PARSE = "parse"
ERR_UNSUPPORTED = "unsupported"
ERR_BAD_REQUEST = "bad_request"
ERR_AUDIO_TOO_SHORT = "audio_too_short"
ERR_UNKNOWN_PROFILE = "unknown_profile"
ERR_EMPTY_TEXT = "empty_text"
ERR_UNSUPPORTED_CONTAINER = "unsupported_container"
ERR_INTERNAL = "internal"
ERR_TIMEOUT = "timeout"


class BackendError(Exception):
    """Error response surfaced client-side."""

    def __init__(self, code: str, message: str):
        self.code = code
        self.message = message
        super().__init__(f"[{code}] {message}")


def encode_message(obj: dict[str, Any]) -> bytes:
    return json.dumps(obj, separators=(",", ":")).encode("utf-8") + b"\n"


def b64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def unb64(text: str) -> bytes:
    return base64.b64decode(text.encode("ascii"), validate=True)


class BackendClient:
    """Synchronous client over a pair of binary file objects.

    Supports pipelining: ``send`` and ``wait`` match responses by id, out
    of order, buffering strays for later waits.
    """

    def __init__(self, rfile: BinaryIO, wfile: BinaryIO, process: subprocess.Popen | None = None):
        self._rfile = rfile
        self._wfile = wfile
        self._process = process
        self._next_id = 1
        self._pending: dict[int, dict] = {}

    # -- raw plumbing --------------------------------------------------------

    def send(self, op: str, **fields: Any) -> int:
        request_id = self._next_id
        self._next_id += 1
        msg = {"op": op, "request_id": request_id, **fields}
        self._wfile.write(encode_message(msg))
        self._wfile.flush()
        return request_id

    def send_raw(self, line: bytes) -> None:
        self._wfile.write(line)
        self._wfile.flush()

    def read_response(self) -> dict:
        line = self._rfile.readline()
        if not line:
            raise ConnectionError("backend closed the connection")
        return json.loads(line)

    def wait(self, request_id: int) -> dict:
        if request_id in self._pending:
            return self._pending.pop(request_id)
        while True:
            msg = self.read_response()
            if msg.get("request_id") == request_id:
                return msg
            self._pending[msg.get("request_id", 0)] = msg

    def call(self, op: str, **fields: Any) -> dict:
        msg = self.wait(self.send(op, **fields))
        if msg.get("status") != "ok":
            err = msg.get("error", {})
            raise BackendError(err.get("code", "unknown"), err.get("message", ""))
        return msg

    # -- typed convenience ----------------------------------------------------

    def hello(self) -> dict:
        return self.call("hello")

    def tts(self, text: str, voice_id: str = "default") -> tuple[bytes, int]:
        msg = self.call("tts", voice_id=voice_id, text=text)
        return unb64(msg["audio_b64"]), int(msg["sample_rate"])

    def lipsync(self, profile_id: str, pcm_s16le: bytes, sample_rate: int, fps: int) -> dict:
        msg = self.call(
            "lipsync",
            profile_id=profile_id,
            audio_b64=b64(pcm_s16le),
            sample_rate=sample_rate,
            fps=fps,
        )
        frames = unb64(msg["frames_b64"])
        expected = msg["frame_count"] * msg["width"] * msg["height"] * 3
        if len(frames) != expected:
            raise BackendError("frame_size", f"got {len(frames)} bytes, expected {expected}")
        return {
            "frames": frames,
            "frame_count": int(msg["frame_count"]),
            "width": int(msg["width"]),
            "height": int(msg["height"]),
        }

    def register_profile(self, profile_id: str, blob: bytes, container_tag: str) -> dict:
        return self.call(
            "register_profile",
            profile_id=profile_id,
            driving_video_b64=b64(blob),
            container_tag=container_tag,
        )

    def shutdown(self) -> None:
        try:
            self.call("shutdown")
        except (ConnectionError, BrokenPipeError):
            pass

    def close(self) -> None:
        for f in (self._wfile, self._rfile):
            try:
                f.close()
            except OSError:
                pass
        if self._process is not None:
            try:
                self._process.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._process.kill()


def connect_tcp(host: str, port: int) -> BackendClient:
    sock = socket.create_connection((host, port))
    return BackendClient(sock.makefile("rb"), sock.makefile("wb"))


def spawn_stdio(cmd: list[str]) -> BackendClient:
    """Launch a backend subprocess speaking the protocol on stdio."""
    proc = subprocess.Popen(cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE)
    assert proc.stdin is not None and proc.stdout is not None
    return BackendClient(proc.stdout, proc.stdin, process=proc)
