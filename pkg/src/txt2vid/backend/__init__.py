"""Synthesis backend protocol, procedural mock, and conformance suite."""

from txt2vid.backend.mock import (
    MOCK_SAMPLE_RATE,
    AudioTooShort,
    EmptyProfile,
    EmptyText,
    MockVoiceModel,
    mock_lipsync,
    mock_tts,
    tts_duration_ms,
)
from txt2vid.backend.protocol import (
    BackendClient,
    BackendError,
    connect_tcp,
    spawn_stdio,
)
from txt2vid.backend.server import MockBackend, serve_connection, serve_stdio, serve_tcp

__all__ = [
    "MOCK_SAMPLE_RATE",
    "AudioTooShort",
    "EmptyProfile",
    "EmptyText",
    "MockVoiceModel",
    "mock_lipsync",
    "mock_tts",
    "tts_duration_ms",
    "BackendClient",
    "BackendError",
    "connect_tcp",
    "spawn_stdio",
    "MockBackend",
    "serve_connection",
    "serve_stdio",
    "serve_tcp",
]
