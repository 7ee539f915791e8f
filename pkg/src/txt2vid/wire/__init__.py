"""Session wire protocol: framing, payload layouts, and the state machine."""

from txt2vid.wire.frames import (
    MAX_PAYLOAD,
    BadCrc,
    BadMagic,
    BadVersion,
    DecodedFrame,
    Deframer,
    FrameError,
    MessageType,
    OversizePayload,
    Truncated,
    UnknownMessageType,
    decode_frame,
    encode_frame,
    read_frame,
)
from txt2vid.wire.payloads import (
    AudioSegmentPayload,
    MalformedPayload,
    SessionProfile,
    TextSegmentPayload,
)
from txt2vid.wire.session import Phase, Role, SessionMachine, step_session

__all__ = [
    "MAX_PAYLOAD",
    "BadCrc",
    "BadMagic",
    "BadVersion",
    "DecodedFrame",
    "Deframer",
    "FrameError",
    "MessageType",
    "OversizePayload",
    "Truncated",
    "UnknownMessageType",
    "decode_frame",
    "encode_frame",
    "read_frame",
    "AudioSegmentPayload",
    "MalformedPayload",
    "SessionProfile",
    "TextSegmentPayload",
    "Phase",
    "Role",
    "SessionMachine",
    "step_session",
]
