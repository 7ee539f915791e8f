"""Payload layouts for each message type.

All integers are big-endian. Layouts:

    HELLO / HELLO_ACK    session_id u32
    REGISTER_PROFILE     user_id u16 | voice_ref_len u16 | voice_ref utf8
                         | container_tag 4B | video_len u32 | video bytes
    PROFILE_ACK          user_id u16 | flags u8 (bit0 = replaced existing)
    TEXT_SEGMENT         session_id u32 | seq u32 | capture_ts_ms u64
                         | user_id u16 | compressor_id u8 | body
    AUDIO_SEGMENT        session_id u32 | seq u32 | capture_ts_ms u64
                         | user_id u16 | codec_id u8 | sample_rate u32 | body
    SESSION_END          empty, or capture_ts_ms u64 marking end of speech
    PROTOCOL_ERROR       code u16 | message utf8
"""

from __future__ import annotations

import struct
from dataclasses import dataclass


class MalformedPayload(Exception):
    """Payload bytes do not match the declared message type's layout."""


_SEG_HEAD = struct.Struct(">IIQHB")
_AUD_HEAD = struct.Struct(">IIQHBI")
_U16 = struct.Struct(">H")
_U32 = struct.Struct(">I")
_U64 = struct.Struct(">Q")

SEGMENT_HEADER_LEN = _SEG_HEAD.size  # 19
AUDIO_HEADER_LEN = _AUD_HEAD.size  # 23


@dataclass(frozen=True)
class SessionProfile:
    """One-time per-user decoder state: driving video plus voice reference."""

    user_id: int
    voice_profile_ref: str
    container_tag: bytes  # 4 bytes, e.g. b"MP4 " or b"RAW0"
    driving_video: bytes

    def encode(self) -> bytes:
        if not self.driving_video:
            raise ValueError("driving_video must be non-empty")
        if len(self.container_tag) != 4:
            raise ValueError("container_tag must be exactly 4 bytes")
        ref = self.voice_profile_ref.encode("utf-8")
        return (
            _U16.pack(self.user_id)
            + _U16.pack(len(ref))
            + ref
            + self.container_tag
            + _U32.pack(len(self.driving_video))
            + self.driving_video
        )

    @classmethod
    def decode(cls, data: bytes) -> "SessionProfile":
        try:
            (user_id,) = _U16.unpack_from(data, 0)
            (ref_len,) = _U16.unpack_from(data, 2)
            ref = data[4 : 4 + ref_len].decode("utf-8")
            tag = bytes(data[4 + ref_len : 8 + ref_len])
            (video_len,) = _U32.unpack_from(data, 8 + ref_len)
            video = bytes(data[12 + ref_len : 12 + ref_len + video_len])
            if len(tag) != 4 or len(video) != video_len or not video:
                raise MalformedPayload("profile fields truncated")
            if len(data) != 12 + ref_len + video_len:
                raise MalformedPayload("trailing bytes after profile")
        except (struct.error, UnicodeDecodeError) as exc:
            raise MalformedPayload(str(exc)) from exc
        return cls(user_id, ref, tag, video)


@dataclass(frozen=True)
class TextSegmentPayload:
    """Steady-state payload: one compressed transcript fragment."""

    session_id: int
    seq: int
    capture_ts_ms: int
    user_id: int
    compressor_id: int
    body: bytes

    def encode(self) -> bytes:
        return (
            _SEG_HEAD.pack(
                self.session_id, self.seq, self.capture_ts_ms, self.user_id, self.compressor_id
            )
            + self.body
        )

    @classmethod
    def decode(cls, data: bytes) -> "TextSegmentPayload":
        try:
            sid, seq, ts, uid, comp = _SEG_HEAD.unpack_from(data, 0)
        except struct.error as exc:
            raise MalformedPayload(str(exc)) from exc
        return cls(sid, seq, ts, uid, comp, bytes(data[SEGMENT_HEADER_LEN:]))


@dataclass(frozen=True)
class AudioSegmentPayload:
    """Audio passthrough payload (codec_id 0 = PCM s16le mono)."""

    session_id: int
    seq: int
    capture_ts_ms: int
    user_id: int
    codec_id: int
    sample_rate: int
    body: bytes

    def encode(self) -> bytes:
        return (
            _AUD_HEAD.pack(
                self.session_id,
                self.seq,
                self.capture_ts_ms,
                self.user_id,
                self.codec_id,
                self.sample_rate,
            )
            + self.body
        )

    @classmethod
    def decode(cls, data: bytes) -> "AudioSegmentPayload":
        try:
            sid, seq, ts, uid, codec, rate = _AUD_HEAD.unpack_from(data, 0)
        except struct.error as exc:
            raise MalformedPayload(str(exc)) from exc
        return cls(sid, seq, ts, uid, codec, rate, bytes(data[AUDIO_HEADER_LEN:]))


def encode_hello(session_id: int) -> bytes:
    return _U32.pack(session_id)


def decode_hello(data: bytes) -> int:
    if len(data) != 4:
        raise MalformedPayload("hello payload must be 4 bytes")
    return _U32.unpack(data)[0]


def encode_profile_ack(user_id: int, replaced: bool) -> bytes:
    return _U16.pack(user_id) + bytes([1 if replaced else 0])


def decode_profile_ack(data: bytes) -> tuple[int, bool]:
    if len(data) != 3:
        raise MalformedPayload("profile_ack payload must be 3 bytes")
    return _U16.unpack(data[:2])[0], bool(data[2] & 1)


def encode_session_end(capture_ts_ms: int | None = None) -> bytes:
    return b"" if capture_ts_ms is None else _U64.pack(capture_ts_ms)


def decode_session_end(data: bytes) -> int | None:
    if not data:
        return None
    if len(data) != 8:
        raise MalformedPayload("session_end payload must be empty or 8 bytes")
    return _U64.unpack(data)[0]


def encode_protocol_error(code: int, message: str) -> bytes:
    return _U16.pack(code) + message.encode("utf-8")


def decode_protocol_error(data: bytes) -> tuple[int, str]:
    if len(data) < 2:
        raise MalformedPayload("protocol_error payload must carry a code")
    try:
        return _U16.unpack(data[:2])[0], data[2:].decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedPayload(str(exc)) from exc
