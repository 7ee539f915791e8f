"""Binary session framing.

Frame layout (all integers big-endian):

    ┌───────────┬─────────┬──────────┬─────────┬──────────────┬─────────┬─────────┐
    │ magic 2B  │ ver u8  │ type u8  │ flags u8│ payload_len  │ payload │ crc u32 │
    │ 0x54 0x56 │ (=1)    │          │ (=0)    │ u32          │         │         │
    └───────────┴─────────┴──────────┴─────────┴──────────────┴─────────┴─────────┘

The CRC is CRC-32/IEEE over version..payload inclusive (everything between the
magic and the CRC field). A frame therefore occupies 13 + payload_len bytes.
Payloads are capped at 64 MiB, which comfortably holds a one-time driving
video blob while bounding receiver memory.
"""

from __future__ import annotations

import enum
import struct
import zlib
from dataclasses import dataclass
from typing import Iterator, Union

MAGIC = b"TV"
VERSION = 1
MAX_PAYLOAD = 64 * 1024 * 1024
HEADER_LEN = 9  # magic + version + type + flags + payload_len
OVERHEAD = HEADER_LEN + 4  # plus trailing crc

_HEADER = struct.Struct(">2sBBBI")
_CRC = struct.Struct(">I")


class MessageType(enum.IntEnum):
    HELLO = 0x01
    HELLO_ACK = 0x02
    REGISTER_PROFILE = 0x03
    PROFILE_ACK = 0x04
    TEXT_SEGMENT = 0x05
    AUDIO_SEGMENT = 0x06
    SESSION_END = 0x07
    PROTOCOL_ERROR = 0x08


_KNOWN_TYPES = frozenset(int(m) for m in MessageType)


class FrameError(Exception):
    """Base class for framing failures."""


class BadMagic(FrameError):
    pass


class BadVersion(FrameError):
    pass


class BadCrc(FrameError):
    pass


class Truncated(FrameError):
    pass


class OversizePayload(FrameError):
    pass


class UnknownMessageType(FrameError):
    pass


def encode_frame(msg_type: Union[MessageType, int], payload: bytes = b"") -> bytes:
    """Encode one frame. Byte-exact and platform independent."""
    if len(payload) > MAX_PAYLOAD:
        raise OversizePayload(f"payload of {len(payload)} bytes exceeds {MAX_PAYLOAD}")
    msg_type = MessageType(msg_type)
    head = _HEADER.pack(MAGIC, VERSION, msg_type, 0, len(payload))
    crc = zlib.crc32(head[2:])
    crc = zlib.crc32(payload, crc)
    return head + payload + _CRC.pack(crc)


@dataclass(frozen=True)
class DecodedFrame:
    msg_type: MessageType
    payload: bytes
    end: int  # offset just past this frame


def decode_frame(data: bytes, offset: int = 0) -> DecodedFrame:
    """Decode exactly one frame starting at ``offset``.

    Raises a distinguishable :class:`FrameError` subclass on any malformed
    input; never returns a payload whose CRC did not verify. The CRC is
    checked before the version and message-type fields so that any corruption
    inside the protected span surfaces as BadCrc.
    """
    avail = len(data) - offset
    if avail >= 1 and data[offset] != MAGIC[0]:
        raise BadMagic("first magic byte mismatch")
    if avail >= 2 and data[offset + 1] != MAGIC[1]:
        raise BadMagic("second magic byte mismatch")
    if avail < HEADER_LEN:
        raise Truncated(f"need {HEADER_LEN} header bytes, have {max(avail, 0)}")
    _, version, msg_type, _flags, payload_len = _HEADER.unpack_from(data, offset)
    needed = OVERHEAD + payload_len
    if payload_len > MAX_PAYLOAD:
        # Only report oversize when the declared frame is actually all there;
        # a short buffer is indistinguishable from any other truncation.
        if avail >= needed:
            raise OversizePayload(f"declared payload of {payload_len} bytes")
        raise Truncated(f"need {needed} bytes, have {avail}")
    if avail < needed:
        raise Truncated(f"need {needed} bytes, have {avail}")
    body_end = offset + HEADER_LEN + payload_len
    crc = zlib.crc32(data[offset + 2 : body_end])
    (want,) = _CRC.unpack_from(data, body_end)
    if crc != want:
        raise BadCrc(f"crc 0x{crc:08x} != 0x{want:08x}")
    if version != VERSION:
        raise BadVersion(f"version {version}")
    if msg_type not in _KNOWN_TYPES:
        raise UnknownMessageType(f"0x{msg_type:02x}")
    return DecodedFrame(MessageType(msg_type), bytes(data[offset + HEADER_LEN : body_end]), offset + needed)


@dataclass(frozen=True)
class FrameEvent:
    """One deframer outcome: a decoded frame or a classified error."""

    frame: DecodedFrame | None = None
    error: FrameError | None = None


class Deframer:
    """Incremental decoder for an ordered byte stream.

    Feed arbitrary chunks; get back a list of events. After any error the
    stream is resynchronized by scanning for the next magic sequence.

    Unlike whole-buffer decoding, the incremental path sanity-checks the
    version and type bytes and the declared length as soon as the header is
    readable: a garbage run that happens to contain the magic must not make
    us wait on (or buffer) megabytes declared by a bogus length field. For
    data that passes those checks the CRC still has the final word.
    """

    def __init__(self) -> None:
        self._buf = bytearray()

    @property
    def pending_bytes(self) -> int:
        return len(self._buf)

    def feed(self, data: bytes) -> list[FrameEvent]:
        self._buf.extend(data)
        events: list[FrameEvent] = []
        while True:
            start = self._buf.find(MAGIC)
            if start < 0:
                # Keep a trailing 0x54 in case its partner arrives next chunk.
                keep = 1 if self._buf[-1:] == MAGIC[:1] else 0
                del self._buf[: len(self._buf) - keep]
                return events
            if start:
                del self._buf[:start]
            if len(self._buf) >= 3 and self._buf[2] != VERSION:
                events.append(FrameEvent(error=BadVersion(f"version {self._buf[2]}")))
                del self._buf[:2]
                continue
            if len(self._buf) >= 4 and self._buf[3] not in _KNOWN_TYPES:
                events.append(FrameEvent(error=UnknownMessageType(f"0x{self._buf[3]:02x}")))
                del self._buf[:2]
                continue
            if len(self._buf) >= HEADER_LEN:
                payload_len = int.from_bytes(self._buf[5:9], "big")
                if payload_len > MAX_PAYLOAD:
                    events.append(FrameEvent(error=OversizePayload(f"declared payload of {payload_len} bytes")))
                    del self._buf[:2]
                    continue
            try:
                decoded = decode_frame(self._buf)
            except Truncated:
                return events
            except FrameError as exc:
                events.append(FrameEvent(error=exc))
                del self._buf[:2]
                continue
            events.append(FrameEvent(frame=decoded))
            del self._buf[: decoded.end]

    def frames(self, data: bytes) -> Iterator[DecodedFrame]:
        """Feed and yield only the decoded frames, ignoring errors."""
        for event in self.feed(data):
            if event.frame is not None:
                yield event.frame


def read_frame(reader) -> tuple[MessageType, bytes]:
    """Blocking read of exactly one frame from a file-like object.

    ``reader.read(n)`` must return at most n bytes, b"" at EOF. EOF before a
    complete frame raises Truncated (mid-frame) or EOFError (clean boundary).
    """
    head = _read_exact(reader, HEADER_LEN, eof_ok=True)
    if head is None:
        raise EOFError("no frame")
    magic, version, msg_type, _flags, payload_len = _HEADER.unpack(head)
    if magic != MAGIC:
        raise BadMagic(repr(magic))
    if payload_len > MAX_PAYLOAD:
        raise OversizePayload(f"declared payload of {payload_len} bytes")
    rest = _read_exact(reader, payload_len + 4)
    frame = head + rest
    decoded = decode_frame(frame)
    return decoded.msg_type, decoded.payload


def _read_exact(reader, n: int, eof_ok: bool = False):
    buf = bytearray()
    while len(buf) < n:
        chunk = reader.read(n - len(buf))
        if not chunk:
            if eof_ok and not buf:
                return None
            raise Truncated(f"stream ended, need {n} bytes, have {len(buf)}")
        buf.extend(chunk)
    return bytes(buf)
