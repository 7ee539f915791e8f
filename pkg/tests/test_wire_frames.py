"""Framing layer: golden bytes, round-trips, corruption, resync."""

import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from txt2vid.wire import frames
from txt2vid.wire.frames import (
    BadCrc,
    BadMagic,
    BadVersion,
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


def crc32_bitwise(data: bytes) -> int:
    """Independent CRC-32/IEEE reference (reflected, poly 0xEDB88320)."""
    crc = 0xFFFFFFFF
    for byte in data:
        crc ^= byte
        for _ in range(8):
            crc = (crc >> 1) ^ (0xEDB88320 if crc & 1 else 0)
    return crc ^ 0xFFFFFFFF


def test_golden_hello_abc():
    # layout + CRC pinned via the bitwise oracle above
    frame = encode_frame(MessageType.HELLO, b"abc")
    assert frame.hex() == "545601010000000003616263c3e32035"
    span = frame[2:-4]
    assert crc32_bitwise(span) == 0xC3E32035
    decoded = decode_frame(frame)
    assert decoded.msg_type == MessageType.HELLO
    assert decoded.payload == b"abc"
    assert decoded.end == len(frame) == 16


def test_golden_empty_session_end():
    frame = encode_frame(MessageType.SESSION_END, b"")
    # 9-byte header + 4-byte CRC, no payload
    assert len(frame) == 13
    assert frame.hex() == "545601070000000000261ee472"


def test_payload_len_field():
    frame = encode_frame(MessageType.TEXT_SEGMENT, bytes(100))
    assert len(frame) == 113
    assert frame[5:9] == (100).to_bytes(4, "big")


@given(
    msg_type=st.sampled_from(list(MessageType)),
    payload=st.binary(max_size=4096),
)
def test_round_trip(msg_type, payload):
    decoded = decode_frame(encode_frame(msg_type, payload))
    assert decoded.msg_type == msg_type
    assert decoded.payload == payload


def test_decode_consumes_exactly_one_frame():
    a = encode_frame(MessageType.HELLO, b"one")
    b = encode_frame(MessageType.SESSION_END, b"")
    decoded = decode_frame(a + b)
    assert decoded.payload == b"one"
    second = decode_frame(a + b, offset=decoded.end)
    assert second.msg_type == MessageType.SESSION_END


def test_empty_input_truncated():
    with pytest.raises(Truncated):
        decode_frame(b"")


def test_error_taxonomy():
    good = encode_frame(MessageType.HELLO, b"payload")
    with pytest.raises(BadMagic):
        decode_frame(b"XX" + good[2:])
    with pytest.raises(Truncated):
        decode_frame(good[:-1])
    tampered_version = bytearray(good)
    tampered_version[2] = 9
    with pytest.raises(BadCrc):  # CRC is checked before the version field
        decode_frame(bytes(tampered_version))
    # correct CRC but wrong version -> BadVersion
    body = bytes([9]) + good[3 : len(good) - 4]
    reframed = good[:2] + body + frames._CRC.pack(crc32_bitwise(body))
    with pytest.raises(BadVersion):
        decode_frame(reframed)
    # correct CRC but unknown message type
    body = good[2:3] + bytes([0x7F]) + good[4 : len(good) - 4]
    reframed = good[:2] + body + frames._CRC.pack(crc32_bitwise(body))
    with pytest.raises(UnknownMessageType):
        decode_frame(reframed)


def test_oversize_rejected_on_encode():
    with pytest.raises(OversizePayload):
        encode_frame(MessageType.TEXT_SEGMENT, bytes(frames.MAX_PAYLOAD + 1))


def test_oversize_detected_on_decode():
    # hand-build a frame that declares a payload over the cap
    declared = frames.MAX_PAYLOAD + 5
    header = b"TV" + bytes([1, 1, 0]) + declared.to_bytes(4, "big")
    with pytest.raises(Truncated):
        decode_frame(header)  # frame not all present: truncation wins
    fake = header + bytes(declared) + bytes(4)
    with pytest.raises(OversizePayload):
        decode_frame(fake)


def test_single_bit_flips_never_silent():
    """Any single-bit corruption of a 64-byte frame is caught and classified
    as one of BadCrc / BadMagic / Truncated."""
    frame = encode_frame(MessageType.TEXT_SEGMENT, bytes(range(51)))
    assert len(frame) == 64
    for byte_index in range(64):
        for bit in range(8):
            mutated = bytearray(frame)
            mutated[byte_index] ^= 1 << bit
            with pytest.raises((BadCrc, BadMagic, Truncated)):
                decode_frame(bytes(mutated))


def test_fuzz_decoder_never_lies():
    """Random garbage and mutated frames either fail loudly or decode to a
    frame we actually encoded (module-scale fuzz; acceptance runs 10^5)."""
    rng = random.Random(0xF00D)
    encoded = set()
    for _ in range(2000):
        payload = rng.randbytes(rng.randrange(0, 200))
        msg = rng.choice(list(MessageType))
        encoded.add(encode_frame(msg, payload))
    corpus = list(encoded)
    for _ in range(5000):
        if rng.random() < 0.5:
            data = rng.randbytes(rng.randrange(0, 80))
        else:
            data = bytearray(rng.choice(corpus))
            for _ in range(rng.randrange(1, 4)):
                data[rng.randrange(len(data))] ^= 1 << rng.randrange(8)
            data = bytes(data)
        try:
            decoded = decode_frame(data)
        except FrameError:
            continue
        assert data[: decoded.end] in encoded


def test_deframer_reassembles_split_feeds():
    stream = b"".join(
        encode_frame(MessageType.TEXT_SEGMENT, bytes([i]) * i) for i in range(20)
    )
    deframer = Deframer()
    got = []
    for i in range(0, len(stream), 7):
        for event in deframer.feed(stream[i : i + 7]):
            assert event.error is None
            got.append(event.frame.payload)
    assert got == [bytes([i]) * i for i in range(20)]


def test_deframer_resyncs_after_garbage():
    good = encode_frame(MessageType.HELLO, b"\x01\x02\x03\x04")
    corrupted = bytearray(good)
    corrupted[-1] ^= 0xFF
    stream = b"\x99\x98TV\x00" + bytes(corrupted) + b"junk" + good
    deframer = Deframer()
    events = deframer.feed(stream)
    payloads = [e.frame.payload for e in events if e.frame]
    errors = [type(e.error).__name__ for e in events if e.error]
    assert payloads == [b"\x01\x02\x03\x04"]
    assert "BadCrc" in errors


def test_deframer_oversize_does_not_buffer():
    declared = frames.MAX_PAYLOAD + 1
    header = b"TV" + bytes([1, 1, 0]) + declared.to_bytes(4, "big")
    deframer = Deframer()
    events = deframer.feed(header)
    assert any(isinstance(e.error, OversizePayload) for e in events)
    assert deframer.pending_bytes < len(header)


def test_read_frame_stream():
    buf = io.BytesIO(
        encode_frame(MessageType.HELLO, b"x") + encode_frame(MessageType.SESSION_END, b"")
    )
    assert read_frame(buf) == (MessageType.HELLO, b"x")
    assert read_frame(buf) == (MessageType.SESSION_END, b"")
    with pytest.raises(EOFError):
        read_frame(buf)


@settings(max_examples=200)
@given(data=st.binary(max_size=200))
def test_decode_never_crashes(data):
    try:
        decode_frame(data)
    except FrameError:
        pass
