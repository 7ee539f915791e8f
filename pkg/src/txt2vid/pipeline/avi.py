"""Minimal RIFF/AVI writer: uncompressed BGR24 video plus PCM s16le audio.

Kept deliberately tiny; it exists so FILE mode can produce a playable,
probe-able container even on hosts with no external muxer installed. Frames
come in as RGB24 top-down and are stored as bottom-up BGR (BI_RGB), the one
layout every AVI reader agrees on.
"""

from __future__ import annotations

import struct
from typing import BinaryIO


def _chunk(fourcc: bytes, body: bytes) -> bytes:
    pad = b"\x00" if len(body) % 2 else b""
    return fourcc + struct.pack("<I", len(body)) + body + pad


def _list(kind: bytes, body: bytes) -> bytes:
    return _chunk(b"LIST", kind + body)


def _rgb_to_bottom_up_bgr(frame: bytes, width: int, height: int) -> bytes:
    row = width * 3
    out = bytearray(len(frame))
    for y in range(height):
        src = frame[y * row : (y + 1) * row]
        dst = (height - 1 - y) * row
        out[dst : dst + row] = src
        out[dst : dst + row : 3], out[dst + 2 : dst + row : 3] = (
            src[2::3],
            src[0::3],
        )
    return bytes(out)


def write_avi(
    fh: BinaryIO,
    frames: list[bytes],
    width: int,
    height: int,
    fps: int,
    pcm_s16le: bytes,
    sample_rate: int,
) -> None:
    if not frames:
        raise ValueError("cannot write an AVI with zero frames")
    frame_bytes = width * height * 3
    if any(len(f) != frame_bytes for f in frames):
        raise ValueError("frame size mismatch")

    audio_chunk = len(pcm_s16le)  # single audio chunk keeps the index simple
    movi = bytearray()
    index = bytearray()

    def add(fourcc: bytes, body: bytes) -> None:
        index.extend(fourcc + struct.pack("<III", 0x10, 8 + len(movi), len(body)))
        movi.extend(_chunk(fourcc, body))

    if audio_chunk:
        add(b"01wb", pcm_s16le)
    for frame in frames:
        add(b"00db", _rgb_to_bottom_up_bgr(frame, width, height))

    avih = struct.pack(
        "<IIIIIIIIIIIIII",
        1_000_000 // fps,  # microseconds per frame
        frame_bytes * fps,  # max bytes per sec (uncompressed upper bound)
        0,
        0x10,  # AVIF_HASINDEX
        len(frames),
        0,
        2 if audio_chunk else 1,
        frame_bytes,
        width,
        height,
        0,
        0,
        0,
        0,
    )

    video_strh = struct.pack(
        "<4s4sIHHIIIIIIIIhhhh",
        b"vids",
        b"\x00\x00\x00\x00",  # BI_RGB
        0,
        0,
        0,
        0,
        1,
        fps,
        0,
        len(frames),
        frame_bytes,
        0xFFFFFFFF,
        0,
        0,
        0,
        width,
        height,
    )
    video_strf = struct.pack(
        "<IiiHHIIiiII", 40, width, height, 1, 24, 0, frame_bytes, 0, 0, 0, 0
    )
    streams = _list(
        b"strl", _chunk(b"strh", video_strh) + _chunk(b"strf", video_strf)
    )

    if audio_chunk:
        n_samples = audio_chunk // 2
        audio_strh = struct.pack(
            "<4s4sIHHIIIIIIIIhhhh",
            b"auds",
            b"\x00\x00\x00\x00",
            0,
            0,
            0,
            0,
            1,
            sample_rate,
            0,
            n_samples,
            audio_chunk,
            0xFFFFFFFF,
            2,
            0,
            0,
            0,
            0,
        )
        audio_strf = struct.pack(
            "<HHIIHH", 1, 1, sample_rate, sample_rate * 2, 2, 16
        )
        streams += _list(
            b"strl", _chunk(b"strh", audio_strh) + _chunk(b"strf", audio_strf)
        )

    hdrl = _list(b"hdrl", _chunk(b"avih", avih) + streams)
    movi_list = _list(b"movi", bytes(movi))
    idx1 = _chunk(b"idx1", bytes(index))
    riff_body = b"AVI " + hdrl + movi_list + idx1
    fh.write(b"RIFF" + struct.pack("<I", len(riff_body)) + riff_body)
