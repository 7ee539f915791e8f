"""Segment compressors.

Three compressor ids are stable protocol constants:
    0  identity (UTF-8 bytes as-is)
    1  deflate-class stream compressor (zlib, level 9)
    2  bzip2-class block compressor (bz2, level 9) — the reference for
       externally comparable bitrate numbers

Compression levels are pinned so that byte sizes (and therefore reported
bitrates) are reproducible given the same CPython zlib/bz2 builds.
"""

from __future__ import annotations

import bz2
import enum
import zlib


class CompressorId(enum.IntEnum):
    IDENTITY = 0
    DEFLATE = 1
    BZIP2 = 2


class DecompressError(Exception):
    """Body could not be decompressed or is not valid UTF-8."""


def compress_text(text: str, compressor_id: int) -> bytes:
    data = text.encode("utf-8")
    cid = CompressorId(compressor_id)
    if cid is CompressorId.IDENTITY:
        return data
    if cid is CompressorId.DEFLATE:
        return zlib.compress(data, 9)
    return bz2.compress(data, 9)


def decompress_text(body: bytes, compressor_id: int) -> str:
    cid = CompressorId(compressor_id)
    try:
        if cid is CompressorId.IDENTITY:
            raw = bytes(body)
        elif cid is CompressorId.DEFLATE:
            raw = zlib.decompress(body)
        else:
            raw = bz2.decompress(body)
        return raw.decode("utf-8")
    except (zlib.error, OSError, ValueError, UnicodeDecodeError) as exc:
        raise DecompressError(f"{cid.name}: {exc}") from exc
