"""Shared media value types: PCM audio, RGB frames, and the raw-video blob.

PCM is signed 16-bit little-endian mono. Frames are RGB24, row-major, no
padding. The RAW0 blob is the container the procedural backend understands
for driving videos: a 12-byte header (frame count, width, height, all u32
big-endian) followed by the concatenated frames.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

DEFAULT_SAMPLE_RATE = 16000
DEFAULT_FPS = 25
DEFAULT_WIDTH = 1280
DEFAULT_HEIGHT = 720

RAW_VIDEO_TAG = b"RAW0"
_RAW_HEADER = struct.Struct(">III")


@dataclass(frozen=True)
class PcmAudio:
    data: bytes
    sample_rate: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self) -> None:
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if len(self.data) % 2:
            raise ValueError("PCM s16 data must have an even byte length")

    @property
    def n_samples(self) -> int:
        return len(self.data) // 2

    @property
    def duration_ms(self) -> float:
        return self.n_samples * 1000.0 / self.sample_rate

    def slice_samples(self, start: int, end: int) -> "PcmAudio":
        return PcmAudio(self.data[2 * start : 2 * end], self.sample_rate)


def silence(n_samples: int, sample_rate: int = DEFAULT_SAMPLE_RATE) -> PcmAudio:
    return PcmAudio(bytes(2 * n_samples), sample_rate)


def concat_audio(parts: list[PcmAudio]) -> PcmAudio:
    if not parts:
        return PcmAudio(b"")
    rate = parts[0].sample_rate
    if any(p.sample_rate != rate for p in parts):
        raise ValueError("cannot concatenate mixed sample rates")
    return PcmAudio(b"".join(p.data for p in parts), rate)


@dataclass(frozen=True)
class VideoFrame:
    width: int
    height: int
    presentation_ts_ms: int
    data: bytes
    pixel_format: str = "rgb24"

    def __post_init__(self) -> None:
        if len(self.data) != self.width * self.height * 3:
            raise ValueError(
                f"frame data is {len(self.data)} bytes, expected {self.width * self.height * 3}"
            )


@dataclass(frozen=True)
class RawVideo:
    """Decoded driving-video frames plus geometry."""

    frames: bytes  # concatenated RGB24 frames
    n_frames: int
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.n_frames <= 0:
            raise ValueError("raw video needs at least one frame")
        if len(self.frames) != self.n_frames * self.frame_size:
            raise ValueError("frame buffer does not match geometry")

    @property
    def frame_size(self) -> int:
        return self.width * self.height * 3

    def frame(self, index: int) -> bytes:
        i = index % self.n_frames
        return self.frames[i * self.frame_size : (i + 1) * self.frame_size]

    def encode(self) -> bytes:
        return _RAW_HEADER.pack(self.n_frames, self.width, self.height) + self.frames

    @classmethod
    def decode(cls, blob: bytes) -> "RawVideo":
        if len(blob) < _RAW_HEADER.size:
            raise ValueError("raw video blob too short")
        n, w, h = _RAW_HEADER.unpack_from(blob, 0)
        frames = blob[_RAW_HEADER.size :]
        if len(frames) != n * w * h * 3:
            raise ValueError("raw video blob length mismatch")
        return cls(frames, n, w, h)


def gradient_frames(
    n_frames: int, width: int, height: int, seed: int = 0
) -> RawVideo:
    """Deterministic synthetic driving video: a diagonal gradient that
    scrolls one step per frame. Cheap to generate at any geometry."""
    row_ramp = bytes((seed + x) % 256 for x in range(width + n_frames + height))
    frames = bytearray()
    for f in range(n_frames):
        for y in range(height):
            base = (f + y) % 256
            start = (f + y) % (len(row_ramp) - width)
            row = row_ramp[start : start + width]
            # R scrolls, G fixed ramp, B row-constant
            frame_row = bytearray(width * 3)
            frame_row[0::3] = row
            frame_row[1::3] = row_ramp[:width]
            frame_row[2::3] = bytes([base]) * width
            frames.extend(frame_row)
    return RawVideo(bytes(frames), n_frames, width, height)
