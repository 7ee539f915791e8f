"""Procedural synthesis, formula-identical to the main stack's mock backend.

This is a deliberate reimplementation, not an import: two independent
codebases (sharing only the pinned sine-table literals) must produce
byte-identical output, which is exactly what the shared conformance goldens
assert. Keep every rounding rule in lockstep:

    duration_ms = max(300, round_half_up(n_chars * 1000 / speaking_rate))
    n_samples   = round_half_up(duration_ms * 16000 / 1000)
    phase_step  = round_half_up(base_freq * 2**32 / 16000), 32-bit accumulator
    sample      = 0 on whitespace spans, else (amp * sine[acc >> 22 & 1023]) >> 15
    frames      = ceil(n_samples * fps / rate)
    gray        = round_half_up(255 * rms(window) / 32767), clamped to 255
    mouth rect  = rows [h - h//3, h), cols [w//4, w//4 + w//2)
"""

from __future__ import annotations

import math
import struct

from txt2vid_adapter._sine_table import SINE_TABLE

SAMPLE_RATE = 16000
MIN_TTS_MS = 300
MIN_LIPSYNC_MS = 200

_RAW_HEADER = struct.Struct(">III")


class SynthError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        self.message = message
        super().__init__(message)


def procedural_tts(text: str, speaking_rate: float = 15.0, base_freq: float = 440.0,
                   amplitude: int = 8000) -> tuple[bytes, int]:
    if not text:
        raise SynthError("empty_text", "text must be non-empty")
    duration_ms = max(MIN_TTS_MS, int(math.floor(len(text) * 1000.0 / speaking_rate + 0.5)))
    n_samples = int(math.floor(duration_ms * SAMPLE_RATE / 1000.0 + 0.5))
    phase_step = int(math.floor(base_freq * 4294967296.0 / SAMPLE_RATE + 0.5))
    mask = [0 if ch.isspace() else 1 for ch in text]
    n_chars = len(mask)
    out = bytearray(2 * n_samples)
    acc = 0
    for i in range(n_samples):
        if mask[i * n_chars // n_samples]:
            val = (amplitude * SINE_TABLE[(acc >> 22) & 1023]) >> 15
            out[2 * i] = val & 0xFF
            out[2 * i + 1] = (val >> 8) & 0xFF
        acc = (acc + phase_step) & 0xFFFFFFFF
    return bytes(out), SAMPLE_RATE


def decode_raw_video(blob: bytes) -> tuple[bytes, int, int, int]:
    """RAW0 driving-video container: u32 frame count, width, height + frames."""
    if len(blob) < _RAW_HEADER.size:
        raise SynthError("bad_request", "raw video blob too short")
    n, w, h = _RAW_HEADER.unpack_from(blob, 0)
    frames = blob[_RAW_HEADER.size :]
    if n < 1 or len(frames) != n * w * h * 3:
        raise SynthError("bad_request", "raw video blob length mismatch")
    return frames, n, w, h


def procedural_lipsync(
    profile: tuple[bytes, int, int, int], pcm_s16le: bytes, sample_rate: int, fps: int
) -> tuple[bytes, int, int, int]:
    frames_blob, n_profile, width, height = profile
    n = len(pcm_s16le) // 2
    if n * 1000 < MIN_LIPSYNC_MS * sample_rate:
        raise SynthError(
            "audio_too_short",
            f"{n * 1000.0 / sample_rate:.1f} ms of audio, need >= {MIN_LIPSYNC_MS} ms",
        )
    samples = struct.unpack(f"<{n}h", pcm_s16le[: 2 * n])
    n_frames = (n * fps + sample_rate - 1) // sample_rate
    frame_size = width * height * 3
    y0 = height - height // 3
    x0 = width // 4
    rect_w = width // 2
    out = bytearray(n_frames * frame_size)
    for k in range(n_frames):
        s0 = k * sample_rate // fps
        s1 = min(n, (k + 1) * sample_rate // fps)
        gray = 0
        if s1 > s0:
            sumsq = 0
            for j in range(s0, s1):
                v = samples[j]
                sumsq += v * v
            rms = math.sqrt(sumsq / (s1 - s0))
            gray = int(rms * 255.0 / 32767.0 + 0.5)
            gray = 255 if gray > 255 else gray
        src = (k % n_profile) * frame_size
        base = k * frame_size
        out[base : base + frame_size] = frames_blob[src : src + frame_size]
        fill = bytes([gray]) * (rect_w * 3)
        for y in range(y0, height):
            row = base + (y * width + x0) * 3
            out[row : row + rect_w * 3] = fill
    return bytes(out), n_frames, width, height
