"""Pure-Python reference implementations of the hot synthesis kernels.

These are the semantics of record: the compiled lane in ``_kernels.pyx`` must
produce byte-identical output for every input. All arithmetic is integer (or
IEEE-754 double in a fixed expression order) so results do not drift across
platforms or lanes.

PCM is signed 16-bit little-endian mono throughout.
"""

from __future__ import annotations

import math
import struct

from txt2vid._sine_table import SINE_TABLE

IMPLEMENTATION = "python"

_PHASE_SHIFT = 22  # 32-bit accumulator -> 10-bit table index
_TABLE_MASK = 1023


def synth_gated_sine(
    n_samples: int, voiced_mask: bytes, phase_step: int, amplitude: int
) -> bytes:
    """Synthesize a fixed-frequency tone gated by a per-character mask.

    Sample i belongs to character ``i * len(mask) // n_samples``; samples in
    unvoiced (mask==0) spans are silent. The phase accumulator keeps running
    through silent spans so the tone is phase-continuous.
    """
    n_chars = len(voiced_mask)
    out = bytearray(2 * n_samples)
    acc = 0
    pos = 0
    for i in range(n_samples):
        if n_chars and voiced_mask[i * n_chars // n_samples]:
            val = (amplitude * SINE_TABLE[(acc >> _PHASE_SHIFT) & _TABLE_MASK]) >> 15
            out[pos] = val & 0xFF
            out[pos + 1] = (val >> 8) & 0xFF
        pos += 2
        acc = (acc + phase_step) & 0xFFFFFFFF
    return bytes(out)


def frame_gray_levels(pcm_le: bytes, sample_rate: int, fps: int) -> bytes:
    """Per-frame gray level from the RMS of each frame's audio window.

    Frame i covers samples [i*rate//fps, (i+1)*rate//fps); the number of
    frames is ceil(n_samples * fps / rate). Gray is 255 at full-scale RMS.
    """
    n = len(pcm_le) // 2
    if n == 0:
        return b""
    samples = struct.unpack("<%dh" % n, pcm_le[: 2 * n])
    n_frames = (n * fps + sample_rate - 1) // sample_rate
    grays = bytearray(n_frames)
    for i in range(n_frames):
        s0 = i * sample_rate // fps
        s1 = min(n, (i + 1) * sample_rate // fps)
        if s1 <= s0:
            continue
        sumsq = 0
        for j in range(s0, s1):
            v = samples[j]
            sumsq += v * v
        rms = math.sqrt(sumsq / (s1 - s0))
        g = int(rms * 255.0 / 32767.0 + 0.5)
        grays[i] = 255 if g > 255 else g
    return bytes(grays)


def render_mouth_frames(
    profile_rgb: bytes,
    n_profile: int,
    width: int,
    height: int,
    grays: bytes,
    start_index: int = 0,
) -> bytes:
    """Render frames by looping profile frames and painting the mouth region.

    Output frame k copies profile frame (start_index+k) mod n_profile and
    fills the bottom-third, middle-half rectangle with gray level grays[k].
    Frames are RGB24, row-major, no padding.
    """
    frame_size = width * height * 3
    if n_profile <= 0 or len(profile_rgb) != n_profile * frame_size:
        raise ValueError("profile buffer does not match frame geometry")
    y0 = height - height // 3
    x0 = width // 4
    rect_w = width // 2
    out = bytearray(len(grays) * frame_size)
    for k, gray in enumerate(grays):
        src = (start_index + k) % n_profile * frame_size
        base = k * frame_size
        out[base : base + frame_size] = profile_rgb[src : src + frame_size]
        fill = bytes([gray]) * (rect_w * 3)
        for y in range(y0, height):
            row = base + (y * width + x0) * 3
            out[row : row + rect_w * 3] = fill
    return bytes(out)
