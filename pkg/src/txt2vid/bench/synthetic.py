"""Synthetic benchmark clip: scrolling gradient video plus a steady tone.

Lets the harness (and CI) run without any media assets. Frames are generated
in Python and piped raw into the transcoder; only the tone comes from the
transcoder's signal generator.
"""

from __future__ import annotations

import subprocess
from pathlib import Path

from txt2vid.bench.transcode import EncodeFailed, Transcoder


def _gradient_frame(index: int, width: int, height: int) -> bytes:
    frame = bytearray(width * height * 3)
    ramp = bytes((index + x) % 256 for x in range(width + 256))
    for y in range(height):
        row = (y * width) * 3
        shade = (index * 2 + y) % 256
        frame[row : row + width * 3 : 3] = ramp[(index + y) % 256 : (index + y) % 256 + width]
        frame[row + 1 : row + width * 3 : 3] = ramp[:width]
        frame[row + 2 : row + width * 3 : 3] = bytes([shade]) * width
    return bytes(frame)


def generate_clip(
    path: str | Path,
    transcoder: Transcoder,
    duration_s: float = 6.0,
    width: int = 640,
    height: int = 360,
    fps: int = 25,
    tone_hz: int = 440,
) -> Path:
    path = Path(path)
    n_frames = int(duration_s * fps)
    args = [
        transcoder.path,
        "-y",
        "-loglevel", "error",
        "-f", "rawvideo",
        "-pix_fmt", "rgb24",
        "-s", f"{width}x{height}",
        "-r", str(fps),
        "-i", "-",
        "-f", "lavfi",
        "-i", f"sine=frequency={tone_hz}:sample_rate=16000:duration={duration_s}",
        "-c:v", "libx264",
        "-preset", "fast",
        "-crf", "18",
        "-pix_fmt", "yuv420p",
        "-c:a", "aac",
        "-b:a", "64k",
        "-shortest",
        str(path),
    ]
    proc = subprocess.Popen(args, stdin=subprocess.PIPE, stderr=subprocess.PIPE)
    assert proc.stdin is not None
    try:
        for i in range(n_frames):
            proc.stdin.write(_gradient_frame(i, width, height))
    except BrokenPipeError:
        pass
    _, err = proc.communicate(timeout=600)
    if proc.returncode != 0:
        raise EncodeFailed("synthetic clip generation failed", err.decode(errors="replace"))
    return path
