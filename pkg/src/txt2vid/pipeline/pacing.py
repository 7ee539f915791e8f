"""Frame pacing: map synthesized frame batches onto a fixed fps timeline.

The pacing law: after any amount of audio, the number of frames emitted is
ceil(audio_samples * fps / rate). Backends may hand over one extra frame per
batch (they round each chunk up independently); the pacer drops the surplus
so audio/video drift can never accumulate past one frame interval.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from txt2vid.media import VideoFrame


@dataclass(frozen=True)
class FrameBatch:
    """Frames synthesized for one audio chunk."""

    frames: list[bytes]
    n_samples: int
    sample_rate: int
    width: int
    height: int


class FramePacer:
    """Stateful pacer; one per output stream."""

    def __init__(self, fps: int) -> None:
        if fps <= 0:
            raise ValueError("fps must be positive")
        self.fps = fps
        self._emitted = 0
        self._samples = 0
        self._rate: int | None = None

    @property
    def frames_emitted(self) -> int:
        return self._emitted

    def video_ms(self) -> int:
        return self._emitted * 1000 // self.fps

    def audio_ms(self) -> float:
        if not self._rate:
            return 0.0
        return self._samples * 1000.0 / self._rate

    def push(self, batch: FrameBatch) -> list[VideoFrame]:
        if self._rate is None:
            self._rate = batch.sample_rate
        elif self._rate != batch.sample_rate:
            raise ValueError("sample rate changed mid-stream")
        self._samples += batch.n_samples
        target = (self._samples * self.fps + self._rate - 1) // self._rate
        want = target - self._emitted
        out = []
        for data in batch.frames[:want]:
            out.append(
                VideoFrame(
                    width=batch.width,
                    height=batch.height,
                    presentation_ts_ms=self._emitted * 1000 // self.fps,
                    data=data,
                )
            )
            self._emitted += 1
        return out


def pace_frames(batches: Iterable[FrameBatch], fps: int) -> Iterator[VideoFrame]:
    """Generator form of the pacer."""
    pacer = FramePacer(fps)
    for batch in batches:
        yield from pacer.push(batch)
