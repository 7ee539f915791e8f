"""Media sinks: where paced frames and chunk audio land.

The external-muxer process contract (used for .mp4/.mkv output and the
gateway's HTTP stream) is: raw RGB24 frames on stdin, PCM via a side WAV
file, pinned argument template recorded in the output metadata. When no
muxer binary is available, FILE mode falls back to the built-in AVI writer
so the pipeline still produces a standard, playable container.
"""

from __future__ import annotations

import shutil
import subprocess
import tempfile
import wave
from pathlib import Path

from txt2vid.media import PcmAudio, VideoFrame
from txt2vid.pipeline.avi import write_avi

MUXER_ARGS_TEMPLATE = (
    "{muxer} -y -loglevel error "
    "-f rawvideo -pix_fmt rgb24 -s {width}x{height} -r {fps} -i - "
    "-i {wav} -c:v libx264 -preset veryfast -crf 23 -pix_fmt yuv420p "
    "-c:a aac -shortest {out}"
)


class SinkStall(Exception):
    """The sink could not absorb media (muxer died, disk full, ...)."""


class CollectingSink:
    """In-memory sink used by tests and the deterministic runner."""

    def __init__(self) -> None:
        self.frames: list[VideoFrame] = []
        self.audio = bytearray()
        self.sample_rate: int | None = None
        self.finalized = False

    def write_audio(self, audio: PcmAudio) -> None:
        if self.sample_rate is None:
            self.sample_rate = audio.sample_rate
        self.audio.extend(audio.data)

    def write_frames(self, frames: list[VideoFrame]) -> None:
        for frame in frames:
            if self.frames and frame.presentation_ts_ms <= self.frames[-1].presentation_ts_ms:
                raise SinkStall("frame pts regressed")
            self.frames.append(frame)

    def finalize(self) -> None:
        self.finalized = True

    @property
    def audio_ms(self) -> float:
        if self.sample_rate is None:
            return 0.0
        return len(self.audio) / 2 * 1000.0 / self.sample_rate

    @property
    def video_ms(self) -> float:
        if not self.frames:
            return 0.0
        fps_interval = (
            self.frames[1].presentation_ts_ms - self.frames[0].presentation_ts_ms
            if len(self.frames) > 1
            else 40
        )
        return self.frames[-1].presentation_ts_ms + fps_interval


class FileSink(CollectingSink):
    """Buffer the session, then write one container file on finalize.

    ``.avi`` uses the built-in writer; anything else shells out to the
    external muxer (ffmpeg-compatible argument template above).
    """

    def __init__(self, path: str | Path, fps: int, muxer: str | None = None):
        super().__init__()
        self.path = Path(path)
        self.fps = fps
        self.muxer = muxer
        if self.path.suffix.lower() != ".avi" and not muxer:
            found = shutil.which("ffmpeg")
            if not found:
                raise SinkStall(
                    f"no muxer available for {self.path.suffix!r} output; "
                    "install ffmpeg or write .avi"
                )
            self.muxer = found

    def finalize(self) -> None:
        super().finalize()
        if not self.frames:
            raise SinkStall("no frames to write")
        width, height = self.frames[0].width, self.frames[0].height
        rate = self.sample_rate or 16000
        if self.path.suffix.lower() == ".avi":
            with open(self.path, "wb") as fh:
                write_avi(
                    fh,
                    [f.data for f in self.frames],
                    width,
                    height,
                    self.fps,
                    bytes(self.audio),
                    rate,
                )
            return
        self._run_muxer(width, height, rate)

    def _run_muxer(self, width: int, height: int, rate: int) -> None:
        with tempfile.NamedTemporaryFile(suffix=".wav", delete=False) as tmp:
            wav_path = tmp.name
        try:
            with wave.open(wav_path, "wb") as wf:
                wf.setnchannels(1)
                wf.setsampwidth(2)
                wf.setframerate(rate)
                wf.writeframes(bytes(self.audio))
            args = MUXER_ARGS_TEMPLATE.format(
                muxer=self.muxer,
                width=width,
                height=height,
                fps=self.fps,
                wav=wav_path,
                out=str(self.path),
            ).split()
            proc = subprocess.Popen(args, stdin=subprocess.PIPE, stderr=subprocess.PIPE)
            assert proc.stdin is not None
            try:
                for frame in self.frames:
                    proc.stdin.write(frame.data)
            except BrokenPipeError as exc:
                proc.wait(timeout=60)
                raise SinkStall("muxer exited early") from exc
            _, err = proc.communicate(timeout=300)
            if proc.returncode != 0:
                raise SinkStall(f"muxer failed: {err.decode(errors='replace')[:500]}")
        finally:
            Path(wav_path).unlink(missing_ok=True)
