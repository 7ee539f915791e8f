"""External transcoder driving: probing, encoding, bitrate measurement.

No codec ever runs in-process; everything goes through an ffmpeg-compatible
binary found on PATH (or given explicitly). Each grid encode follows the
downsample-then-encode flow: normalize to 720p/25fps/yuv420p, scale down by
the row's factor, encode at the row's CRF (audio: resample to 16 kHz over
the audio factor, encode AAC at the row's bitrate), then mux. Decoding
upsamples back to the 720p target; that command is recorded in the result
rather than executed, since only encoded sizes matter for rate measurement.
"""

from __future__ import annotations

import json
import re
import shutil
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from txt2vid.bench.grid import CodecParams


class TranscoderMissing(Exception):
    pass


class EncodeFailed(Exception):
    def __init__(self, message: str, stderr: str = ""):
        self.stderr = stderr
        super().__init__(message)


@dataclass(frozen=True)
class Transcoder:
    path: str
    version: str
    has_h264: bool
    has_av1: bool
    av1_needs_strict: bool
    ffprobe: str | None


def find_transcoder(path: str | None = None) -> Transcoder:
    """Locate and capability-probe the external transcoder."""
    binary = path or shutil.which("ffmpeg")
    if not binary or not Path(binary).exists():
        raise TranscoderMissing("no ffmpeg-compatible transcoder found on PATH")
    try:
        version_out = subprocess.run(
            [binary, "-version"], capture_output=True, text=True, timeout=30
        ).stdout
        encoders = subprocess.run(
            [binary, "-hide_banner", "-encoders"], capture_output=True, text=True, timeout=30
        ).stdout
    except (OSError, subprocess.TimeoutExpired) as exc:
        raise TranscoderMissing(f"cannot run {binary}: {exc}") from exc
    version = version_out.splitlines()[0] if version_out else "unknown"
    has_h264 = "libx264" in encoders
    av1_line = next((l for l in encoders.splitlines() if "libaom-av1" in l), "")
    probe = shutil.which("ffprobe")
    return Transcoder(
        path=binary,
        version=version,
        has_h264=has_h264,
        has_av1=bool(av1_line),
        av1_needs_strict="X" in av1_line.split()[0] if av1_line else False,
        ffprobe=probe,
    )


def _run(args: list[str], timeout: int = 600) -> subprocess.CompletedProcess:
    return subprocess.run(args, capture_output=True, text=True, timeout=timeout)


def probe_duration_ms(transcoder: Transcoder, path: str | Path) -> int:
    if transcoder.ffprobe:
        out = _run(
            [
                transcoder.ffprobe,
                "-v", "error",
                "-show_entries", "format=duration",
                "-of", "json",
                str(path),
            ]
        )
        if out.returncode == 0:
            return int(float(json.loads(out.stdout)["format"]["duration"]) * 1000)
    # fall back to parsing the transcoder's own banner
    out = _run([transcoder.path, "-i", str(path)])
    match = re.search(r"Duration: (\d+):(\d+):(\d+)\.(\d+)", out.stderr)
    if not match:
        raise EncodeFailed(f"cannot determine duration of {path}", out.stderr)
    h, m, s, cs = (int(g) for g in match.groups())
    return ((h * 60 + m) * 60 + s) * 1000 + cs * 10


def probe_stream_bitrates(transcoder: Transcoder, path: str | Path) -> tuple[float, float]:
    """Independent per-stream rate probe of an encoded file (bps)."""
    if transcoder.ffprobe:
        out = _run(
            [
                transcoder.ffprobe,
                "-v", "error",
                "-show_streams",
                "-show_format",
                "-of", "json",
                str(path),
            ]
        )
        if out.returncode == 0:
            info = json.loads(out.stdout)
            duration = float(info["format"]["duration"])
            video_bps = audio_bps = 0.0
            for stream in info["streams"]:
                rate = stream.get("bit_rate")
                if rate is None:  # containers like mkv don't store it
                    continue
                if stream["codec_type"] == "video":
                    video_bps = float(rate)
                elif stream["codec_type"] == "audio":
                    audio_bps = float(rate)
            if video_bps and audio_bps:
                return video_bps, audio_bps
    # generic fallback: demux each stream with -c copy and size the result
    duration_ms = probe_duration_ms(transcoder, path)
    rates = []
    for selector, ext in (("0:v:0", ".mkv"), ("0:a:0", ".mkv")):
        with tempfile.NamedTemporaryFile(suffix=ext, delete=False) as tmp:
            tmp_path = tmp.name
        try:
            out = _run(
                [transcoder.path, "-y", "-loglevel", "error", "-i", str(path),
                 "-map", selector, "-c", "copy", tmp_path]
            )
            if out.returncode != 0:
                raise EncodeFailed(f"stream copy failed for {selector}", out.stderr)
            rates.append(Path(tmp_path).stat().st_size * 8000.0 / duration_ms)
        finally:
            Path(tmp_path).unlink(missing_ok=True)
    return rates[0], rates[1]


@dataclass
class EncodeResult:
    params: CodecParams
    content_id: str
    video_bps: float = 0.0
    audio_bps: float = 0.0
    total_bps: float = 0.0
    file_bytes: int = 0
    duration_ms: int = 0
    skipped: bool = False
    error: str = ""
    encode_args: dict[str, str] = field(default_factory=dict)


def _video_args(transcoder: Transcoder, params: CodecParams) -> list[str]:
    # normalize to the 720p/25fps/yuv420p target, then downsample
    filters = f"scale=1280:720,fps=25,format=yuv420p,scale={params.width}:{params.height}"
    if params.video_codec == "h264":
        codec = ["-c:v", "libx264", "-preset", "medium", "-crf", str(params.crf)]
    else:
        codec = ["-c:v", "libaom-av1", "-b:v", "0", "-crf", str(params.crf), "-cpu-used", "8"]
        if transcoder.av1_needs_strict:
            codec += ["-strict", "-2"]
    return ["-vf", filters, *codec, "-an"]


def _audio_args(params: CodecParams) -> list[str]:
    return [
        "-vn",
        "-ar", str(params.sample_rate),
        "-ac", "1",
        "-c:a", "aac",
        "-b:a", f"{params.audio_br_kbps}k",
    ]


def decode_command(params: CodecParams, encoded: str, output: str) -> str:
    """The upsample-at-decode step, recorded for reproducibility."""
    return (
        f"ffmpeg -i {encoded} -vf scale=1280:720 -ar 16000 "
        f"-c:v rawvideo -c:a pcm_s16le {output}"
    )


def encode_benchmark(
    input_path: str | Path,
    params: CodecParams,
    transcoder: Transcoder,
    content_id: str | None = None,
    workdir: str | Path | None = None,
) -> EncodeResult:
    """Run one grid row against one input clip and measure achieved rates."""
    input_path = Path(input_path)
    content_id = content_id or input_path.stem
    result = EncodeResult(params=params, content_id=content_id)
    if params.video_codec == "av1" and not transcoder.has_av1:
        result.skipped = True
        result.error = "transcoder has no AV1 encoder"
        return result
    if params.video_codec == "h264" and not transcoder.has_h264:
        result.skipped = True
        result.error = "transcoder has no H.264 encoder"
        return result
    if not input_path.exists() or input_path.stat().st_size == 0:
        raise EncodeFailed(f"input {input_path} is missing or empty")

    duration_ms = probe_duration_ms(transcoder, input_path)
    own_dir = workdir is None
    workdir = Path(tempfile.mkdtemp(prefix="bench-")) if own_dir else Path(workdir)
    video_ext = ".mp4" if params.video_codec == "h264" else ".mkv"
    video_file = workdir / f"{content_id}-{params.key}-v{video_ext}"
    audio_file = workdir / f"{content_id}-{params.key}-a.m4a"
    muxed_file = workdir / f"{content_id}-{params.key}{video_ext}"
    try:
        vargs = [transcoder.path, "-y", "-loglevel", "error", "-i", str(input_path),
                 *_video_args(transcoder, params), str(video_file)]
        aargs = [transcoder.path, "-y", "-loglevel", "error", "-i", str(input_path),
                 *_audio_args(params), str(audio_file)]
        for args in (vargs, aargs):
            out = _run(args)
            if out.returncode != 0:
                raise EncodeFailed(f"encode failed: {' '.join(args)}", out.stderr)
        margs = [transcoder.path, "-y", "-loglevel", "error",
                 "-i", str(video_file), "-i", str(audio_file), "-c", "copy",
                 str(muxed_file)]
        out = _run(margs)
        if out.returncode != 0:
            raise EncodeFailed("mux failed", out.stderr)
        result.duration_ms = duration_ms
        result.video_bps = video_file.stat().st_size * 8000.0 / duration_ms
        result.audio_bps = audio_file.stat().st_size * 8000.0 / duration_ms
        result.file_bytes = muxed_file.stat().st_size
        result.total_bps = result.file_bytes * 8000.0 / duration_ms
        result.encode_args = {
            "video": " ".join(vargs[1:]),
            "audio": " ".join(aargs[1:]),
            "mux": " ".join(margs[1:]),
            "decode": decode_command(params, muxed_file.name, "decoded.y4m"),
            "transcoder": transcoder.version,
        }
    finally:
        if own_dir:
            shutil.rmtree(workdir, ignore_errors=True)
    return result
