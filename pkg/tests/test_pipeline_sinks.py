"""Container output: built-in AVI writer and the external-muxer path."""

import json
import shutil
import struct
import subprocess

import pytest

from txt2vid.media import PcmAudio, gradient_frames
from txt2vid.pipeline import CollectingSink, EndOfSession, FileSink, Mode, MockSessionBackend, PipelineConfig, SinkStall, run_pipeline
from txt2vid.media import VideoFrame

from tests.test_pipeline_runner import TEXT_1S, text_event

FFPROBE = shutil.which("ffprobe")
FFMPEG = shutil.which("ffmpeg")


def probe(path):
    out = subprocess.run(
        [FFPROBE, "-v", "error", "-show_streams", "-show_format", "-of", "json", str(path)],
        capture_output=True,
        check=True,
    )
    return json.loads(out.stdout)


def run_file_session(sink):
    backend = MockSessionBackend(gradient_frames(2, 64, 48, seed=1))
    events = [text_event(0, 1000, TEXT_1S), EndOfSession(1000, 1000)]
    return run_pipeline(events, backend, sink, PipelineConfig(mode=Mode.FILE))


def test_avi_output_riff_structure(tmp_path):
    path = tmp_path / "out.avi"
    stats = run_file_session(FileSink(path, fps=25))
    data = path.read_bytes()
    assert data[:4] == b"RIFF" and data[8:12] == b"AVI "
    (riff_len,) = struct.unpack("<I", data[4:8])
    assert riff_len == len(data) - 8
    assert stats.frames_emitted == 25


@pytest.mark.skipif(FFPROBE is None, reason="ffprobe not installed")
def test_avi_output_probes_correctly(tmp_path):
    path = tmp_path / "out.avi"
    run_file_session(FileSink(path, fps=25))
    info = probe(path)
    streams = {s["codec_type"]: s for s in info["streams"]}
    assert streams["video"]["codec_name"] == "rawvideo"
    assert int(streams["video"]["nb_frames"]) == 25
    assert streams["audio"]["codec_name"] == "pcm_s16le"
    assert float(info["format"]["duration"]) == pytest.approx(1.0, abs=0.05)


@pytest.mark.skipif(FFMPEG is None or FFPROBE is None, reason="external muxer not installed")
def test_mp4_output_via_external_muxer(tmp_path):
    path = tmp_path / "out.mp4"
    run_file_session(FileSink(path, fps=25))
    info = probe(path)
    codecs = {s["codec_name"] for s in info["streams"]}
    assert "h264" in codecs and "aac" in codecs
    assert float(info["format"]["duration"]) == pytest.approx(1.0, abs=0.1)


def test_mp4_without_muxer_fails_loudly(tmp_path, monkeypatch):
    monkeypatch.setattr(shutil, "which", lambda _name: None)
    with pytest.raises(SinkStall):
        FileSink(tmp_path / "out.mp4", fps=25)


def test_sink_rejects_pts_regression():
    sink = CollectingSink()
    frame = VideoFrame(2, 2, 0, bytes(12))
    sink.write_frames([frame])
    with pytest.raises(SinkStall):
        sink.write_frames([frame])
