"""Receiver pipeline orchestration.

A discrete-event engine: segment arrivals go through the jitter buffer, text
is decompressed and synthesized chunk by chunk (each chunk ≥200 ms), frames
are paced onto the fps timeline, and audio+frames land in a sink. Backend
occupancy is modeled explicitly, so an entire session — including latency
percentiles — is a deterministic function of the event script and the
configured backend latencies. No wall-clock sleeps anywhere.

Fault policy: a failed or undecodable chunk/segment is replaced by silence
plus looped driving-video frames of matching duration, keeping the AV-sync
law intact while playback continues.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence, Union

from txt2vid.backend.mock import MockVoiceModel, mock_lipsync, mock_tts
from txt2vid.backend.protocol import BackendClient, BackendError
from txt2vid.media import PcmAudio, RawVideo, silence
from txt2vid.pipeline.audio import chunk_audio
from txt2vid.pipeline.jitter import BufferedSegment, GapMarker, JitterBuffer
from txt2vid.pipeline.pacing import FrameBatch, FramePacer
from txt2vid.textcodec.compress import DecompressError, decompress_text
from txt2vid.wire.payloads import AudioSegmentPayload, TextSegmentPayload


class Mode(enum.Enum):
    FILE = "file"
    STREAM = "stream"
    LIVE = "live"


DEFAULT_JITTER_MS = {Mode.FILE: 0, Mode.STREAM: 5000, Mode.LIVE: 500}


class PipelineBackendError(Exception):
    """Backend failed for one request; carries on to gap substitution."""


@dataclass(frozen=True)
class PipelineConfig:
    mode: Mode = Mode.FILE
    fps: int = 25
    chunk_ms: int = 200
    jitter_buffer_ms: int | None = None  # None -> mode default
    sample_rate: int = 16000
    gap_fill_ms: int = 400

    def __post_init__(self) -> None:
        if self.chunk_ms < 200:
            raise ValueError("chunk_ms must be >= 200 (lip-sync model floor)")
        if self.fps <= 0:
            raise ValueError("fps must be positive")

    @property
    def buffer_ms(self) -> int:
        if self.jitter_buffer_ms is not None:
            return self.jitter_buffer_ms
        return DEFAULT_JITTER_MS[self.mode]


@dataclass(frozen=True)
class SegmentArrival:
    arrival_ms: int
    payload: Union[TextSegmentPayload, AudioSegmentPayload]


@dataclass(frozen=True)
class EndOfSession:
    arrival_ms: int
    capture_ts_ms: int | None = None


Event = Union[SegmentArrival, EndOfSession]


@dataclass
class LatencyStats:
    per_segment_ms: list[tuple[int, int]] = field(default_factory=list)  # (seq, ms)
    stall_count: int = 0
    stall_total_ms: int = 0
    frames_emitted: int = 0
    audio_ms: float = 0.0
    video_ms: float = 0.0
    duplicates_dropped: int = 0
    late_dropped: int = 0

    def _rank(self, pct: float) -> int:
        values = sorted(ms for _, ms in self.per_segment_ms)
        if not values:
            return 0
        rank = max(1, -(-len(values) * pct // 100))  # nearest-rank, ceil
        return values[int(rank) - 1]

    @property
    def p50_ms(self) -> int:
        return self._rank(50)

    @property
    def p95_ms(self) -> int:
        return self._rank(95)

    @property
    def max_ms(self) -> int:
        return max((ms for _, ms in self.per_segment_ms), default=0)

    def summary(self) -> dict:
        return {
            "segments": len(self.per_segment_ms),
            "p50_ms": self.p50_ms,
            "p95_ms": self.p95_ms,
            "max_ms": self.max_ms,
            "stall_count": self.stall_count,
            "stall_total_ms": self.stall_total_ms,
            "frames": self.frames_emitted,
            "audio_ms": self.audio_ms,
            "video_ms": self.video_ms,
        }


class MockSessionBackend:
    """In-process procedural backend with simulated per-call latency."""

    def __init__(
        self,
        profile: RawVideo,
        voice: MockVoiceModel | None = None,
        tts_latency_ms: int = 0,
        lipsync_latency_ms: int = 0,
        fail_chunks: frozenset[int] | set[int] = frozenset(),
    ) -> None:
        self.profile = profile
        self.voice = voice or MockVoiceModel()
        self.tts_latency_ms = tts_latency_ms
        self.lipsync_latency_ms = lipsync_latency_ms
        self.fail_chunks = frozenset(fail_chunks)
        self._calls = 0

    def tts(self, text: str) -> PcmAudio:
        return mock_tts(text, self.voice)

    def lipsync_chunk(self, audio: PcmAudio, fps: int) -> list[bytes]:
        call = self._calls
        self._calls += 1
        if call in self.fail_chunks:
            raise PipelineBackendError(f"injected failure at lipsync call {call}")
        return [f.data for f in mock_lipsync(audio, self.profile, fps)]


class RemoteSessionBackend:
    """Adapter over a protocol client (subprocess or TCP backend)."""

    def __init__(
        self,
        client: BackendClient,
        profile: RawVideo,
        profile_id: str = "session",
        voice_id: str = "default",
        tts_latency_ms: int = 0,
        lipsync_latency_ms: int = 0,
    ) -> None:
        self.client = client
        self.profile = profile
        self.profile_id = profile_id
        self.voice_id = voice_id
        self.tts_latency_ms = tts_latency_ms
        self.lipsync_latency_ms = lipsync_latency_ms
        client.register_profile(profile_id, profile.encode(), "RAW0")

    def tts(self, text: str) -> PcmAudio:
        try:
            pcm, rate = self.client.tts(text, self.voice_id)
        except BackendError as exc:
            raise PipelineBackendError(str(exc)) from exc
        return PcmAudio(pcm, rate)

    def lipsync_chunk(self, audio: PcmAudio, fps: int) -> list[bytes]:
        try:
            result = self.client.lipsync(self.profile_id, audio.data, audio.sample_rate, fps)
        except BackendError as exc:
            raise PipelineBackendError(str(exc)) from exc
        size = result["width"] * result["height"] * 3
        frames = result["frames"]
        return [frames[i * size : (i + 1) * size] for i in range(result["frame_count"])]


def run_pipeline(
    events: Sequence[Event],
    backend,
    sink,
    config: PipelineConfig,
) -> LatencyStats:
    """Run one session script to completion. Deterministic."""
    engine = _Engine(backend, sink, config)
    engine.run(sorted(events, key=lambda e: e.arrival_ms))
    return engine.stats


class _Engine:
    def __init__(self, backend, sink, config: PipelineConfig) -> None:
        self.backend = backend
        self.sink = sink
        self.config = config
        self.jbuf = JitterBuffer(config.buffer_ms)
        self.pacer = FramePacer(config.fps)
        self.stats = LatencyStats()
        self.busy_until = 0
        profile: RawVideo = backend.profile
        self.width, self.height = profile.width, profile.height

    def run(self, events: Sequence[Event]) -> None:
        i = 0
        now = 0
        ended = False
        while True:
            next_arrival = events[i].arrival_ms if not ended and i < len(events) else None
            next_due = self.jbuf.next_due_ms()
            if next_arrival is not None and (next_due is None or next_arrival <= next_due):
                now = max(now, next_arrival)
                event = events[i]
                i += 1
                if isinstance(event, EndOfSession):
                    # no more input, but buffered segments still play out on
                    # schedule rather than being dumped early
                    ended = True
                    continue
                p = event.payload
                self.jbuf.push(p.seq, p.capture_ts_ms, p, event.arrival_ms)
            elif next_due is not None:
                now = max(now, next_due)
                for item in self.jbuf.poll(now):
                    self._process(item, now)
            else:
                break
        for item in self.jbuf.flush(now):  # safety net; normally empty
            self._process(item, now)
        self.stats.duplicates_dropped = self.jbuf.duplicates_dropped
        self.stats.late_dropped = self.jbuf.late_dropped
        self.stats.audio_ms = self.sink.audio_ms
        self.stats.video_ms = self.sink.video_ms
        self.stats.frames_emitted = self.pacer.frames_emitted
        self.sink.finalize()

    # -- item processing ------------------------------------------------------

    def _process(self, item, now: int) -> None:
        if isinstance(item, GapMarker):
            self._fill_gap(self.config.gap_fill_ms)
            return
        assert isinstance(item, BufferedSegment)
        release = max(now, item.release_ms)
        start = max(release, self.busy_until)
        audio = self._synthesize_audio(item.payload, start)
        if audio is None:
            self.busy_until = start
            self._fill_gap(self.config.gap_fill_ms)
            return
        audio, t = audio
        first_emit = self._render_chunks(audio, t, item)
        if first_emit is not None:
            self.stats.per_segment_ms.append(
                (item.seq, first_emit - item.payload.capture_ts_ms)
            )

    def _synthesize_audio(self, payload, start: int):
        """Returns (audio, backend-done time) or None; the caller substitutes
        a gap (and accounts the stall) when synthesis is impossible."""
        if isinstance(payload, AudioSegmentPayload):
            try:
                return PcmAudio(payload.body, payload.sample_rate), start
            except ValueError:
                return None
        try:
            text = decompress_text(payload.body, payload.compressor_id)
            audio = self.backend.tts(text)
        except (DecompressError, PipelineBackendError, ValueError):
            return None
        return audio, start + self.backend.tts_latency_ms

    def _render_chunks(self, audio: PcmAudio, t: int, item: BufferedSegment):
        first_emit = None
        for chunk in chunk_audio(audio, self.config.chunk_ms):
            t += self.backend.lipsync_latency_ms
            try:
                frame_datas = self.backend.lipsync_chunk(chunk.audio, self.config.fps)
                out_audio = chunk.audio
            except PipelineBackendError:
                self.stats.stall_count += 1
                self.stats.stall_total_ms += int(chunk.audio.duration_ms)
                frame_datas = self._loop_frames(self._gap_frame_count(chunk.audio.n_samples))
                out_audio = silence(chunk.audio.n_samples, chunk.audio.sample_rate)
            emitted = self.pacer.push(
                FrameBatch(
                    frames=frame_datas,
                    n_samples=chunk.audio.n_samples,
                    sample_rate=chunk.audio.sample_rate,
                    width=self.width,
                    height=self.height,
                )
            )
            self.sink.write_audio(out_audio)
            self.sink.write_frames(emitted)
            if first_emit is None and emitted:
                first_emit = t
        self.busy_until = t
        return first_emit

    def _fill_gap(self, gap_ms: int) -> None:
        n_samples = self.config.sample_rate * gap_ms // 1000
        frame_datas = self._loop_frames(self._gap_frame_count(n_samples))
        emitted = self.pacer.push(
            FrameBatch(
                frames=frame_datas,
                n_samples=n_samples,
                sample_rate=self.config.sample_rate,
                width=self.width,
                height=self.height,
            )
        )
        self.sink.write_audio(silence(n_samples, self.config.sample_rate))
        self.sink.write_frames(emitted)
        self.stats.stall_count += 1
        self.stats.stall_total_ms += gap_ms

    def _gap_frame_count(self, n_samples: int) -> int:
        rate = self.config.sample_rate
        return (n_samples * self.config.fps + rate - 1) // rate

    def _loop_frames(self, count: int) -> list[bytes]:
        profile: RawVideo = self.backend.profile
        base = self.pacer.frames_emitted
        return [profile.frame(base + k) for k in range(count)]


def schedule_transcript(
    transcript,
    compressor_id: int,
    session_id: int = 1,
    user_id: int = 1,
    network_delay_ms: int = 0,
) -> list[Event]:
    """Build an event script from a timed transcript.

    Capture timestamps mark the end of each segment's speech (the instant a
    live transcriber would finalize it); arrivals add a fixed network delay.
    """
    from txt2vid.textcodec.compress import compress_text

    events: list[Event] = []
    ts = 0
    for seq, seg in enumerate(transcript.segments):
        ts += seg.speech_duration_ms
        payload = TextSegmentPayload(
            session_id=session_id,
            seq=seq,
            capture_ts_ms=ts,
            user_id=user_id,
            compressor_id=compressor_id,
            body=compress_text(seg.text, compressor_id),
        )
        events.append(SegmentArrival(ts + network_delay_ms, payload))
    end_ts = max(ts, transcript.total_duration_ms)
    events.append(EndOfSession(end_ts + network_delay_ms, end_ts))
    return events
