"""Receiver-side media pipeline: buffering, chunking, pacing, muxing."""

from txt2vid.pipeline.audio import ChunkTooSmall, MediaChunk, chunk_audio, unchunk_audio
from txt2vid.pipeline.clock import SimulatedClock, WallClock
from txt2vid.pipeline.jitter import BufferedSegment, GapMarker, JitterBuffer
from txt2vid.pipeline.pacing import FrameBatch, FramePacer, pace_frames
from txt2vid.pipeline.runner import (
    EndOfSession,
    LatencyStats,
    Mode,
    MockSessionBackend,
    PipelineBackendError,
    PipelineConfig,
    RemoteSessionBackend,
    SegmentArrival,
    run_pipeline,
    schedule_transcript,
)
from txt2vid.pipeline.sinks import CollectingSink, FileSink, SinkStall

__all__ = [
    "ChunkTooSmall",
    "MediaChunk",
    "chunk_audio",
    "unchunk_audio",
    "SimulatedClock",
    "WallClock",
    "BufferedSegment",
    "GapMarker",
    "JitterBuffer",
    "FrameBatch",
    "FramePacer",
    "pace_frames",
    "EndOfSession",
    "LatencyStats",
    "Mode",
    "MockSessionBackend",
    "PipelineBackendError",
    "PipelineConfig",
    "RemoteSessionBackend",
    "SegmentArrival",
    "run_pipeline",
    "schedule_transcript",
    "CollectingSink",
    "FileSink",
    "SinkStall",
]
