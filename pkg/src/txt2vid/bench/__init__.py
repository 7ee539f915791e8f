"""Benchmark harness: the published codec grid driven over an external transcoder."""

from txt2vid.bench.grid import REFERENCE_AVG_KBPS, CodecParams, table1_grid
from txt2vid.bench.report import (
    BenchmarkMatrix,
    emit_matrix,
    load_matrix_rows,
    ratio_report,
    reference_ratio_report,
)
from txt2vid.bench.synthetic import generate_clip
from txt2vid.bench.transcode import (
    EncodeFailed,
    EncodeResult,
    Transcoder,
    TranscoderMissing,
    encode_benchmark,
    find_transcoder,
    probe_duration_ms,
    probe_stream_bitrates,
)

__all__ = [
    "REFERENCE_AVG_KBPS",
    "CodecParams",
    "table1_grid",
    "BenchmarkMatrix",
    "emit_matrix",
    "load_matrix_rows",
    "ratio_report",
    "reference_ratio_report",
    "generate_clip",
    "EncodeFailed",
    "EncodeResult",
    "Transcoder",
    "TranscoderMissing",
    "encode_benchmark",
    "find_transcoder",
    "probe_duration_ms",
    "probe_stream_bitrates",
]
