"""Transcript compression, segmentation, and bitrate accounting."""

from txt2vid.textcodec.accounting import (
    AccountingPolicy,
    BitrateReport,
    IllegalTrace,
    NonPositiveRate,
    ZeroAccountedDuration,
    bitrate_both_policies,
    build_trace,
    compression_ratio,
    payload_bitrate,
)
from txt2vid.textcodec.compress import (
    CompressorId,
    DecompressError,
    compress_text,
    decompress_text,
)
from txt2vid.textcodec.segment import (
    FixedLengthStrategy,
    Segment,
    SentenceStrategy,
    Transcript,
    apply_timing,
    normalize_whitespace,
    read_timing_csv,
    segment_transcript,
)

__all__ = [
    "AccountingPolicy",
    "BitrateReport",
    "IllegalTrace",
    "NonPositiveRate",
    "ZeroAccountedDuration",
    "bitrate_both_policies",
    "build_trace",
    "compression_ratio",
    "payload_bitrate",
    "CompressorId",
    "DecompressError",
    "compress_text",
    "decompress_text",
    "FixedLengthStrategy",
    "Segment",
    "SentenceStrategy",
    "Transcript",
    "apply_timing",
    "normalize_whitespace",
    "read_timing_csv",
    "segment_transcript",
]
