"""Transcript segmentation.

Transcripts arriving from speech-to-text vary wildly in whitespace, so all
strategies normalize first (collapse runs, trim). Joining the produced
segments with single spaces reproduces the normalized text exactly; that
round-trip is the contract tests lean on.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from typing import Iterable

_WS_RUN = re.compile(r"\s+")
_SENTENCE_END = re.compile(r"(?<=[.!?])\s+")


@dataclass(frozen=True)
class Segment:
    text: str
    speech_duration_ms: int = 0


@dataclass
class Transcript:
    segments: list[Segment] = field(default_factory=list)
    total_duration_ms: int = 0

    def __post_init__(self) -> None:
        if any(not s.text for s in self.segments):
            raise ValueError("segments must be non-empty")
        if self.total_duration_ms < sum(s.speech_duration_ms for s in self.segments):
            raise ValueError("total duration shorter than the segments it contains")

    @property
    def text(self) -> str:
        return " ".join(s.text for s in self.segments)


def normalize_whitespace(text: str) -> str:
    return _WS_RUN.sub(" ", text).strip()


@dataclass(frozen=True)
class SentenceStrategy:
    """Split on terminal punctuation (. ! ?) followed by whitespace."""

    def split(self, text: str) -> list[str]:
        return [s for s in _SENTENCE_END.split(text) if s]


@dataclass(frozen=True)
class FixedLengthStrategy:
    """Pack whole words into segments of at most ``max_chars`` characters.

    A single word longer than max_chars stays intact (splitting it would
    break the rejoin contract).
    """

    max_chars: int = 120

    def split(self, text: str) -> list[str]:
        if self.max_chars < 1:
            raise ValueError("max_chars must be positive")
        out: list[str] = []
        current = ""
        for word in text.split(" "):
            if not current:
                current = word
            elif len(current) + 1 + len(word) <= self.max_chars:
                current += " " + word
            else:
                out.append(current)
                current = word
        if current:
            out.append(current)
        return out


def segment_transcript(
    text: str,
    strategy: SentenceStrategy | FixedLengthStrategy,
    total_duration_ms: int = 0,
) -> Transcript:
    """Segment ``text`` after whitespace normalization.

    When ``total_duration_ms`` is given, speech time is attributed to
    segments proportionally to character count (remainder lands on the last
    segment), which is a serviceable stand-in when no timing sidecar exists.
    """
    normalized = normalize_whitespace(text)
    if not normalized:
        raise ValueError("transcript is empty")
    parts = strategy.split(normalized)
    durations = _proportional_durations(parts, total_duration_ms)
    return Transcript(
        segments=[Segment(p, d) for p, d in zip(parts, durations)],
        total_duration_ms=total_duration_ms,
    )


def _proportional_durations(parts: list[str], total_ms: int) -> list[int]:
    if not total_ms:
        return [0] * len(parts)
    chars = sum(len(p) for p in parts)
    durations = [total_ms * len(p) // chars for p in parts]
    durations[-1] += total_ms - sum(durations)
    return durations


def apply_timing(transcript: Transcript, rows: Iterable[tuple[int, int, int]]) -> Transcript:
    """Attach sidecar timing (seq, start_ms, end_ms) to a transcript."""
    by_seq = {seq: (start, end) for seq, start, end in rows}
    segments = []
    total = transcript.total_duration_ms
    for i, seg in enumerate(transcript.segments):
        if i in by_seq:
            start, end = by_seq[i]
            segments.append(Segment(seg.text, end - start))
            total = max(total, end)
        else:
            segments.append(seg)
    return Transcript(segments=segments, total_duration_ms=total)


def read_timing_csv(path) -> list[tuple[int, int, int]]:
    """Read a ``seq,start_ms,end_ms`` sidecar file."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#") or row[0] == "seq":
                continue
            rows.append((int(row[0]), int(row[1]), int(row[2])))
    return rows
