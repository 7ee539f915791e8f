"""Receiver-side jitter buffer.

Segment arrival latency over a live transport varies by seconds, so playout
is delayed by a configurable horizon: the first arrival anchors a playout
timeline at ``arrival + buffer_ms``, and every segment is released at its
capture offset on that timeline (never before it arrives).

Ordering rules:
  - segments are released strictly in seq order;
  - duplicates and anything already passed over are dropped;
  - when a later segment comes due while an earlier seq is still missing,
    the missing seqs are declared gaps (one GapMarker each) so playback can
    continue — a late straggler after that point is dropped.

Gaps are data, not errors: the pipeline substitutes silence and looped
driving frames for each marker.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class BufferedSegment:
    seq: int
    capture_ts_ms: int
    payload: object
    arrival_ms: int
    release_ms: int


@dataclass(frozen=True)
class GapMarker:
    seq: int
    declared_at_ms: int


Released = Union[BufferedSegment, GapMarker]


class JitterBuffer:
    def __init__(self, buffer_ms: int) -> None:
        if buffer_ms < 0:
            raise ValueError("buffer_ms must be >= 0")
        self.buffer_ms = buffer_ms
        self._held: dict[int, BufferedSegment] = {}
        self._expected = 0
        self._offset: int | None = None  # playout timeline anchor
        self.duplicates_dropped = 0
        self.late_dropped = 0

    def push(self, seq: int, capture_ts_ms: int, payload: object, arrival_ms: int) -> None:
        if seq < self._expected:
            self.late_dropped += 1
            return
        if seq in self._held:
            self.duplicates_dropped += 1
            return
        if self._offset is None:
            self._offset = arrival_ms + self.buffer_ms - capture_ts_ms
        release = max(arrival_ms, capture_ts_ms + self._offset)
        self._held[seq] = BufferedSegment(seq, capture_ts_ms, payload, arrival_ms, release)

    def next_due_ms(self) -> int | None:
        """Earliest instant at which poll() would emit something."""
        if not self._held:
            return None
        if self._expected in self._held:
            return self._held[self._expected].release_ms
        # a missing head seq becomes a gap when any held segment comes due
        return min(seg.release_ms for seg in self._held.values())

    def poll(self, now_ms: int) -> list[Released]:
        out: list[Released] = []
        while self._held:
            if self._expected in self._held:
                seg = self._held[self._expected]
                if seg.release_ms > now_ms:
                    break
                out.append(seg)
                del self._held[self._expected]
                self._expected += 1
                continue
            due = [s for s in self._held.values() if s.release_ms <= now_ms]
            if not due:
                break
            first_due = min(due, key=lambda s: s.seq)
            for missing in range(self._expected, first_due.seq):
                out.append(GapMarker(missing, now_ms))
            self._expected = first_due.seq
        return out

    def flush(self, now_ms: int) -> list[Released]:
        """End of session: drain everything in order, gaps included."""
        out: list[Released] = []
        for seq in sorted(self._held):
            for missing in range(self._expected, seq):
                out.append(GapMarker(missing, now_ms))
            out.append(self._held[seq])
            self._expected = seq + 1
        self._held.clear()
        return out

    def __len__(self) -> int:
        return len(self._held)
