"""Audio chunking for backend submission.

The lip-sync model family this stack targets rejects audio shorter than
200 ms, so 200 ms is a hard floor here: every chunk handed to a backend is
at least that long, with the final partial chunk zero-padded up to the floor
when needed.
"""

from __future__ import annotations

from dataclasses import dataclass

from txt2vid.media import PcmAudio

MIN_CHUNK_MS = 200


class ChunkTooSmall(Exception):
    """Requested chunk duration is below the 200 ms backend floor."""


@dataclass(frozen=True)
class MediaChunk:
    audio: PcmAudio
    chunk_index: int
    is_final: bool
    real_samples: int  # samples that came from the source (rest is padding)

    @property
    def padding_samples(self) -> int:
        return self.audio.n_samples - self.real_samples


def chunk_audio(audio: PcmAudio, chunk_ms: int = MIN_CHUNK_MS) -> list[MediaChunk]:
    """Slice audio into chunk_ms pieces; pad the final piece to ≥200 ms.

    Concatenating the first ``real_samples`` of each chunk reproduces the
    input exactly. Empty audio yields no chunks.
    """
    if chunk_ms < MIN_CHUNK_MS:
        raise ChunkTooSmall(f"chunk_ms={chunk_ms} is below the {MIN_CHUNK_MS} ms floor")
    n = audio.n_samples
    if n == 0:
        return []
    rate = audio.sample_rate
    per_chunk = rate * chunk_ms // 1000
    floor_samples = rate * MIN_CHUNK_MS // 1000
    chunks: list[MediaChunk] = []
    pos = 0
    index = 0
    while pos < n:
        end = min(n, pos + per_chunk)
        real = end - pos
        piece = audio.slice_samples(pos, end)
        is_final = end >= n
        if is_final and real < floor_samples:
            piece = PcmAudio(piece.data + bytes(2 * (floor_samples - real)), rate)
        chunks.append(MediaChunk(piece, index, is_final, real))
        pos = end
        index += 1
    return chunks


def unchunk_audio(chunks: list[MediaChunk]) -> PcmAudio:
    """Inverse of chunk_audio: strips final-chunk padding."""
    if not chunks:
        return PcmAudio(b"")
    rate = chunks[0].audio.sample_rate
    return PcmAudio(b"".join(c.audio.data[: 2 * c.real_samples] for c in chunks), rate)
