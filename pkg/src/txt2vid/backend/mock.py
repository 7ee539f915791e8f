"""Procedural synthesis: a deterministic stand-in for TTS and lip-sync models.

Output is a pure function of the inputs and is byte-identical across
platforms and kernel lanes, which makes the whole stack testable end to end
with golden hashes and no model weights.

Pinned formulas (round half up everywhere, see the constants below):

    duration_ms   = max(300, round(n_chars * 1000 / speaking_rate))
    n_samples     = round(duration_ms * 16000 / 1000)
    phase_step    = round(base_freq * 2**32 / 16000)   (32-bit DDS accumulator)
    sample[i]     = 0 while the character at i*n_chars//n_samples is
                    whitespace, else (amplitude * sine[acc >> 22 & 1023]) >> 15
    frame_count   = ceil(n_samples * fps / rate)
    gray[i]       = round(255 * rms(window_i) / 32767), window_i =
                    samples[i*rate//fps : (i+1)*rate//fps)
    mouth rect    = rows [h - h//3, h), cols [w//4, w//4 + w//2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from txt2vid import kernels
from txt2vid.media import PcmAudio, RawVideo, VideoFrame

MOCK_SAMPLE_RATE = 16000
MIN_TTS_MS = 300
MIN_LIPSYNC_MS = 200


class EmptyText(Exception):
    pass


class AudioTooShort(Exception):
    pass


class EmptyProfile(Exception):
    pass


@dataclass(frozen=True)
class MockVoiceModel:
    speaking_rate: float = 15.0  # chars/sec ≈ 180 wpm conversational English
    base_freq: float = 440.0
    amplitude: int = 8000

    def __post_init__(self) -> None:
        if self.speaking_rate <= 0:
            raise ValueError("speaking_rate must be positive")


def tts_duration_ms(n_chars: int, speaking_rate: float) -> int:
    return max(MIN_TTS_MS, int(math.floor(n_chars * 1000.0 / speaking_rate + 0.5)))


def mock_tts(text: str, model: MockVoiceModel = MockVoiceModel()) -> PcmAudio:
    """Synthesize gated-sine speech rhythm for ``text``."""
    if not text:
        raise EmptyText("cannot synthesize empty text")
    duration_ms = tts_duration_ms(len(text), model.speaking_rate)
    n_samples = int(math.floor(duration_ms * MOCK_SAMPLE_RATE / 1000.0 + 0.5))
    phase_step = int(math.floor(model.base_freq * 4294967296.0 / MOCK_SAMPLE_RATE + 0.5))
    mask = bytes(0 if ch.isspace() else 1 for ch in text)
    data = kernels.synth_gated_sine(n_samples, mask, phase_step, model.amplitude)
    return PcmAudio(data, MOCK_SAMPLE_RATE)


def mock_lipsync(audio: PcmAudio, profile: RawVideo, fps: int) -> list[VideoFrame]:
    """Loop the driving frames and paint the mouth region from audio RMS."""
    if audio.n_samples * 1000 < MIN_LIPSYNC_MS * audio.sample_rate:
        raise AudioTooShort(
            f"{audio.duration_ms:.1f} ms of audio, need ≥ {MIN_LIPSYNC_MS} ms"
        )
    if profile.n_frames < 1:
        raise EmptyProfile("driving video has no frames")
    grays = kernels.frame_gray_levels(audio.data, audio.sample_rate, fps)
    blob = kernels.render_mouth_frames(
        profile.frames, profile.n_frames, profile.width, profile.height, grays
    )
    size = profile.frame_size
    return [
        VideoFrame(
            width=profile.width,
            height=profile.height,
            presentation_ts_ms=i * 1000 // fps,
            data=blob[i * size : (i + 1) * size],
        )
        for i in range(len(grays))
    ]
