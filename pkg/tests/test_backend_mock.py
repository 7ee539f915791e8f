"""Procedural synthesis: pinned formulas and goldens."""

import hashlib

import pytest

from txt2vid.backend.conformance import square_wave
from txt2vid.backend.mock import (
    AudioTooShort,
    EmptyText,
    MockVoiceModel,
    mock_lipsync,
    mock_tts,
    tts_duration_ms,
)
from txt2vid.media import PcmAudio, gradient_frames

PROFILE = gradient_frames(3, 64, 48, seed=7)


def test_duration_formula():
    # 11 chars at 15 chars/s rounds half-up to 733 ms
    assert tts_duration_ms(11, 15.0) == 733
    assert tts_duration_ms(1, 15.0) == 300  # floor clamp
    assert tts_duration_ms(75, 15.0) == 5000


def test_hello_world_sample_count():
    audio = mock_tts("hello world")
    assert audio.n_samples == 11_728  # round(733 ms * 16 kHz)
    assert audio.sample_rate == 16_000


def test_single_char_floor():
    assert mock_tts("a").n_samples == 4800


def test_determinism_golden():
    audio = mock_tts("hello world")
    again = mock_tts("hello world")
    assert audio.data == again.data
    assert (
        hashlib.sha256(audio.data).hexdigest()
        == "6c1daedc4f7a883c1d813dd63a903a51b8bd82c3eb9389860750d1c11fce2b85"
    )


def test_whitespace_spans_are_silent():
    audio = mock_tts("ab cd")  # 5 chars -> 300 ms floor
    n = audio.n_samples
    # middle character (index 2) is the space: samples with i*5//n == 2
    lo = (2 * n + 4) // 5
    hi = (3 * n) // 5
    assert all(b == 0 for b in audio.data[2 * lo : 2 * hi])
    assert any(b != 0 for b in audio.data[: 2 * lo])


def test_empty_text_rejected():
    with pytest.raises(EmptyText):
        mock_tts("")


def test_rate_must_be_positive():
    with pytest.raises(ValueError):
        MockVoiceModel(speaking_rate=0)


def test_lipsync_silence_gray_zero():
    frames = mock_lipsync(PcmAudio(bytes(2 * 3200)), PROFILE, 25)
    assert len(frames) == 5
    w, h = PROFILE.width, PROFILE.height
    rect = ((h - h // 3) * w + w // 4) * 3
    assert all(f.data[rect] == 0 for f in frames)


def test_lipsync_full_scale_square_gray_255():
    frames = mock_lipsync(PcmAudio(square_wave(3200)), PROFILE, 25)
    assert len(frames) == 5
    w, h = PROFILE.width, PROFILE.height
    rect = ((h - h // 3) * w + w // 4) * 3
    assert all(f.data[rect] == 255 for f in frames)


def test_lipsync_loops_driving_frames():
    frames = mock_lipsync(PcmAudio(bytes(2 * 6400)), PROFILE, 25)  # 400 ms
    assert len(frames) == 10
    row = PROFILE.width * 3  # top rows are untouched by the mouth rect
    indices = []
    for f in frames:
        for k in range(PROFILE.n_frames):
            if f.data[:row] == PROFILE.frame(k)[:row]:
                indices.append(k)
                break
    assert indices == [0, 1, 2, 0, 1, 2, 0, 1, 2, 0]


def test_lipsync_frame_count_law():
    audio = mock_tts("some words to speak here")
    frames = mock_lipsync(audio, PROFILE, 25)
    assert len(frames) == -(-audio.n_samples * 25 // 16000)  # ceil
    # pts strictly increasing, spaced by 40 ms at 25 fps
    pts = [f.presentation_ts_ms for f in frames]
    assert pts == [i * 40 for i in range(len(frames))]


def test_lipsync_rejects_short_audio():
    with pytest.raises(AudioTooShort):
        mock_lipsync(PcmAudio(bytes(2 * 2400)), PROFILE, 25)  # 150 ms
