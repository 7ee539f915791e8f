"""Cross-lane equivalence: compiled kernels must match the pure reference."""

import random

import pytest

from txt2vid import _kernels_py as pure
from txt2vid import kernels

try:
    from txt2vid import _kernels as compiled
except ImportError:
    compiled = None

LANES = [pure] if compiled is None else [pure, compiled]
needs_compiled = pytest.mark.skipif(compiled is None, reason="extension not built")


@needs_compiled
def test_selected_lane_prefers_compiled():
    assert kernels.IMPLEMENTATION == "cython"


@needs_compiled
def test_synth_lanes_identical():
    rng = random.Random(1)
    for _ in range(25):
        n = rng.randrange(1, 5000)
        mask = bytes(rng.randrange(2) for _ in range(rng.randrange(1, 40)))
        step = rng.randrange(1, 2**32)
        amp = rng.randrange(1, 32768)
        assert pure.synth_gated_sine(n, mask, step, amp) == compiled.synth_gated_sine(
            n, mask, step, amp
        )


@needs_compiled
def test_gray_lanes_identical():
    rng = random.Random(2)
    for _ in range(25):
        n = rng.randrange(1, 20000)
        pcm = rng.randbytes(2 * n)
        rate = rng.choice([8000, 16000, 44100])
        fps = rng.choice([10, 24, 25, 30])
        assert pure.frame_gray_levels(pcm, rate, fps) == compiled.frame_gray_levels(
            pcm, rate, fps
        )


@needs_compiled
def test_render_lanes_identical():
    rng = random.Random(3)
    for _ in range(10):
        w, h = rng.randrange(4, 40), rng.randrange(4, 40)
        n_prof = rng.randrange(1, 5)
        profile = rng.randbytes(n_prof * w * h * 3)
        grays = bytes(rng.randrange(256) for _ in range(rng.randrange(1, 12)))
        start = rng.randrange(0, 7)
        assert pure.render_mouth_frames(
            profile, n_prof, w, h, grays, start
        ) == compiled.render_mouth_frames(profile, n_prof, w, h, grays, start)


def test_gray_extremes():
    silence = bytes(2 * 3200)
    assert set(kernels.frame_gray_levels(silence, 16000, 25)) == {0}
    full = b"\xff\x7f\x01\x80" * 1600  # +32767 / -32767 alternating
    assert set(kernels.frame_gray_levels(full, 16000, 25)) == {255}


def test_render_rejects_bad_geometry():
    with pytest.raises(ValueError):
        kernels.render_mouth_frames(b"\x00" * 10, 1, 2, 2, b"\x00")


def test_render_paints_exact_rectangle():
    w, h = 16, 12
    profile = bytes(range(256)) * (w * h * 3 // 256)
    profile = (profile + bytes(w * h * 3 - len(profile)))[: w * h * 3]
    out = kernels.render_mouth_frames(profile, 1, w, h, bytes([200]))
    y0, x0, rw = h - h // 3, w // 4, w // 2
    for y in range(h):
        for x in range(w):
            px = out[(y * w + x) * 3 : (y * w + x) * 3 + 3]
            if y >= y0 and x0 <= x < x0 + rw:
                assert px == bytes([200, 200, 200]), (x, y)
            else:
                assert px == profile[(y * w + x) * 3 : (y * w + x) * 3 + 3], (x, y)
