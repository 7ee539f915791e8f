#!/usr/bin/env python3
"""Throughput comparison: compiled kernel lane vs pure-Python reference.

Run from a checkout with the extension built:

    python benchmarks/bench_kernels.py [--seconds 30] [--size 640x360]

The two lanes are byte-identical by contract (asserted here as a side
effect); this script only quantifies why the compiled lane exists.
"""

from __future__ import annotations

import argparse
import math
import time

from txt2vid import _kernels_py as pure

try:
    from txt2vid import _kernels as compiled
except ImportError:
    compiled = None

from txt2vid.media import gradient_frames


def timed(fn, *args, repeat=3):
    best = math.inf
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return result, best


def report(name, pure_s, comp_s):
    speedup = pure_s / comp_s if comp_s else float("inf")
    print(f"{name:28s} pure {pure_s * 1000:9.1f} ms   compiled {comp_s * 1000:8.1f} ms   {speedup:6.1f}x")


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--seconds", type=float, default=30.0, help="audio length to synthesize")
    parser.add_argument("--size", default="640x360", help="frame geometry for the render bench")
    parser.add_argument("--frames", type=int, default=125, help="frames to render")
    args = parser.parse_args()

    if compiled is None:
        raise SystemExit("compiled extension not built; `pip install -e .` first")

    rate = 16000
    n_samples = int(args.seconds * rate)
    mask = bytes((1, 1, 1, 1, 0)) * 90  # worded rhythm
    step = int(440.0 * 2**32 / rate + 0.5)

    print(f"workload: {args.seconds:.0f} s of 16 kHz audio, {args.frames} frames at {args.size}")
    pcm_pure, t_pure = timed(pure.synth_gated_sine, n_samples, mask, step, 8000)
    pcm_comp, t_comp = timed(compiled.synth_gated_sine, n_samples, mask, step, 8000)
    assert pcm_pure == pcm_comp
    report("synth_gated_sine", t_pure, t_comp)

    grays_pure, t_pure = timed(pure.frame_gray_levels, pcm_pure, rate, 25)
    grays_comp, t_comp = timed(compiled.frame_gray_levels, pcm_comp, rate, 25)
    assert grays_pure == grays_comp
    report("frame_gray_levels", t_pure, t_comp)

    width, height = (int(v) for v in args.size.lower().split("x"))
    profile = gradient_frames(4, width, height, seed=5)
    grays = grays_pure[: args.frames]
    frames_pure, t_pure = timed(
        pure.render_mouth_frames, profile.frames, 4, width, height, grays, 0
    )
    frames_comp, t_comp = timed(
        compiled.render_mouth_frames, profile.frames, 4, width, height, grays, 0
    )
    assert frames_pure == frames_comp
    report("render_mouth_frames", t_pure, t_comp)


if __name__ == "__main__":
    main()
