"""Backend conformance suite.

Any implementation of the backend protocol must pass these checks; they are
run against the bundled procedural mock and against out-of-tree adapters in
procedural mode. The golden hashes pin the procedural formulas, so two
independent implementations proving conformance here are guaranteed
byte-identical.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from typing import Callable

from txt2vid.backend.protocol import BackendClient, BackendError, b64
from txt2vid.media import gradient_frames

# Frozen inputs and their output digests. Recomputing these requires a
# deliberate formula change plus a golden bump here and in every adapter.
GOLDEN_TTS_TEXT = "hello world"
GOLDEN_TTS_SAMPLES = 11_728
GOLDEN_TTS_SHA256 = "6c1daedc4f7a883c1d813dd63a903a51b8bd82c3eb9389860750d1c11fce2b85"

GOLDEN_PROFILE = gradient_frames(3, 64, 48, seed=7)
GOLDEN_LIPSYNC_FRAMES = 19
GOLDEN_LIPSYNC_SHA256 = "f5e30f5d96968ce7e286efe3fc1b8bb1f10be8c651554c5388e8216e10960a15"


@dataclass
class ConformanceReport:
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    def record(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append((name, ok, detail))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failures(self) -> list[tuple[str, str]]:
        return [(name, detail) for name, ok, detail in self.checks if not ok]


def run_conformance(make_client: Callable[[], BackendClient]) -> ConformanceReport:
    """Run every check against fresh connections from ``make_client``."""
    report = ConformanceReport()
    client = make_client()
    try:
        _check_hello(client, report)
        _check_tts(client, report)
        _check_lipsync(client, report)
        _check_errors(client, report)
        _check_pipelining(client, report)
        _check_parse_error(client, report)
    finally:
        client.close()
    client = make_client()
    try:
        _check_shutdown(client, report)
    finally:
        client.close()
    return report


def _check_hello(client: BackendClient, report: ConformanceReport) -> None:
    caps = client.hello()
    ops = set(caps.get("ops", ()))
    report.record(
        "hello.ops",
        {"tts", "lipsync", "register_profile"} <= ops,
        f"ops={sorted(ops)}",
    )
    report.record(
        "hello.max_chunk_ms",
        int(caps.get("max_chunk_ms", 0)) >= 200,
        f"max_chunk_ms={caps.get('max_chunk_ms')}",
    )


def _check_tts(client: BackendClient, report: ConformanceReport) -> None:
    pcm1, rate = client.tts(GOLDEN_TTS_TEXT)
    pcm2, _ = client.tts(GOLDEN_TTS_TEXT)
    report.record("tts.deterministic", pcm1 == pcm2)
    report.record("tts.sample_rate", rate == 16000, f"rate={rate}")
    report.record(
        "tts.duration_law",
        len(pcm1) == 2 * GOLDEN_TTS_SAMPLES,
        f"samples={len(pcm1) // 2}, want {GOLDEN_TTS_SAMPLES}",
    )
    digest = hashlib.sha256(pcm1).hexdigest()
    report.record("tts.golden", digest == GOLDEN_TTS_SHA256, digest)
    # floor clamp: one character still synthesizes 300 ms
    short, rate = client.tts("a")
    report.record("tts.floor", len(short) == 2 * (300 * rate // 1000), f"{len(short) // 2} samples")


def _check_lipsync(client: BackendClient, report: ConformanceReport) -> None:
    client.register_profile("conformance", GOLDEN_PROFILE.encode(), "RAW0")
    pcm, rate = client.tts(GOLDEN_TTS_TEXT)
    result = client.lipsync("conformance", pcm, rate, fps=25)
    want_frames = (len(pcm) // 2 * 25 + rate - 1) // rate
    report.record(
        "lipsync.frame_count_law",
        result["frame_count"] == want_frames == GOLDEN_LIPSYNC_FRAMES,
        f"count={result['frame_count']}",
    )
    report.record(
        "lipsync.frame_size_law",
        len(result["frames"]) == result["frame_count"] * result["width"] * result["height"] * 3,
    )
    digest = hashlib.sha256(result["frames"]).hexdigest()
    report.record("lipsync.golden", digest == GOLDEN_LIPSYNC_SHA256, digest)
    # silence paints a black mouth rectangle
    sil = client.lipsync("conformance", bytes(2 * 3200), 16000, fps=25)
    w, h = sil["width"], sil["height"]
    rect_offset = ((h - h // 3) * w + w // 4) * 3
    report.record(
        "lipsync.silent_mouth",
        sil["frame_count"] == 5 and all(
            sil["frames"][k * w * h * 3 + rect_offset] == 0 for k in range(5)
        ),
    )


def _check_errors(client: BackendClient, report: ConformanceReport) -> None:
    # 150 ms of audio is below the model floor
    try:
        client.lipsync("conformance", bytes(2 * 2400), 16000, fps=25)
        report.record("errors.audio_too_short", False, "accepted 150 ms of audio")
    except BackendError as exc:
        report.record("errors.audio_too_short", exc.code == "audio_too_short", exc.code)
    try:
        client.lipsync("never-registered", bytes(2 * 3200), 16000, fps=25)
        report.record("errors.unknown_profile", False, "accepted unknown profile")
    except BackendError as exc:
        report.record("errors.unknown_profile", exc.code == "unknown_profile", exc.code)
    try:
        client.call("transmogrify")
        report.record("errors.unsupported_op", False, "accepted unknown op")
    except BackendError as exc:
        report.record("errors.unsupported_op", exc.code == "unsupported", exc.code)


def _check_pipelining(client: BackendClient, report: ConformanceReport) -> None:
    id_a = client.send("tts", voice_id="default", text="first")
    id_b = client.send("tts", voice_id="default", text="second")
    # wait in reverse order to prove id matching rather than FIFO reads
    resp_b = client.wait(id_b)
    resp_a = client.wait(id_a)
    ok = resp_a.get("status") == "ok" and resp_b.get("status") == "ok"
    report.record("pipelining.ids_matched", ok)
    if ok:
        report.record(
            "pipelining.payloads_distinct",
            resp_a["audio_b64"] != resp_b["audio_b64"],
        )


def _check_parse_error(client: BackendClient, report: ConformanceReport) -> None:
    client.send_raw(b"this is not json\n")
    msg = client.read_response()
    report.record(
        "parse_error.request_id_zero",
        msg.get("request_id") == 0
        and msg.get("status") == "error"
        and msg.get("error", {}).get("code") == "parse",
        str(msg)[:120],
    )


def _check_shutdown(client: BackendClient, report: ConformanceReport) -> None:
    request_id = client.send("shutdown")
    msg = client.wait(request_id)
    closed = False
    try:
        client.read_response()
    except (ConnectionError, ValueError):
        closed = True
    report.record("shutdown.drains_and_closes", msg.get("status") == "ok" and closed)


def square_wave(n_samples: int, amplitude: int = 32767) -> bytes:
    """Full-scale alternating square wave, handy for RMS edge tests."""
    pair = struct.pack("<2h", amplitude, -amplitude)
    return (pair * ((n_samples + 1) // 2))[: 2 * n_samples]
