"""Adapter parity: same conformance suite, same goldens as the main mock."""

import hashlib
import json
import sys

from txt2vid.backend.conformance import (
    GOLDEN_LIPSYNC_SHA256,
    GOLDEN_PROFILE,
    GOLDEN_TTS_SHA256,
    GOLDEN_TTS_TEXT,
    run_conformance,
)
from txt2vid.backend.protocol import spawn_stdio


def adapter_client(*args):
    return spawn_stdio([sys.executable, "-m", "txt2vid_adapter", "--stdio", *args])


def test_full_conformance_suite():
    report = run_conformance(adapter_client)
    assert report.passed, report.failures()


def test_goldens_byte_identical_to_primary_mock():
    """The digests pinned in the shared suite came from the main stack's
    procedural backend; this process recomputes them independently."""
    client = adapter_client()
    pcm, rate = client.tts(GOLDEN_TTS_TEXT)
    assert hashlib.sha256(pcm).hexdigest() == GOLDEN_TTS_SHA256
    client.register_profile("p", GOLDEN_PROFILE.encode(), "RAW0")
    result = client.lipsync("p", pcm, rate, fps=25)
    assert hashlib.sha256(result["frames"]).hexdigest() == GOLDEN_LIPSYNC_SHA256
    client.shutdown()
    client.close()


def test_primary_and_adapter_agree_on_fresh_inputs():
    """Cross-implementation agreement beyond the pinned goldens."""
    primary = spawn_stdio([sys.executable, "-m", "txt2vid.backend", "--stdio"])
    adapter = adapter_client()
    try:
        for text in ("a", "short words only", "punctuation, too! and\nnewlines"):
            assert primary.tts(text) == adapter.tts(text)
        blob = GOLDEN_PROFILE.encode()
        primary.register_profile("x", blob, "RAW0")
        adapter.register_profile("x", blob, "RAW0")
        pcm, rate = primary.tts("compare the mouth region rendering")
        a = primary.lipsync("x", pcm, rate, fps=25)
        b = adapter.lipsync("x", pcm, rate, fps=25)
        assert a == b
    finally:
        for c in (primary, adapter):
            c.shutdown()
            c.close()


def test_config_file_round_trip(tmp_path):
    config = {"tts_impl": "procedural", "lipsync_impl": "procedural", "watchdog_s": 5.0}
    path = tmp_path / "adapter.json"
    path.write_text(json.dumps(config))
    client = adapter_client("--config", str(path))
    caps = client.hello()
    assert set(caps["ops"]) == {"tts", "lipsync", "register_profile"}
    client.shutdown()
    client.close()
