"""Backend protocol over real transports, plus the shared conformance suite."""

import socket
import sys
import threading

import pytest

from txt2vid.backend.conformance import run_conformance
from txt2vid.backend.protocol import BackendClient, BackendError, b64, spawn_stdio
from txt2vid.backend.server import MockBackend, serve_connection
from txt2vid.media import gradient_frames


def socketpair_client():
    ours, theirs = socket.socketpair()
    impl = MockBackend()
    thread = threading.Thread(
        target=serve_connection,
        args=(theirs.makefile("rb"), theirs.makefile("wb"), impl),
        daemon=True,
    )
    thread.start()
    return BackendClient(ours.makefile("rb"), ours.makefile("wb"))


def stdio_client():
    return spawn_stdio([sys.executable, "-m", "txt2vid.backend", "--stdio"])


def test_hello_capabilities():
    client = socketpair_client()
    caps = client.hello()
    assert {"tts", "lipsync"} <= set(caps["ops"])
    assert caps["max_chunk_ms"] >= 200
    client.close()


def test_unknown_op_unsupported():
    client = socketpair_client()
    with pytest.raises(BackendError) as err:
        client.call("frobnicate")
    assert err.value.code == "unsupported"
    client.close()


def test_missing_field_bad_request():
    client = socketpair_client()
    with pytest.raises(BackendError) as err:
        client.call("tts", voice_id="default")  # no text
    assert err.value.code == "bad_request"
    client.close()


def test_register_rejects_foreign_container():
    client = socketpair_client()
    with pytest.raises(BackendError) as err:
        client.register_profile("p", b"\x00" * 16, "MP4 ")
    assert err.value.code == "unsupported_container"
    client.close()


def test_bad_base64_is_bad_request():
    client = socketpair_client()
    req = client.send(
        "register_profile", profile_id="p", driving_video_b64="!!!", container_tag="RAW0"
    )
    msg = client.wait(req)
    assert msg["status"] == "error"
    assert msg["error"]["code"] == "bad_request"
    client.close()


def test_lipsync_roundtrip_frame_size_law():
    client = socketpair_client()
    profile = gradient_frames(2, 32, 24, seed=1)
    client.register_profile("me", profile.encode(), "RAW0")
    pcm, rate = client.tts("testing one two three")
    result = client.lipsync("me", pcm, rate, fps=25)
    assert len(result["frames"]) == result["frame_count"] * 32 * 24 * 3
    client.close()


def test_conformance_suite_over_socketpair():
    report = run_conformance(socketpair_client)
    assert report.passed, report.failures()


def test_conformance_suite_over_stdio_subprocess():
    report = run_conformance(stdio_client)
    assert report.passed, report.failures()


def test_goldens_stable_across_runs():
    """Two fresh subprocesses produce byte-identical synthesis."""
    outputs = []
    for _ in range(2):
        client = stdio_client()
        pcm, _ = client.tts("stability check")
        outputs.append(pcm)
        client.shutdown()
        client.close()
    assert outputs[0] == outputs[1]
