"""CLI surface (non-network commands via CliRunner)."""

import json

import pytest
from click.testing import CliRunner

from txt2vid.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def test_bitrate_bundled(runner):
    result = runner.invoke(main, ["bitrate", "--bundled", "gettysburg"])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert 40 <= payload["payload_only"]["bps"] <= 200
    assert payload["payload_plus_framing"]["bps"] > payload["payload_only"]["bps"]


def test_bitrate_requires_duration(runner, tmp_path):
    path = tmp_path / "t.txt"
    path.write_text("hello there")
    result = runner.invoke(main, ["bitrate", "--transcript", str(path)])
    assert result.exit_code != 0
    assert "duration" in result.output


def test_decode_writes_avi(runner, tmp_path):
    out = tmp_path / "out.avi"
    result = runner.invoke(
        main,
        ["decode", "--bundled", "alice", "--out", str(out), "--size", "64x48"],
    )
    assert result.exit_code == 0, result.output
    assert out.exists() and out.read_bytes()[:4] == b"RIFF"
    summary = json.loads(result.output)
    assert summary["frames"] == -(-summary["audio_ms"] * 25 // 1000)


def test_decode_via_backend_subprocess(runner, tmp_path):
    import sys

    out = tmp_path / "out.avi"
    result = runner.invoke(
        main,
        [
            "decode",
            "--bundled", "alice",
            "--out", str(out),
            "--size", "64x48",
            "--backend-cmd", f"{sys.executable} -m txt2vid.backend --stdio",
        ],
    )
    assert result.exit_code == 0, result.output
    assert out.exists()


def test_ratio_reference_range(runner):
    result = runner.invoke(
        main, ["bench", "ratios", "--table1-reference", "--txt2vid-bps", "85"]
    )
    assert result.exit_code == 0, result.output
    assert "162x - 1.52e+03x over 14 rows" in result.output


def test_ratio_needs_source(runner):
    result = runner.invoke(main, ["bench", "ratios", "--txt2vid-bps", "85"])
    assert result.exit_code != 0


def test_study_synth_and_curve(runner, tmp_path):
    votes = tmp_path / "votes.csv"
    result = runner.invoke(
        main, ["study", "synth", "--shape", "h264", "--out", str(votes)]
    )
    assert result.exit_code == 0, result.output
    out = tmp_path / "curve.csv"
    result = runner.invoke(
        main,
        ["study", "curve", "--votes", str(votes), "--shape", "h264", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    assert "50% crossing" in result.output
    assert out.exists()


def test_study_curve_excludes_failers(runner, tmp_path):
    from txt2vid.study import synthetic_votes, write_votes

    votes = tmp_path / "votes.csv"
    write_votes(votes, synthetic_votes("h264", sanity_failers=("p000", "p001")))
    result = runner.invoke(main, ["study", "curve", "--votes", str(votes), "--shape", "h264"])
    assert result.exit_code == 0, result.output
    assert "excluded participants: p000, p001" in result.output
