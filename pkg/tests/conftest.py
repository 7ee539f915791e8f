import pytest

from txt2vid.bench.transcode import TranscoderMissing, find_transcoder


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: release criterion")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed", "skipped"):
        for report in terminalreporter.stats.get(outcome, []):
            if getattr(report, "when", "call") != "call":
                continue
            if "test_acceptance.py" not in str(getattr(report, "nodeid", "")):
                continue
            name = report.nodeid.split("::", 1)[1]
            lines.append((name, outcome.upper()))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, outcome in sorted(lines):
            terminalreporter.write_line(f"{outcome:7s} {name}")


@pytest.fixture(scope="session")
def transcoder():
    try:
        return find_transcoder()
    except TranscoderMissing:
        pytest.skip("no external transcoder on PATH")


@pytest.fixture(scope="session")
def synthetic_clip(transcoder, tmp_path_factory):
    from txt2vid.bench.synthetic import generate_clip

    path = tmp_path_factory.mktemp("clips") / "synthetic.mp4"
    return generate_clip(path, transcoder, duration_s=4.0, width=640, height=360)
