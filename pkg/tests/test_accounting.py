"""Bitrate accounting: the rate rules behind the headline numbers."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from txt2vid.textcodec import (
    AccountingPolicy,
    IllegalTrace,
    NonPositiveRate,
    ZeroAccountedDuration,
    bitrate_both_policies,
    build_trace,
    compression_ratio,
    payload_bitrate,
)
from txt2vid.wire import MessageType, encode_frame, payloads

PROFILE = payloads.SessionProfile(
    user_id=7, voice_profile_ref="demo", container_tag=b"RAW0", driving_video=b"\x00" * 64
)


def trace_with_bodies(bodies, end_ts, profile=PROFILE):
    segments = [(i * 1000, body) for i, body in enumerate(bodies)]
    return build_trace(1, profile, segments, compressor_id=0, end_ts_ms=end_ts)


def test_single_segment_85bps():
    # 319 compressed bytes over 30 s of speech is the canonical ~85 bps case
    trace = trace_with_bodies([b"\x55" * 319], end_ts=30_000)
    report = payload_bitrate(trace)
    assert report.payload_bits == 319 * 8
    assert report.accounted_duration_ms == 30_000
    assert report.bps == pytest.approx(85.0666667, abs=1e-4)


def test_register_only_trace():
    trace = [
        encode_frame(MessageType.HELLO, payloads.encode_hello(1)),
        encode_frame(MessageType.REGISTER_PROFILE, PROFILE.encode()),
        encode_frame(MessageType.SESSION_END, payloads.encode_session_end(None)),
    ]
    report = payload_bitrate(trace)
    assert report.bps == 0.0
    assert report.payload_bits == 0
    assert report.excluded_bits > 0


def test_framing_policy_strictly_larger():
    trace = trace_with_bodies([b"x" * 50, b"y" * 70], end_ts=10_000)
    both = bitrate_both_policies(trace)
    assert both["payload_plus_framing"].bps > both["payload_only"].bps


def test_profile_transfer_never_moves_bps():
    base = trace_with_bodies([b"z" * 100], end_ts=5_000)
    report = payload_bitrate(base)
    # splice in a profile replacement before the segment
    replacement = encode_frame(MessageType.REGISTER_PROFILE, PROFILE.encode())
    spliced = base[:2] + [replacement] + base[2:]
    report2 = payload_bitrate(spliced)
    assert report2.bps == report.bps
    assert report2.payload_bits == report.payload_bits
    assert report2.excluded_bits == report.excluded_bits + len(replacement) * 8
    assert report2.profile_replacements == 1
    both = bitrate_both_policies(spliced)
    assert both["payload_plus_framing"].excluded_bits == report2.excluded_bits


@given(sizes=st.lists(st.integers(min_value=1, max_value=500), min_size=1, max_size=10))
def test_bps_monotone_in_payload(sizes):
    duration = 20_000
    small = trace_with_bodies([b"a" * s for s in sizes], end_ts=duration)
    big = trace_with_bodies([b"a" * (s + 1) for s in sizes], end_ts=duration)
    assert payload_bitrate(big).bps > payload_bitrate(small).bps


def test_unregistered_segment_is_illegal():
    trace = trace_with_bodies([b"x"], end_ts=1_000)
    del trace[1]  # drop REGISTER_PROFILE
    with pytest.raises(IllegalTrace):
        payload_bitrate(trace)


def test_known_profiles_permit_reconnect_traces():
    trace = trace_with_bodies([b"x"], end_ts=1_000)
    del trace[1]
    report = payload_bitrate(trace, known_profiles={7})
    assert report.segment_count == 1


def test_timestamps_must_be_monotone():
    seg = payloads.TextSegmentPayload(1, 0, 5000, 7, 0, b"x").encode()
    seg2 = payloads.TextSegmentPayload(1, 1, 4000, 7, 0, b"y").encode()
    trace = [
        encode_frame(MessageType.HELLO, payloads.encode_hello(1)),
        encode_frame(MessageType.REGISTER_PROFILE, PROFILE.encode()),
        encode_frame(MessageType.TEXT_SEGMENT, seg),
        encode_frame(MessageType.TEXT_SEGMENT, seg2),
    ]
    with pytest.raises(IllegalTrace):
        payload_bitrate(trace)


def test_duration_needs_a_clock():
    trace = trace_with_bodies([b"x" * 10], end_ts=None)
    with pytest.raises(ZeroAccountedDuration):
        payload_bitrate(trace)


def test_mixed_media_flagged():
    audio = payloads.AudioSegmentPayload(1, 1, 2000, 7, 0, 16000, b"\x00\x00" * 100).encode()
    trace = trace_with_bodies([b"x" * 10], end_ts=None)
    trace.insert(3, encode_frame(MessageType.AUDIO_SEGMENT, audio))
    report = payload_bitrate(trace[:-1] + [encode_frame(MessageType.SESSION_END, payloads.encode_session_end(4000))])
    assert report.mixed_media is True
    assert report.payload_bits == (10 + 200) * 8


@pytest.mark.parametrize(
    "codec_bps,txt_bps,expected",
    [
        (17_500, 85, 205.9),
        (13_800, 85, 162.4),
        (85, 85, 1.0),
    ],
)
def test_compression_ratio(codec_bps, txt_bps, expected):
    assert compression_ratio(codec_bps, txt_bps) == pytest.approx(expected, abs=0.05)


def test_compression_ratio_rejects_nonpositive():
    with pytest.raises(NonPositiveRate):
        compression_ratio(0, 85)
    with pytest.raises(NonPositiveRate):
        compression_ratio(1000, -1)


def test_bundled_transcripts_goldens():
    """bzip2 sizes of the bundled passages, frozen after the oracle run."""
    import bz2

    from txt2vid.datafiles import bundled_transcripts

    sizes = {t.name: len(bz2.compress(t.text.encode(), 9)) for t in bundled_transcripts()}
    assert sizes == {"gettysburg": 267, "declaration": 272, "alice": 243}
