"""Bitrate accounting over session traces.

The transmission rate of a session counts only what recurs per unit of
speech: segment bodies. The one-time profile transfer and the handshake are
a fixed setup cost, reported separately under ``excluded_bits`` rather than
amortized into the rate.

Two policies are shipped and both are always reported by the CLI:

    PAYLOAD_ONLY         compressed segment bodies only; comparable to
                         published text-compression rates
    PAYLOAD_PLUS_FRAMING bodies plus segment headers and frame overhead;
                         the honest on-the-wire cost of the steady state

Speech duration comes from segment capture timestamps; the final segment's
tail is closed by the SESSION_END timestamp when the sender provides one.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from txt2vid.wire import frames, payloads, session


class AccountingPolicy(enum.Enum):
    PAYLOAD_ONLY = "payload_only"
    PAYLOAD_PLUS_FRAMING = "payload_plus_framing"


class IllegalTrace(Exception):
    """Trace rejected by the session state machine."""


class ZeroAccountedDuration(Exception):
    """Payload bits present but no speech time to divide them over."""


class NonPositiveRate(Exception):
    """Bitrate ratio inputs must be strictly positive."""


@dataclass(frozen=True)
class BitrateReport:
    payload_bits: int
    accounted_duration_ms: int
    bps: float
    excluded_bits: int
    overhead_bits: int
    policy: AccountingPolicy = AccountingPolicy.PAYLOAD_ONLY
    segment_count: int = 0
    profile_replacements: int = 0
    mixed_media: bool = False

    def to_json(self) -> str:
        return json.dumps(
            {
                "payload_bits": self.payload_bits,
                "accounted_duration_ms": self.accounted_duration_ms,
                "bps": self.bps,
                "excluded_bits": self.excluded_bits,
                "overhead_bits": self.overhead_bits,
                "policy": self.policy.value,
                "segment_count": self.segment_count,
                "profile_replacements": self.profile_replacements,
                "mixed_media": self.mixed_media,
            }
        )


def payload_bitrate(
    trace: Sequence[bytes],
    policy: AccountingPolicy = AccountingPolicy.PAYLOAD_ONLY,
    known_profiles: Iterable[int] = (),
) -> BitrateReport:
    """Account a sender's frame trace (HELLO .. SESSION_END).

    The trace must replay cleanly through the receiver state machine;
    anything the machine rejects raises IllegalTrace. ``known_profiles``
    stands in for profiles registered in an earlier session.
    """
    machine = session.SessionMachine(session.Role.RECEIVER, known_profiles=known_profiles)
    payload_bits = 0
    overhead_bits = 0
    excluded_bits = 0
    segment_count = 0
    saw_text = saw_audio = False
    last_ts = 0
    end_ts: int | None = None

    for raw in trace:
        try:
            decoded = frames.decode_frame(raw)
        except frames.FrameError as exc:
            raise IllegalTrace(f"undecodable frame: {exc}") from exc
        if decoded.end != len(raw):
            raise IllegalTrace("trailing bytes after frame")
        actions = machine.step(decoded.msg_type, decoded.payload)
        for act in actions:
            if isinstance(act, session.EmitProtocolError):
                raise IllegalTrace(f"{decoded.msg_type.name}: {act.message}")
        frame_bits = len(raw) * 8
        if decoded.msg_type == frames.MessageType.TEXT_SEGMENT:
            seg = payloads.TextSegmentPayload.decode(decoded.payload)
            body_bits = len(seg.body) * 8
            payload_bits += body_bits
            overhead_bits += frame_bits - body_bits
            segment_count += 1
            saw_text = True
            if seg.capture_ts_ms < last_ts:
                raise IllegalTrace("capture timestamps must be monotone")
            last_ts = seg.capture_ts_ms
        elif decoded.msg_type == frames.MessageType.AUDIO_SEGMENT:
            seg_a = payloads.AudioSegmentPayload.decode(decoded.payload)
            body_bits = len(seg_a.body) * 8
            payload_bits += body_bits
            overhead_bits += frame_bits - body_bits
            segment_count += 1
            saw_audio = True
            if seg_a.capture_ts_ms < last_ts:
                raise IllegalTrace("capture timestamps must be monotone")
            last_ts = seg_a.capture_ts_ms
        else:
            excluded_bits += frame_bits
            if decoded.msg_type == frames.MessageType.SESSION_END:
                end_ts = payloads.decode_session_end(decoded.payload)

    duration = end_ts if end_ts is not None else last_ts
    counted = payload_bits
    if policy is AccountingPolicy.PAYLOAD_PLUS_FRAMING:
        counted += overhead_bits
    if counted == 0:
        bps = 0.0
    elif duration == 0:
        raise ZeroAccountedDuration("segments present but no speech duration in trace")
    else:
        bps = counted * 1000.0 / duration
    return BitrateReport(
        payload_bits=payload_bits,
        accounted_duration_ms=duration,
        bps=bps,
        excluded_bits=excluded_bits,
        overhead_bits=overhead_bits,
        policy=policy,
        segment_count=segment_count,
        profile_replacements=machine.replacements,
        mixed_media=saw_text and saw_audio,
    )


def bitrate_both_policies(
    trace: Sequence[bytes], known_profiles: Iterable[int] = ()
) -> dict[str, BitrateReport]:
    return {
        policy.value: payload_bitrate(trace, policy, known_profiles=known_profiles)
        for policy in AccountingPolicy
    }


def compression_ratio(codec_bps: float, txt2vid_bps: float) -> float:
    """Standard-codec bitrate over achieved text bitrate."""
    if codec_bps <= 0 or txt2vid_bps <= 0:
        raise NonPositiveRate(f"rates must be positive, got {codec_bps} / {txt2vid_bps}")
    return codec_bps / txt2vid_bps


def build_trace(
    session_id: int,
    profile: payloads.SessionProfile | None,
    segments: Iterable[tuple[int, str | bytes]],
    compressor_id: int,
    end_ts_ms: int | None,
    user_id: int | None = None,
) -> list[bytes]:
    """Assemble a legal sender trace from transcript segments.

    ``segments`` yields (capture_ts_ms, text) pairs; text is compressed with
    ``compressor_id`` (bytes pass through untouched). Mostly a convenience
    for the CLI and tests.
    """
    from txt2vid.textcodec.compress import compress_text

    if profile is None and user_id is None:
        raise ValueError("need a profile or an explicit pre-registered user_id")
    uid = profile.user_id if profile is not None else user_id
    trace = [frames.encode_frame(frames.MessageType.HELLO, payloads.encode_hello(session_id))]
    if profile is not None:
        trace.append(frames.encode_frame(frames.MessageType.REGISTER_PROFILE, profile.encode()))
    for seq, (ts, text) in enumerate(segments):
        body = text if isinstance(text, bytes) else compress_text(text, compressor_id)
        seg = payloads.TextSegmentPayload(
            session_id=session_id,
            seq=seq,
            capture_ts_ms=ts,
            user_id=uid,
            compressor_id=compressor_id,
            body=body,
        )
        trace.append(frames.encode_frame(frames.MessageType.TEXT_SEGMENT, seg.encode()))
    trace.append(
        frames.encode_frame(frames.MessageType.SESSION_END, payloads.encode_session_end(end_ts_ms))
    )
    return trace
