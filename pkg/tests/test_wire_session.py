"""Session machine: transitions, registration rules, exhaustiveness."""

import itertools

import pytest

from txt2vid.wire import payloads
from txt2vid.wire.frames import MessageType
from txt2vid.wire.session import (
    AcceptProfile,
    DeliverText,
    EmitProtocolError,
    HandshakeComplete,
    PeerError,
    Phase,
    ProfileAcked,
    Role,
    SendHelloAck,
    SendProfileAck,
    SessionEnded,
    SessionMachine,
    step_session,
)

PROFILE = payloads.SessionProfile(
    user_id=7, voice_profile_ref="alice-voice", container_tag=b"RAW0", driving_video=b"\x01\x02"
)


def segment(user_id=7, seq=0, ts=0):
    return payloads.TextSegmentPayload(
        session_id=1, seq=seq, capture_ts_ms=ts, user_id=user_id, compressor_id=0, body=b"hi"
    ).encode()


def receiver_established():
    machine = SessionMachine(Role.RECEIVER)
    machine.step(MessageType.HELLO, payloads.encode_hello(1))
    return machine


def test_hello_handshake():
    machine = SessionMachine(Role.RECEIVER)
    actions = machine.step(MessageType.HELLO, payloads.encode_hello(42))
    assert machine.phase is Phase.ESTABLISHED
    assert HandshakeComplete(42) in actions
    assert SendHelloAck(42) in actions


def test_segment_in_idle_is_error_and_state_unchanged():
    machine = SessionMachine(Role.RECEIVER)
    actions = machine.step(MessageType.TEXT_SEGMENT, segment())
    assert machine.phase is Phase.IDLE
    assert any(isinstance(a, EmitProtocolError) for a in actions)


def test_segment_requires_registration():
    machine = receiver_established()
    actions = machine.step(MessageType.TEXT_SEGMENT, segment(user_id=99))
    assert actions == [EmitProtocolError(3, "unknown profile")]
    machine.step(MessageType.REGISTER_PROFILE, PROFILE.encode())
    actions = machine.step(MessageType.TEXT_SEGMENT, segment())
    assert len(actions) == 1 and isinstance(actions[0], DeliverText)
    assert actions[0].segment.user_id == 7


def test_reregistration_replaces_and_is_flagged():
    machine = receiver_established()
    first = machine.step(MessageType.REGISTER_PROFILE, PROFILE.encode())
    again = machine.step(MessageType.REGISTER_PROFILE, PROFILE.encode())
    assert AcceptProfile(PROFILE, False) in first
    assert SendProfileAck(7, False) in first
    assert AcceptProfile(PROFILE, True) in again
    assert SendProfileAck(7, True) in again
    assert machine.replacements == 1


def test_known_profiles_skip_retransfer():
    machine = SessionMachine(Role.RECEIVER, known_profiles={7})
    machine.step(MessageType.HELLO, payloads.encode_hello(5))
    actions = machine.step(MessageType.TEXT_SEGMENT, segment())
    assert isinstance(actions[0], DeliverText)


def test_session_end_closes():
    machine = receiver_established()
    actions = machine.step(MessageType.SESSION_END, payloads.encode_session_end(30000))
    assert machine.phase is Phase.CLOSED
    assert actions == [SessionEnded(30000)]
    after = machine.step(MessageType.TEXT_SEGMENT, segment())
    assert any(isinstance(a, EmitProtocolError) for a in after)
    assert machine.phase is Phase.CLOSED


def test_peer_error_closes():
    machine = receiver_established()
    actions = machine.step(
        MessageType.PROTOCOL_ERROR, payloads.encode_protocol_error(1, "boom")
    )
    assert machine.phase is Phase.CLOSED
    assert actions == [PeerError(1, "boom")]


def test_sender_flow():
    sender = SessionMachine(Role.SENDER)
    hello_frame = sender.start_hello(9)
    assert sender.phase is Phase.HELLO_SENT
    assert hello_frame[:2] == b"TV"
    actions = sender.step(MessageType.HELLO_ACK, payloads.encode_hello(9))
    assert sender.phase is Phase.ESTABLISHED
    assert actions == [HandshakeComplete(9)]
    actions = sender.step(MessageType.PROFILE_ACK, payloads.encode_profile_ack(7, True))
    assert actions == [ProfileAcked(7, True)]


def test_sender_cannot_hello_twice():
    sender = SessionMachine(Role.SENDER)
    sender.start_hello(1)
    with pytest.raises(ValueError):
        sender.start_hello(2)


def test_malformed_payload_is_transition_not_exception():
    machine = receiver_established()
    actions = machine.step(MessageType.REGISTER_PROFILE, b"\x00")
    assert machine.phase is Phase.ESTABLISHED
    assert any(isinstance(a, EmitProtocolError) for a in actions)


MINIMAL_PAYLOADS = {
    MessageType.HELLO: payloads.encode_hello(1),
    MessageType.HELLO_ACK: payloads.encode_hello(1),
    MessageType.REGISTER_PROFILE: PROFILE.encode(),
    MessageType.PROFILE_ACK: payloads.encode_profile_ack(7, False),
    MessageType.TEXT_SEGMENT: segment(),
    MessageType.AUDIO_SEGMENT: payloads.AudioSegmentPayload(1, 0, 0, 7, 0, 16000, b"\x00\x00").encode(),
    MessageType.SESSION_END: b"",
    MessageType.PROTOCOL_ERROR: payloads.encode_protocol_error(1, "x"),
}


@pytest.mark.parametrize(
    "role,phase,msg_type",
    list(itertools.product(Role, Phase, MessageType)),
)
def test_every_state_message_pair_is_defined(role, phase, msg_type):
    machine = SessionMachine(role, known_profiles={7})
    machine.phase = phase
    actions = machine.step(msg_type, MINIMAL_PAYLOADS[msg_type])
    assert isinstance(actions, list)
    assert machine.phase in set(Phase)
    # errors never land the machine in a half-open state
    if any(isinstance(a, EmitProtocolError) for a in actions):
        assert machine.phase is phase


def test_functional_wrapper_leaves_input_untouched():
    machine = SessionMachine(Role.RECEIVER)
    stepped, actions = step_session(machine, (MessageType.HELLO, payloads.encode_hello(3)))
    assert machine.phase is Phase.IDLE
    assert stepped.phase is Phase.ESTABLISHED
    assert SendHelloAck(3) in actions
