"""Session state machine.

One machine instance per peer per connection. Transitions are total: every
(phase, message type) pair is defined, and illegal traffic yields an
``EmitProtocolError`` action without corrupting state, so a hostile peer can
never wedge the machine. Malformed payloads are likewise transitions, not
exceptions.

Profiles register once per user id; a re-registration is accepted as a
replacement but flagged so rate accounting can report it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from txt2vid.wire import payloads
from txt2vid.wire.frames import MessageType, encode_frame

# PROTOCOL_ERROR codes
ERR_UNEXPECTED = 1
ERR_MALFORMED = 2
ERR_UNKNOWN_PROFILE = 3
ERR_CLOSED = 4


class Role(enum.Enum):
    SENDER = "sender"
    RECEIVER = "receiver"


class Phase(enum.Enum):
    IDLE = "idle"
    HELLO_SENT = "hello_sent"
    ESTABLISHED = "established"
    CLOSED = "closed"


@dataclass(frozen=True)
class SendHelloAck:
    session_id: int


@dataclass(frozen=True)
class HandshakeComplete:
    session_id: int


@dataclass(frozen=True)
class AcceptProfile:
    profile: payloads.SessionProfile
    replaced: bool


@dataclass(frozen=True)
class SendProfileAck:
    user_id: int
    replaced: bool


@dataclass(frozen=True)
class ProfileAcked:
    user_id: int
    replaced: bool


@dataclass(frozen=True)
class DeliverText:
    segment: payloads.TextSegmentPayload


@dataclass(frozen=True)
class DeliverAudio:
    segment: payloads.AudioSegmentPayload


@dataclass(frozen=True)
class SessionEnded:
    capture_ts_ms: Optional[int]


@dataclass(frozen=True)
class EmitProtocolError:
    code: int
    message: str


@dataclass(frozen=True)
class PeerError:
    code: int
    message: str


Action = Union[
    SendHelloAck,
    HandshakeComplete,
    AcceptProfile,
    SendProfileAck,
    ProfileAcked,
    DeliverText,
    DeliverAudio,
    SessionEnded,
    EmitProtocolError,
    PeerError,
]


@dataclass
class SessionMachine:
    """Deterministic per-connection protocol state.

    Not internally synchronized: one writer at a time. ``known_profiles``
    seeds the registration set so a sender reconnecting to a receiver that
    already persisted its profile is not forced to re-transfer it.
    """

    role: Role
    session_id: Optional[int] = None
    phase: Phase = Phase.IDLE
    registered: set[int] = field(default_factory=set)
    replacements: int = 0

    def __init__(self, role: Role, known_profiles: Iterable[int] = ()) -> None:
        self.role = role
        self.session_id = None
        self.phase = Phase.IDLE
        self.registered = set(known_profiles)
        self.replacements = 0

    # -- sender-side local events ------------------------------------------

    def start_hello(self, session_id: int) -> bytes:
        if self.role is not Role.SENDER or self.phase is not Phase.IDLE:
            raise ValueError(f"cannot send hello as {self.role.value} in {self.phase.value}")
        self.session_id = session_id
        self.phase = Phase.HELLO_SENT
        return encode_frame(MessageType.HELLO, payloads.encode_hello(session_id))

    # -- incoming messages --------------------------------------------------

    def step(self, msg_type: MessageType, payload: bytes) -> list[Action]:
        """Apply one incoming message; returns the resulting actions."""
        if msg_type == MessageType.PROTOCOL_ERROR:
            return self._on_peer_error(payload)
        handler = {
            Phase.IDLE: self._step_idle,
            Phase.HELLO_SENT: self._step_hello_sent,
            Phase.ESTABLISHED: self._step_established,
            Phase.CLOSED: self._step_closed,
        }[self.phase]
        return handler(msg_type, payload)

    def _on_peer_error(self, payload: bytes) -> list[Action]:
        try:
            code, message = payloads.decode_protocol_error(payload)
        except payloads.MalformedPayload:
            code, message = 0, "<malformed error payload>"
        if self.phase is Phase.CLOSED:
            return []
        self.phase = Phase.CLOSED
        return [PeerError(code, message)]

    def _step_idle(self, msg_type: MessageType, payload: bytes) -> list[Action]:
        if msg_type == MessageType.HELLO and self.role is Role.RECEIVER:
            try:
                session_id = payloads.decode_hello(payload)
            except payloads.MalformedPayload as exc:
                return [EmitProtocolError(ERR_MALFORMED, str(exc))]
            self.session_id = session_id
            self.phase = Phase.ESTABLISHED
            return [HandshakeComplete(session_id), SendHelloAck(session_id)]
        return [EmitProtocolError(ERR_UNEXPECTED, f"{msg_type.name} not legal before handshake")]

    def _step_hello_sent(self, msg_type: MessageType, payload: bytes) -> list[Action]:
        if msg_type == MessageType.HELLO_ACK and self.role is Role.SENDER:
            try:
                session_id = payloads.decode_hello(payload)
            except payloads.MalformedPayload as exc:
                return [EmitProtocolError(ERR_MALFORMED, str(exc))]
            self.phase = Phase.ESTABLISHED
            return [HandshakeComplete(session_id)]
        return [EmitProtocolError(ERR_UNEXPECTED, f"{msg_type.name} not legal during handshake")]

    def _step_established(self, msg_type: MessageType, payload: bytes) -> list[Action]:
        if msg_type == MessageType.REGISTER_PROFILE and self.role is Role.RECEIVER:
            try:
                profile = payloads.SessionProfile.decode(payload)
            except payloads.MalformedPayload as exc:
                return [EmitProtocolError(ERR_MALFORMED, str(exc))]
            replaced = profile.user_id in self.registered
            self.registered.add(profile.user_id)
            if replaced:
                self.replacements += 1
            return [
                AcceptProfile(profile, replaced),
                SendProfileAck(profile.user_id, replaced),
            ]
        if msg_type == MessageType.TEXT_SEGMENT and self.role is Role.RECEIVER:
            try:
                seg = payloads.TextSegmentPayload.decode(payload)
            except payloads.MalformedPayload as exc:
                return [EmitProtocolError(ERR_MALFORMED, str(exc))]
            if seg.user_id not in self.registered:
                return [EmitProtocolError(ERR_UNKNOWN_PROFILE, "unknown profile")]
            return [DeliverText(seg)]
        if msg_type == MessageType.AUDIO_SEGMENT and self.role is Role.RECEIVER:
            try:
                seg = payloads.AudioSegmentPayload.decode(payload)
            except payloads.MalformedPayload as exc:
                return [EmitProtocolError(ERR_MALFORMED, str(exc))]
            if seg.user_id not in self.registered:
                return [EmitProtocolError(ERR_UNKNOWN_PROFILE, "unknown profile")]
            return [DeliverAudio(seg)]
        if msg_type == MessageType.PROFILE_ACK and self.role is Role.SENDER:
            try:
                user_id, replaced = payloads.decode_profile_ack(payload)
            except payloads.MalformedPayload as exc:
                return [EmitProtocolError(ERR_MALFORMED, str(exc))]
            return [ProfileAcked(user_id, replaced)]
        if msg_type == MessageType.SESSION_END:
            try:
                ts = payloads.decode_session_end(payload)
            except payloads.MalformedPayload as exc:
                return [EmitProtocolError(ERR_MALFORMED, str(exc))]
            self.phase = Phase.CLOSED
            return [SessionEnded(ts)]
        return [EmitProtocolError(ERR_UNEXPECTED, f"{msg_type.name} not legal in this direction")]

    def _step_closed(self, msg_type: MessageType, payload: bytes) -> list[Action]:
        return [EmitProtocolError(ERR_CLOSED, "session closed")]


def step_session(
    machine: SessionMachine, incoming: tuple[MessageType, bytes]
) -> tuple[SessionMachine, list[Action]]:
    """Functional wrapper: returns a stepped copy, leaving the input intact."""
    clone = SessionMachine(machine.role, known_profiles=machine.registered)
    clone.session_id = machine.session_id
    clone.phase = machine.phase
    clone.replacements = machine.replacements
    actions = clone.step(*incoming)
    return clone, actions
