"""The network gateway: senders in, synthesized media out.

Three listeners on distinct ports:

  protocol   wire protocol over raw TCP (one session per connection)
  ui         websockets: /ui for the live-client JSON bridge, /wire for
             senders that prefer websocket-binary transport of wire frames
  playback   HTTP: GET /session/<id>/stream serves the muxed session
             (503 when no external muxer is installed), GET /sessions lists

Every sender connection replays the session state machine; accepted profiles
persist in the content-addressed store, so a sender that reconnects later
can skip re-transfer. The UI lane is itself a sender: typed text becomes
real wire frames pushed through the same machine and accounting as TCP
traffic, which is what makes the stats it displays exact rather than
approximate. One connection's failure never touches another's tasks.

Logs are JSON lines on stderr, one object per event, keyed by session id.
"""

from __future__ import annotations

import asyncio
import base64
import io
import json
import logging
import shutil
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from txt2vid.backend.protocol import BackendClient, BackendError, spawn_stdio
from txt2vid.gateway.config import GatewayConfig
from txt2vid.gateway.httpws import (
    OP_BINARY,
    OP_TEXT,
    HttpError,
    WebSocket,
    http_response,
    read_http_request,
)
from txt2vid.gateway.profiles import ProfileStore
from txt2vid.media import RAW_VIDEO_TAG, PcmAudio, RawVideo, VideoFrame
from txt2vid.pipeline.audio import chunk_audio
from txt2vid.pipeline.jitter import BufferedSegment, GapMarker, JitterBuffer
from txt2vid.pipeline.pacing import FrameBatch, FramePacer
from txt2vid.pipeline.runner import DEFAULT_JITTER_MS, Mode
from txt2vid.pipeline.sinks import MUXER_ARGS_TEMPLATE
from txt2vid.textcodec.accounting import (
    AccountingPolicy,
    IllegalTrace,
    ZeroAccountedDuration,
    payload_bitrate,
)
from txt2vid.textcodec.compress import CompressorId, DecompressError, compress_text, decompress_text
from txt2vid.wire import frames as wire_frames
from txt2vid.wire import payloads, session as wire_session
from txt2vid.wire.frames import Deframer, MessageType, encode_frame

logger = logging.getLogger("txt2vid.gateway")


def _log(event: str, **fields) -> None:
    logger.info(json.dumps({"event": event, **fields}, default=str))


def setup_json_logging(level: int = logging.INFO) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter('{"ts":"%(asctime)s","log":%(message)s}'))
    logger.addHandler(handler)
    logger.setLevel(level)


class AsyncBackend:
    """Serializes a blocking protocol client behind the event loop."""

    def __init__(self, client: BackendClient):
        self.client = client
        self._lock = asyncio.Lock()
        self._registered: set[str] = set()

    async def _call(self, fn, *args):
        async with self._lock:
            return await asyncio.to_thread(fn, *args)

    async def tts(self, text: str, voice_id: str) -> PcmAudio:
        pcm, rate = await self._call(self.client.tts, text, voice_id)
        return PcmAudio(pcm, rate)

    async def lipsync(self, profile_id: str, audio: PcmAudio, fps: int) -> dict:
        return await self._call(
            self.client.lipsync, profile_id, audio.data, audio.sample_rate, fps
        )

    async def ensure_profile(self, profile_id: str, blob: bytes, tag: str) -> None:
        if profile_id in self._registered:
            return
        await self._call(self.client.register_profile, profile_id, blob, tag)
        self._registered.add(profile_id)

    def forget(self, profile_id: str) -> None:
        self._registered.discard(profile_id)

    def close(self) -> None:
        try:
            self.client.shutdown()
        finally:
            self.client.close()


@dataclass
class SessionStats:
    last_latency_ms: int = 0
    segments: int = 0
    stalls: int = 0


class LiveSession:
    """Per-sender receiver state: machine, trace, pipeline, recording."""

    def __init__(self, gateway: "Gateway", internal_id: int, origin: str):
        self.gateway = gateway
        self.id = internal_id
        self.origin = origin
        self.known_at_start = gateway.profiles.known_ids()
        self.machine = wire_session.SessionMachine(
            wire_session.Role.RECEIVER, known_profiles=self.known_at_start
        )
        self.mode = gateway.config.default_mode
        self.jbuf = JitterBuffer(DEFAULT_JITTER_MS[self.mode])
        self.pacer = FramePacer(25)
        self.trace: list[bytes] = []
        self.frames: list[VideoFrame] = []
        self.audio = bytearray()
        self.sample_rate = 16000
        self.stats = SessionStats()
        self.subscribers: set[WebSocket] = set()
        self.t0 = time.monotonic()
        self.capture_base: dict[int, float] = {}
        self.ended = False
        self._drain_task: asyncio.Task | None = None
        self._wake = asyncio.Event()

    # -- wire input -----------------------------------------------------------

    async def handle_frame(self, msg_type: MessageType, payload: bytes) -> list[bytes]:
        """Apply one decoded frame; returns reply frames for the transport.

        The accounting trace stores the re-encoded frame, which is byte-exact
        with what traveled the wire (the codec is deterministic)."""
        self.trace.append(encode_frame(msg_type, payload))
        replies: list[bytes] = []
        for action in self.machine.step(msg_type, payload):
            if isinstance(action, wire_session.SendHelloAck):
                replies.append(
                    encode_frame(MessageType.HELLO_ACK, payloads.encode_hello(action.session_id))
                )
                _log("session_established", session=self.id, origin=self.origin)
            elif isinstance(action, wire_session.AcceptProfile):
                replaced = self.gateway.profiles.put(action.profile)
                self.gateway.backend.forget(str(action.profile.user_id))
                _log(
                    "profile_registered",
                    session=self.id,
                    user_id=action.profile.user_id,
                    replaced=action.replaced or replaced,
                )
            elif isinstance(action, wire_session.SendProfileAck):
                replies.append(
                    encode_frame(
                        MessageType.PROFILE_ACK,
                        payloads.encode_profile_ack(action.user_id, action.replaced),
                    )
                )
            elif isinstance(action, (wire_session.DeliverText, wire_session.DeliverAudio)):
                self._enqueue(action.segment)
            elif isinstance(action, wire_session.SessionEnded):
                self.ended = True
                self._wake.set()
                _log("session_ended", session=self.id, capture_ts=action.capture_ts_ms)
            elif isinstance(action, wire_session.EmitProtocolError):
                self.trace.pop()  # rejected frames never enter accounting
                replies.append(
                    encode_frame(
                        MessageType.PROTOCOL_ERROR,
                        payloads.encode_protocol_error(action.code, action.message),
                    )
                )
                _log("protocol_error", session=self.id, code=action.code, message=action.message)
                raise ProtocolViolation(action.message, replies)
            elif isinstance(action, wire_session.PeerError):
                _log("peer_error", session=self.id, code=action.code, message=action.message)
                self.ended = True
                self._wake.set()
        return replies

    def _enqueue(self, segment) -> None:
        now_ms = int((time.monotonic() - self.t0) * 1000)
        self.capture_base[segment.seq] = time.monotonic()
        self.jbuf.push(segment.seq, segment.capture_ts_ms, segment, now_ms)
        if self._drain_task is None or self._drain_task.done():
            self._drain_task = asyncio.create_task(self._drain())
        self._wake.set()

    async def _drain(self) -> None:
        """Single consumer: release segments on the jitter schedule."""
        while True:
            due = self.jbuf.next_due_ms()
            if due is None:
                if self.ended:
                    return
                # park until new data or end-of-session
                self._wake.clear()
                await self._wake.wait()
                continue
            now_ms = int((time.monotonic() - self.t0) * 1000)
            if due > now_ms:
                try:
                    await asyncio.wait_for(self._wake.wait(), timeout=(due - now_ms) / 1000)
                    self._wake.clear()
                    continue  # new input may have changed the schedule
                except asyncio.TimeoutError:
                    pass
            now_ms = int((time.monotonic() - self.t0) * 1000)
            for item in self.jbuf.poll(now_ms):
                try:
                    await self._process(item)
                except Exception as exc:  # session-local fault isolation
                    self.stats.stalls += 1
                    _log("segment_failed", session=self.id, error=repr(exc))

    async def _process(self, item) -> None:
        if isinstance(item, GapMarker):
            self.stats.stalls += 1
            _log("gap_substituted", session=self.id, seq=item.seq)
            return
        assert isinstance(item, BufferedSegment)
        segment = item.payload
        user_id = segment.user_id
        profile = await self._backend_profile(user_id)
        if profile is None:
            self.stats.stalls += 1
            return
        if isinstance(segment, payloads.TextSegmentPayload):
            try:
                text = decompress_text(segment.body, segment.compressor_id)
            except DecompressError as exc:
                self.stats.stalls += 1
                _log("segment_corrupt", session=self.id, seq=segment.seq, error=str(exc))
                return
            await self._broadcast(
                {"type": "transcript_echo", "seq": segment.seq, "text": text}
            )
            voice = self.gateway.profiles.get(user_id)
            audio = await self.gateway.backend.tts(
                text, voice.voice_profile_ref if voice else "default"
            )
        else:
            audio = PcmAudio(segment.body, segment.sample_rate)
        first_frame_at = None
        for chunk in chunk_audio(audio, 200):
            try:
                result = await self.gateway.backend.lipsync(str(user_id), chunk.audio, 25)
                datas = _split_frames(result)
            except BackendError as exc:
                self.stats.stalls += 1
                _log("chunk_failed", session=self.id, seq=segment.seq, error=str(exc))
                datas = [
                    profile.frame(self.pacer.frames_emitted + k)
                    for k in range(_ceil_frames(chunk.audio.n_samples, chunk.audio.sample_rate))
                ]
                chunk_audio_out = PcmAudio(bytes(len(chunk.audio.data)), chunk.audio.sample_rate)
            else:
                chunk_audio_out = chunk.audio
            emitted = self.pacer.push(
                FrameBatch(
                    frames=datas,
                    n_samples=chunk.audio.n_samples,
                    sample_rate=chunk.audio.sample_rate,
                    width=profile.width,
                    height=profile.height,
                )
            )
            self.sample_rate = chunk.audio.sample_rate
            self.audio.extend(chunk_audio_out.data)
            self.frames.extend(emitted)
            if first_frame_at is None and emitted:
                first_frame_at = time.monotonic()
            await self._push_frames(emitted)
        if first_frame_at is not None and segment.seq in self.capture_base:
            latency = int((first_frame_at - self.capture_base[segment.seq]) * 1000)
            self.stats.last_latency_ms = latency
            self.stats.segments += 1
            _log("segment_played", session=self.id, seq=segment.seq, latency_ms=latency)

    async def _backend_profile(self, user_id: int) -> RawVideo | None:
        stored = self.gateway.profiles.get(user_id)
        if stored is None:
            return None
        if stored.container_tag != RAW_VIDEO_TAG:
            _log("profile_container_unsupported", session=self.id, tag=str(stored.container_tag))
            return None
        try:
            await self.gateway.backend.ensure_profile(
                str(user_id), stored.driving_video, "RAW0"
            )
        except BackendError as exc:
            _log("backend_register_failed", session=self.id, error=str(exc))
            return None
        return RawVideo.decode(stored.driving_video)

    # -- UI plumbing ----------------------------------------------------------

    async def _push_frames(self, emitted: list[VideoFrame]) -> None:
        if not self.subscribers or not emitted:
            return
        jpegs = [
            (f.presentation_ts_ms, await asyncio.to_thread(_jpeg_b64, f, self.gateway.config.jpeg_quality))
            for f in emitted
        ]
        for ws in list(self.subscribers):
            for pts, payload in jpegs:
                await ws.send_text(json.dumps({"type": "frame", "pts_ms": pts, "jpeg_b64": payload}))

    async def _broadcast(self, message: dict) -> None:
        for ws in list(self.subscribers):
            await ws.send_text(json.dumps(message))

    def accounting_trace(self) -> list[bytes]:
        """The rateable trace: as received, closed by a virtual end marker at
        the current elapsed time while the session is still live."""
        trace = list(self.trace)
        if not self.ended:
            now_ms = int((time.monotonic() - self.t0) * 1000)
            trace.append(
                encode_frame(MessageType.SESSION_END, payloads.encode_session_end(now_ms))
            )
        return trace

    def bitrate_stats(self) -> dict:
        trace = self.accounting_trace()
        try:
            payload = payload_bitrate(
                trace, AccountingPolicy.PAYLOAD_ONLY, known_profiles=self.known_at_start
            )
            wire = payload_bitrate(
                trace, AccountingPolicy.PAYLOAD_PLUS_FRAMING, known_profiles=self.known_at_start
            )
        except (IllegalTrace, ZeroAccountedDuration):
            # a connection that died mid-handshake has no rateable trace
            return {"type": "stats", "session_id": self.id, "bps_payload": 0.0,
                    "bps_wire": 0.0, "latency_ms": self.stats.last_latency_ms,
                    "duration_ms": 0, "segments": self.stats.segments,
                    "stalls": self.stats.stalls, "excluded_bits": 0}
        return {
            "type": "stats",
            "session_id": self.id,
            "bps_payload": payload.bps,
            "bps_wire": wire.bps,
            "latency_ms": self.stats.last_latency_ms,
            "duration_ms": payload.accounted_duration_ms,
            "segments": self.stats.segments,
            "stalls": self.stats.stalls,
            "excluded_bits": payload.excluded_bits,
        }


class ProtocolViolation(Exception):
    def __init__(self, message: str, replies: list[bytes]):
        self.replies = replies
        super().__init__(message)


def _jpeg_b64(frame: VideoFrame, quality: int) -> str:
    from PIL import Image

    img = Image.frombytes("RGB", (frame.width, frame.height), frame.data)
    buf = io.BytesIO()
    img.save(buf, "JPEG", quality=quality)
    return base64.b64encode(buf.getvalue()).decode("ascii")


def _split_frames(result: dict) -> list[bytes]:
    size = result["width"] * result["height"] * 3
    blob = result["frames"]
    return [blob[i * size : (i + 1) * size] for i in range(result["frame_count"])]


def _ceil_frames(n_samples: int, rate: int, fps: int = 25) -> int:
    return (n_samples * fps + rate - 1) // rate


class Gateway:
    def __init__(self, config: GatewayConfig):
        self.config = config
        self.profiles = ProfileStore(config.profile_dir)
        self.sessions: dict[int, LiveSession] = {}
        self.backend: AsyncBackend | None = None
        self._servers: list[asyncio.base_events.Server] = []
        self._next_id = 1
        self._bound: dict[str, int] = {}

    # -- lifecycle ------------------------------------------------------------

    async def start(self) -> None:
        self.backend = AsyncBackend(spawn_stdio(self.config.backend_cmd))
        caps = await asyncio.to_thread(self.backend.client.hello)
        _log("backend_ready", impl=caps.get("impl"), ops=caps.get("ops"))
        host = self.config.host
        for name, port, handler in [
            ("protocol", self.config.protocol_port, self._protocol_conn),
            ("ui", self.config.ui_port, self._ui_conn),
            ("playback", self.config.playback_port, self._playback_conn),
        ]:
            server = await asyncio.start_server(self._guard(handler), host, port)
            self._servers.append(server)
            self._bound[name] = server.sockets[0].getsockname()[1]
            _log("listening", listener=name, port=self._bound[name])

    async def stop(self) -> None:
        for server in self._servers:
            server.close()
            await server.wait_closed()
        self._servers.clear()
        for session in self.sessions.values():
            if session._drain_task is not None:
                session._drain_task.cancel()
        if self.backend is not None:
            await asyncio.to_thread(self.backend.close)
            self.backend = None

    @property
    def protocol_port(self) -> int:
        return self._bound["protocol"]

    @property
    def ui_port(self) -> int:
        return self._bound["ui"]

    @property
    def playback_port(self) -> int:
        return self._bound["playback"]

    def _new_session(self, origin: str) -> LiveSession:
        session = LiveSession(self, self._next_id, origin)
        self.sessions[self._next_id] = session
        self._next_id += 1
        return session

    def _guard(self, handler):
        async def run(reader, writer):
            try:
                await handler(reader, writer)
            except (asyncio.IncompleteReadError, ConnectionResetError, HttpError):
                pass
            except Exception as exc:  # isolation: log, never propagate
                _log("connection_crashed", handler=handler.__name__, error=repr(exc))
            finally:
                try:
                    writer.close()
                except Exception:
                    pass

        return run

    # -- protocol listener ------------------------------------------------------

    async def _protocol_conn(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        session = self._new_session("tcp")
        deframer = Deframer()
        try:
            while not session.ended:
                data = await reader.read(65536)
                if not data:
                    break
                for event in deframer.feed(data):
                    if event.error is not None:
                        writer.write(
                            encode_frame(
                                MessageType.PROTOCOL_ERROR,
                                payloads.encode_protocol_error(
                                    wire_session.ERR_MALFORMED, type(event.error).__name__
                                ),
                            )
                        )
                        await writer.drain()
                        _log("frame_error", session=session.id, error=repr(event.error))
                        return
                    replies = await session.handle_frame(
                        event.frame.msg_type, event.frame.payload
                    )
                    for reply in replies:
                        writer.write(reply)
                    await writer.drain()
        except ProtocolViolation as violation:
            for reply in violation.replies:
                writer.write(reply)
            await writer.drain()
        finally:
            # let the drain task run the tail of the session out
            session._wake.set()


    # -- ui listener -------------------------------------------------------------

    async def _ui_conn(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        request = await read_http_request(reader)
        if not request.wants_websocket:
            writer.write(http_response(400, b"websocket endpoint"))
            await writer.drain()
            return
        if request.path == "/wire":
            await self._wire_ws(request, reader, writer)
            return
        if request.path != "/ui":
            writer.write(http_response(404, b"unknown path"))
            await writer.drain()
            return
        if request.query_one("token") != self.config.ui_token:
            writer.write(http_response(401, b"bad token"))
            await writer.drain()
            return
        ws = await WebSocket.accept(request, reader, writer)
        await self._ui_loop(ws)

    async def _ui_loop(self, ws: WebSocket) -> None:
        session = self._new_session("ui")
        # the UI lane is a sender: open its session with a real HELLO frame
        await session.handle_frame(MessageType.HELLO, payloads.encode_hello(session.id))
        session.subscribers.add(ws)
        state = {"user_id": None, "seq": 0}
        stats_task = asyncio.create_task(self._stats_pusher(ws, session))
        try:
            while True:
                message = await ws.recv()
                if message is None:
                    break
                opcode, data = message
                if opcode != OP_TEXT:
                    continue
                try:
                    msg = json.loads(data)
                    kind = msg["type"]
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    await ws.send_text(json.dumps({"type": "error", "message": f"malformed: {exc}"}))
                    continue
                if kind == "select_profile":
                    uid = int(msg.get("user_id", -1))
                    if uid not in self.profiles.known_ids():
                        await ws.send_text(json.dumps({"type": "error", "message": "unknown profile"}))
                    else:
                        state["user_id"] = uid
                        await ws.send_text(json.dumps({"type": "profile_selected", "user_id": uid}))
                elif kind == "mode":
                    try:
                        session.mode = Mode(str(msg.get("value", "")).lower())
                        session.jbuf.buffer_ms = DEFAULT_JITTER_MS[session.mode]
                        await ws.send_text(json.dumps({"type": "mode_set", "value": session.mode.value}))
                    except ValueError:
                        await ws.send_text(json.dumps({"type": "error", "message": "unknown mode"}))
                elif kind == "text":
                    await self._ui_text(ws, session, state, str(msg.get("body", "")))
                else:
                    await ws.send_text(json.dumps({"type": "error", "message": f"unknown type {kind!r}"}))
        finally:
            stats_task.cancel()
            session.subscribers.discard(ws)
            session.ended = True
            session._wake.set()

    async def _ui_text(self, ws: WebSocket, session: LiveSession, state: dict, body: str) -> None:
        if not body:
            return
        if state["user_id"] is None:
            await ws.send_text(json.dumps({"type": "error", "message": "select a profile first"}))
            return
        capture_ms = int((time.monotonic() - session.t0) * 1000)
        payload = payloads.TextSegmentPayload(
            session_id=session.id,
            seq=state["seq"],
            capture_ts_ms=capture_ms,
            user_id=state["user_id"],
            compressor_id=int(CompressorId.BZIP2),
            body=compress_text(body, CompressorId.BZIP2),
        )
        state["seq"] += 1
        try:
            await session.handle_frame(MessageType.TEXT_SEGMENT, payload.encode())
        except ProtocolViolation as violation:
            await ws.send_text(json.dumps({"type": "error", "message": str(violation)}))

    async def _stats_pusher(self, ws: WebSocket, session: LiveSession) -> None:
        while not ws.closed:
            await ws.send_text(json.dumps(session.bitrate_stats()))
            await asyncio.sleep(self.config.stats_interval_s)

    async def _wire_ws(self, request, reader, writer) -> None:
        ws = await WebSocket.accept(request, reader, writer)
        session = self._new_session("ws")
        deframer = Deframer()
        try:
            while not session.ended:
                message = await ws.recv()
                if message is None:
                    break
                opcode, data = message
                if opcode != OP_BINARY:
                    continue
                for event in deframer.feed(data):
                    if event.error is not None:
                        await ws.close(1002)
                        return
                    replies = await session.handle_frame(
                        event.frame.msg_type, event.frame.payload
                    )
                    for reply in replies:
                        await ws.send_binary(reply)
        except ProtocolViolation as violation:
            for reply in violation.replies:
                await ws.send_binary(reply)
            await ws.close(1002)
        finally:
            session._wake.set()

    # -- playback listener -------------------------------------------------------

    async def _playback_conn(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        request = await read_http_request(reader)
        if request.method != "GET":
            writer.write(http_response(400, b"GET only"))
            return
        if request.path == "/sessions":
            body = json.dumps(
                {
                    str(sid): {
                        "origin": s.origin,
                        "frames": len(s.frames),
                        "ended": s.ended,
                    }
                    for sid, s in self.sessions.items()
                }
            ).encode()
            writer.write(http_response(200, body, "application/json"))
            await writer.drain()
            return
        parts = request.path.strip("/").split("/")
        if len(parts) == 3 and parts[0] == "session" and parts[2] == "stream":
            await self._serve_stream(writer, parts[1])
            return
        writer.write(http_response(404, b"not found"))
        await writer.drain()

    async def _serve_stream(self, writer: asyncio.StreamWriter, sid: str) -> None:
        session = self.sessions.get(int(sid)) if sid.isdigit() else None
        if session is None or not session.frames:
            writer.write(http_response(404, b"no such session or no media yet"))
            await writer.drain()
            return
        muxer = shutil.which("ffmpeg")
        if muxer is None:
            writer.write(
                http_response(503, b"no muxer installed; UI frame stream remains available")
            )
            await writer.drain()
            return
        data = await asyncio.to_thread(self._mux_session, session, muxer)
        writer.write(http_response(200, data, "video/mp4"))
        await writer.drain()

    def _mux_session(self, session: LiveSession, muxer: str) -> bytes:
        from txt2vid.pipeline.sinks import FileSink

        with tempfile.TemporaryDirectory(prefix="playback-") as tmp:
            out = Path(tmp) / "session.mp4"
            sink = FileSink(out, fps=25, muxer=muxer)
            for frame in session.frames:
                sink.frames.append(frame)
            sink.audio.extend(session.audio)
            sink.sample_rate = session.sample_rate
            sink.finalize()
            return out.read_bytes()


async def run_gateway(config: GatewayConfig, ports_file: str | None = None) -> None:
    setup_json_logging()
    gateway = Gateway(config)
    await gateway.start()
    if ports_file:
        # ephemeral-port discovery for scripts and tests
        Path(ports_file).write_text(json.dumps(gateway._bound), "utf-8")
    try:
        await asyncio.Event().wait()
    finally:
        await gateway.stop()
