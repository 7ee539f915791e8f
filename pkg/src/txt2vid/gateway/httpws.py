"""Minimal HTTP/1.1 request parsing and RFC 6455 websocket server framing.

Just enough protocol for the gateway's three listeners: parse one request,
answer it or upgrade it to a websocket. Server-side only (client frames must
be masked, ours are not), with ping/pong and fragmented-message handling.
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import os
import struct
from dataclasses import dataclass, field
from urllib.parse import parse_qs, urlsplit

WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

OP_CONT = 0x0
OP_TEXT = 0x1
OP_BINARY = 0x2
OP_CLOSE = 0x8
OP_PING = 0x9
OP_PONG = 0xA


class HttpError(Exception):
    def __init__(self, status: int, message: str):
        self.status = status
        super().__init__(message)


@dataclass
class HttpRequest:
    method: str
    target: str
    headers: dict[str, str]
    path: str = ""
    query: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        parts = urlsplit(self.target)
        self.path = parts.path
        self.query = parse_qs(parts.query)

    def query_one(self, name: str, default: str = "") -> str:
        values = self.query.get(name)
        return values[0] if values else default

    @property
    def wants_websocket(self) -> bool:
        return (
            self.headers.get("upgrade", "").lower() == "websocket"
            and "sec-websocket-key" in self.headers
        )


async def read_http_request(reader: asyncio.StreamReader, max_bytes: int = 16384) -> HttpRequest:
    raw = await reader.readuntil(b"\r\n\r\n")
    if len(raw) > max_bytes:
        raise HttpError(431, "headers too large")
    lines = raw.decode("latin-1").split("\r\n")
    try:
        method, target, _version = lines[0].split(" ", 2)
    except ValueError as exc:
        raise HttpError(400, f"bad request line {lines[0]!r}") from exc
    headers: dict[str, str] = {}
    for line in lines[1:]:
        if not line:
            continue
        name, _, value = line.partition(":")
        headers[name.strip().lower()] = value.strip()
    return HttpRequest(method=method, target=target, headers=headers)


def http_response(
    status: int,
    body: bytes = b"",
    content_type: str = "text/plain; charset=utf-8",
    extra_headers: dict[str, str] | None = None,
) -> bytes:
    reason = {200: "OK", 400: "Bad Request", 401: "Unauthorized", 404: "Not Found",
              431: "Headers Too Large", 503: "Service Unavailable"}.get(status, "Status")
    headers = {
        "Content-Type": content_type,
        "Content-Length": str(len(body)),
        "Connection": "close",
        **(extra_headers or {}),
    }
    head = f"HTTP/1.1 {status} {reason}\r\n" + "".join(
        f"{k}: {v}\r\n" for k, v in headers.items()
    )
    return head.encode("latin-1") + b"\r\n" + body


class WebSocket:
    """One websocket connection endpoint (server by default).

    Client endpoints set ``mask_sends`` (clients must mask, servers must
    not); everything else is symmetric.
    """

    def __init__(
        self,
        reader: asyncio.StreamReader,
        writer: asyncio.StreamWriter,
        mask_sends: bool = False,
    ):
        self._reader = reader
        self._writer = writer
        self.mask_sends = mask_sends
        self.closed = False

    @classmethod
    async def accept(
        cls, request: HttpRequest, reader: asyncio.StreamReader, writer: asyncio.StreamWriter
    ) -> "WebSocket":
        key = request.headers["sec-websocket-key"]
        digest = hashlib.sha1((key + WS_GUID).encode("ascii")).digest()
        accept = base64.b64encode(digest).decode("ascii")
        writer.write(
            b"HTTP/1.1 101 Switching Protocols\r\n"
            b"Upgrade: websocket\r\n"
            b"Connection: Upgrade\r\n"
            b"Sec-WebSocket-Accept: " + accept.encode("ascii") + b"\r\n\r\n"
        )
        await writer.drain()
        return cls(reader, writer)

    async def _read_frame(self) -> tuple[int, bool, bytes]:
        head = await self._reader.readexactly(2)
        fin = bool(head[0] & 0x80)
        opcode = head[0] & 0x0F
        masked = bool(head[1] & 0x80)
        length = head[1] & 0x7F
        if length == 126:
            (length,) = struct.unpack(">H", await self._reader.readexactly(2))
        elif length == 127:
            (length,) = struct.unpack(">Q", await self._reader.readexactly(8))
        mask = await self._reader.readexactly(4) if masked else b""
        payload = await self._reader.readexactly(length) if length else b""
        if masked:
            payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        return opcode, fin, payload

    async def recv(self) -> tuple[int, bytes] | None:
        """Next text/binary message, or None once the peer closed."""
        message = bytearray()
        message_op = None
        while True:
            try:
                opcode, fin, payload = await self._read_frame()
            except (asyncio.IncompleteReadError, ConnectionResetError, OSError):
                self.closed = True
                return None
            if opcode == OP_CLOSE:
                await self.close()
                return None
            if opcode == OP_PING:
                await self._send_frame(OP_PONG, payload)
                continue
            if opcode == OP_PONG:
                continue
            if opcode in (OP_TEXT, OP_BINARY):
                message_op = opcode
                message.extend(payload)
            elif opcode == OP_CONT and message_op is not None:
                message.extend(payload)
            else:
                await self.close(1002)
                return None
            if fin:
                return message_op, bytes(message)

    async def _send_frame(self, opcode: int, payload: bytes) -> None:
        if self.closed:
            return
        head = bytearray([0x80 | opcode])
        n = len(payload)
        mask_bit = 0x80 if self.mask_sends else 0
        if n < 126:
            head.append(mask_bit | n)
        elif n < 1 << 16:
            head.append(mask_bit | 126)
            head.extend(struct.pack(">H", n))
        else:
            head.append(mask_bit | 127)
            head.extend(struct.pack(">Q", n))
        if self.mask_sends:
            mask = os.urandom(4)
            head.extend(mask)
            payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        self._writer.write(bytes(head) + payload)
        try:
            await self._writer.drain()
        except (ConnectionResetError, BrokenPipeError, OSError):
            self.closed = True

    async def send_text(self, text: str) -> None:
        await self._send_frame(OP_TEXT, text.encode("utf-8"))

    async def send_binary(self, data: bytes) -> None:
        await self._send_frame(OP_BINARY, data)

    async def close(self, code: int = 1000) -> None:
        if not self.closed:
            self.closed = True
            try:
                await self._send_frame_raw_close(code)
            except OSError:
                pass
            self._writer.close()

    async def _send_frame_raw_close(self, code: int) -> None:
        payload = struct.pack(">H", code)
        if self.mask_sends:
            mask = os.urandom(4)
            masked = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
            head = bytearray([0x80 | OP_CLOSE, 0x80 | len(payload)]) + mask + masked
        else:
            head = bytearray([0x80 | OP_CLOSE, len(payload)]) + payload
        self._writer.write(bytes(head))
        await self._writer.drain()


async def connect_websocket(host: str, port: int, path: str) -> WebSocket:
    """Dial a websocket as a client (used by tests and tooling)."""
    reader, writer = await asyncio.open_connection(host, port)
    key = base64.b64encode(os.urandom(16)).decode("ascii")
    writer.write(
        (
            f"GET {path} HTTP/1.1\r\n"
            f"Host: {host}:{port}\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Key: {key}\r\n"
            "Sec-WebSocket-Version: 13\r\n\r\n"
        ).encode("latin-1")
    )
    await writer.drain()
    status = await reader.readuntil(b"\r\n\r\n")
    first = status.split(b"\r\n", 1)[0]
    if b"101" not in first:
        writer.close()
        raise HttpError(int(first.split()[1]), f"upgrade refused: {first.decode('latin-1')}")
    return WebSocket(reader, writer, mask_sends=True)
