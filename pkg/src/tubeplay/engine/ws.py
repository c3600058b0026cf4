"""Tiny server-side WebSocket layer (RFC 6455, text frames only).

Lets a browser client speak the same newline-delimited grammar the TCP
transport uses: one protocol frame per WebSocket text message. No
extensions, no fragmentation of outgoing messages.
"""

from __future__ import annotations

import base64
import hashlib
import socket
import struct

WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


class WsError(Exception):
    pass


def accept_key(client_key: str) -> str:
    digest = hashlib.sha1((client_key + WS_GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def perform_handshake(sock: socket.socket) -> None:
    """Read the HTTP upgrade request and answer it, or raise WsError."""
    data = b""
    while b"\r\n\r\n" not in data:
        chunk = sock.recv(4096)
        if not chunk:
            raise WsError("connection closed during handshake")
        data += chunk
        if len(data) > 65536:
            raise WsError("oversized handshake request")
    head = data.split(b"\r\n\r\n", 1)[0].decode("latin-1")
    lines = head.split("\r\n")
    if not lines[0].startswith("GET "):
        raise WsError("handshake is not a GET request")
    headers = {}
    for line in lines[1:]:
        if ":" in line:
            name, value = line.split(":", 1)
            headers[name.strip().lower()] = value.strip()
    key = headers.get("sec-websocket-key")
    if not key or "upgrade" not in headers.get("connection", "").lower():
        raise WsError("missing websocket upgrade headers")
    response = (
        "HTTP/1.1 101 Switching Protocols\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Accept: {accept_key(key)}\r\n"
        "\r\n"
    )
    sock.sendall(response.encode("latin-1"))


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise WsError("connection closed mid-frame")
        buf += chunk
    return buf


def read_text_message(sock: socket.socket) -> str:
    """Blocking read of the next text message; answers pings, handles close."""
    while True:
        header = _recv_exact(sock, 2)
        fin = header[0] & 0x80
        opcode = header[0] & 0x0F
        masked = header[1] & 0x80
        length = header[1] & 0x7F
        if length == 126:
            length = struct.unpack(">H", _recv_exact(sock, 2))[0]
        elif length == 127:
            length = struct.unpack(">Q", _recv_exact(sock, 8))[0]
        if length > 1 << 20:
            raise WsError("oversized frame")
        mask = _recv_exact(sock, 4) if masked else b""
        payload = _recv_exact(sock, length) if length else b""
        if masked:
            payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        if opcode == 0x8:
            raise WsError("client sent close")
        if opcode == 0x9:
            send_frame(sock, payload, opcode=0xA)
            continue
        if opcode == 0xA:
            continue
        if opcode not in (0x1, 0x2, 0x0):
            raise WsError(f"unsupported opcode {opcode}")
        if not fin:
            raise WsError("fragmented frames not supported")
        return payload.decode("utf-8", errors="replace")


def send_frame(sock: socket.socket, payload: bytes, opcode: int = 0x1) -> None:
    length = len(payload)
    head = bytearray([0x80 | opcode])
    if length < 126:
        head.append(length)
    elif length < 1 << 16:
        head.append(126)
        head += struct.pack(">H", length)
    else:
        head.append(127)
        head += struct.pack(">Q", length)
    sock.sendall(bytes(head) + payload)


def send_text(sock: socket.socket, text: str) -> None:
    send_frame(sock, text.encode("utf-8"), opcode=0x1)
