"""Live session serving: sockets in, engine loop in the middle, frames out.

Network reader threads only enqueue; the single main loop owns the engine,
stamps each input at dequeue time (one clock, always non-decreasing), logs
it, and fans the resulting frames out to every connected client.
"""

from __future__ import annotations

import logging
import queue
import signal
import socket
import threading
import time
from pathlib import Path
from typing import Optional

from . import ws
from ..events import ControlEvent, TouchEvent
from .config import EngineConfig, presets_digest
from .core import Engine
from .protocol import Message, parse_message, serialize_message
from .sessionlog import SessionLogWriter

log = logging.getLogger(__name__)

TICK_SECONDS = 0.002


class _Client:
    def __init__(self, sock: socket.socket, kind: str, name: str) -> None:
        self.sock = sock
        self.kind = kind  # "tcp" | "ws"
        self.name = name
        self.lock = threading.Lock()
        self.dead = False

    def send_line(self, frame: str) -> None:
        if self.dead:
            return
        try:
            with self.lock:
                if self.kind == "ws":
                    ws.send_text(self.sock, frame)
                else:
                    self.sock.sendall(frame.encode("utf-8") + b"\n")
        except OSError:
            self.dead = True


class SessionServer:
    """Owns the listening sockets and drives one Engine until stopped."""

    def __init__(
        self,
        config: EngineConfig,
        port: Optional[int] = None,
        seed: Optional[int] = None,
        headless: bool = False,
        ws_port: Optional[int] = None,
        log_path: Optional[str] = None,
    ) -> None:
        self.config = config
        self.port = config.port if port is None else port
        self.seed = config.seed if seed is None else seed
        self.headless = headless
        self.ws_port = self.port + 1 if ws_port is None else ws_port
        self.log_path = log_path or time.strftime("tubeplay-session-%Y%m%d-%H%M%S.log")
        self._queue: "queue.Queue[tuple]" = queue.Queue()
        self._clients: list[_Client] = []
        self._clients_lock = threading.Lock()
        self._stop = threading.Event()
        self._t0 = 0.0

    # -- plumbing ----------------------------------------------------------

    def _now_ms(self) -> int:
        return int((time.monotonic() - self._t0) * 1000)

    def _broadcast(self, messages: list[Message]) -> None:
        if not messages:
            return
        frames = [serialize_message(m) for m in messages]
        with self._clients_lock:
            clients = list(self._clients)
        for client in clients:
            for frame in frames:
                client.send_line(frame)
        self._reap()

    def _reap(self) -> None:
        with self._clients_lock:
            dead = [c for c in self._clients if c.dead]
            self._clients = [c for c in self._clients if not c.dead]
        for client in dead:
            try:
                client.sock.close()
            except OSError:
                pass

    def _accept_loop(self, listener: socket.socket, kind: str) -> None:
        while not self._stop.is_set():
            try:
                sock, addr = listener.accept()
            except OSError:
                return
            client = _Client(sock, kind, f"{kind}:{addr[0]}:{addr[1]}")
            threading.Thread(
                target=self._client_loop, args=(client,), daemon=True
            ).start()

    def _client_loop(self, client: _Client) -> None:
        try:
            if client.kind == "ws":
                ws.perform_handshake(client.sock)
            with self._clients_lock:
                self._clients.append(client)
            self._queue.put(("hello", client))
            if client.kind == "ws":
                while not self._stop.is_set():
                    text = ws.read_text_message(client.sock)
                    for line in text.split("\n"):
                        if line.strip():
                            self._queue.put(("line", client, line))
            else:
                buffer = b""
                while not self._stop.is_set():
                    chunk = client.sock.recv(4096)
                    if not chunk:
                        break
                    buffer += chunk
                    while b"\n" in buffer:
                        raw, buffer = buffer.split(b"\n", 1)
                        self._queue.put(("line", client, raw))
        except (OSError, ws.WsError):
            pass
        finally:
            client.dead = True
            self._reap()

    # -- main loop -----------------------------------------------------------

    def run(self) -> int:
        try:
            tcp = socket.create_server(("127.0.0.1", self.port))
            wsl = socket.create_server(("127.0.0.1", self.ws_port)) if self.ws_port else None
        except OSError as exc:
            log.error("cannot bind: %s", exc)
            return 2
        engine = Engine(self.config, seed=self.seed)
        self._t0 = time.monotonic()
        try:
            signal.signal(signal.SIGTERM, lambda *_: self.stop())
            signal.signal(signal.SIGINT, lambda *_: self.stop())
        except ValueError:
            pass  # not the main thread (tests drive stop() directly)
        threading.Thread(target=self._accept_loop, args=(tcp, "tcp"), daemon=True).start()
        if wsl is not None:
            threading.Thread(target=self._accept_loop, args=(wsl, "ws"), daemon=True).start()
        if not self.headless:
            print(f"listening on tcp://127.0.0.1:{self.port}", flush=True)
            if wsl is not None:
                print(f"listening on ws://127.0.0.1:{self.ws_port}", flush=True)
            print(f"session log: {self.log_path}", flush=True)

        with open(self.log_path, "w", encoding="utf-8", newline="\n") as log_file:
            writer = SessionLogWriter(
                log_file, self.seed, self.config.bpm, presets_digest(self.config.presets)
            )
            try:
                while not self._stop.is_set():
                    try:
                        item = self._queue.get(timeout=TICK_SECONDS)
                    except queue.Empty:
                        self._broadcast(engine.advance(self._now_ms()))
                        continue
                    now = self._now_ms()
                    if item[0] == "hello":
                        self._broadcast(engine.advance(now))
                        client = item[1]
                        for msg in engine.snapshot():
                            client.send_line(serialize_message(msg))
                    elif item[0] == "line":
                        _, _, raw = item
                        self._log_input(writer, raw, now)
                        self._broadcast(engine.handle_frame(raw, now))
            except KeyboardInterrupt:
                pass
            finally:
                self._stop.set()
                self._broadcast(engine.finish(self._now_ms()))
                tcp.close()
                if wsl is not None:
                    wsl.close()
                with self._clients_lock:
                    for client in self._clients:
                        try:
                            client.sock.close()
                        except OSError:
                            pass
        return 0

    def stop(self) -> None:
        self._stop.set()

    def _log_input(self, writer: SessionLogWriter, raw, now: int) -> None:
        """Record valid inputs in canonical form; junk only goes to the logger."""
        try:
            msg = parse_message(raw)
        except Exception:
            log.info("dropping unparseable input from log: %r", raw)
            return
        if isinstance(msg, (TouchEvent, ControlEvent)):
            writer.append(now, serialize_message(msg))
