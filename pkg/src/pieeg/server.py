"""Web-socket broadcast of the live pipeline plus a control intake.

One full-duplex JSON message stream per client on ``/stream``. Outbound
message kinds: ``samples`` (decimated filtered trace), ``spectrum``,
``event``, ``pin_state`` and ``status``; every message carries the session's
monotone ``seq``. Inbound control messages look like
``{"kind": "control", "cmd": "set_threshold", "detector_id": "bandA",
"threshold_uv": 100.0}`` and are answered with
``{"kind": "ack", "cmd_seq": 3, "ok": true, ...}``.

Events, pin states and status updates are delivered to every client;
samples and spectra may be dropped for a slow client (the display path is
lossy by design, the detection path never sees this server). A plain HTTP
``GET /healthz`` answers ``ok``; any other non-stream path serves the bundled
scope UI assets when present. Binds loopback unless told otherwise; there is
no authentication, so exposing it is an explicit choice.
"""

from __future__ import annotations

import asyncio
import http
import json
import threading
from pathlib import Path
from typing import Protocol

from websockets.asyncio.server import ServerConnection, serve as ws_serve
from websockets.datastructures import Headers
from websockets.exceptions import ConnectionClosed
from websockets.http11 import Request, Response

DEFAULT_PORT = 8089
NONCRITICAL_QUEUE_LIMIT = 64
LOSSY_KINDS = ("samples", "spectrum")

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
    ".map": "application/json",
}


class SessionHandle(Protocol):
    """What the server needs from a session (or a test double)."""

    def status_snapshot(self) -> dict: ...

    def submit_control(self, command: dict): ...


class _Client:
    def __init__(self, min_seq: int):
        self.queue: asyncio.Queue = asyncio.Queue()
        self.min_seq = min_seq
        self.dropped = 0


class StreamServer:
    """Runs the asyncio server on its own thread; publish() is thread-safe."""

    def __init__(
        self,
        session: SessionHandle,
        host: str = "127.0.0.1",
        port: int = DEFAULT_PORT,
        assets_dir: str | Path | None = None,
    ):
        self._session = session
        self._host = host
        self._requested_port = port
        self._assets_dir = Path(assets_dir) if assets_dir else _default_assets_dir()
        self._loop: asyncio.AbstractEventLoop | None = None
        self._thread: threading.Thread | None = None
        self._clients: set[_Client] = set()
        self._ready = threading.Event()
        self._startup_error: BaseException | None = None
        self._stop_future: asyncio.Future | None = None
        self.port: int | None = None

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> "StreamServer":
        self._thread = threading.Thread(target=self._run, name="pieeg-server", daemon=True)
        self._thread.start()
        self._ready.wait()
        if self._startup_error is not None:
            raise self._startup_error
        return self

    def stop(self) -> None:
        loop = self._loop
        if loop is not None and self._stop_future is not None:
            loop.call_soon_threadsafe(
                lambda: self._stop_future.done() or self._stop_future.set_result(None)
            )
        if self._thread is not None:
            self._thread.join(timeout=10)

    def _run(self) -> None:
        asyncio.run(self._main())

    async def _main(self) -> None:
        self._loop = asyncio.get_running_loop()
        self._stop_future = self._loop.create_future()
        try:
            server = await ws_serve(
                self._handler,
                self._host,
                self._requested_port,
                process_request=self._process_request,
            )
        except OSError as exc:
            self._startup_error = exc
            self._ready.set()
            return
        self.port = server.sockets[0].getsockname()[1]
        self._ready.set()
        try:
            await self._stop_future
        finally:
            server.close()
            await server.wait_closed()

    # -- broadcast ---------------------------------------------------------

    def publish(self, message: dict) -> None:
        """Fan a session message out to every connected client. Thread-safe."""
        loop = self._loop
        if loop is None or loop.is_closed():
            return
        try:
            loop.call_soon_threadsafe(self._fanout, message)
        except RuntimeError:
            pass  # loop shut down between the check and the call

    def _fanout(self, message: dict) -> None:
        kind = message.get("kind")
        seq = message.get("seq", 0)
        for client in self._clients:
            if seq <= client.min_seq:
                continue  # published before this client joined
            if kind in LOSSY_KINDS and client.queue.qsize() >= NONCRITICAL_QUEUE_LIMIT:
                client.dropped += 1
                continue
            client.queue.put_nowait(message)

    # -- per-connection ----------------------------------------------------

    async def _handler(self, ws: ServerConnection) -> None:
        snapshot = self._session.status_snapshot()
        client = _Client(min_seq=snapshot.get("seq", 0))
        self._clients.add(client)
        sender = None
        try:
            await ws.send(json.dumps(snapshot))
            sender = asyncio.create_task(self._send_loop(ws, client))
            cmd_seq = 0
            async for raw in ws:
                cmd_seq += 1
                ack = await self._handle_control(raw, cmd_seq)
                await ws.send(json.dumps(ack))
        except ConnectionClosed:
            pass
        finally:
            self._clients.discard(client)
            if sender is not None:
                sender.cancel()

    async def _send_loop(self, ws: ServerConnection, client: _Client) -> None:
        while True:
            message = await client.queue.get()
            await ws.send(json.dumps(message))

    async def _handle_control(self, raw, cmd_seq: int) -> dict:
        try:
            command = json.loads(raw)
        except (json.JSONDecodeError, TypeError):
            return {"kind": "ack", "cmd_seq": cmd_seq, "ok": False, "reason": "invalid JSON"}
        if not isinstance(command, dict) or command.get("kind") != "control":
            return {
                "kind": "ack",
                "cmd_seq": cmd_seq,
                "ok": False,
                "reason": "expected a control message",
            }
        fut = self._session.submit_control(command)
        try:
            ok, info = await asyncio.wait_for(asyncio.wrap_future(fut), timeout=10)
        except asyncio.TimeoutError:
            return {
                "kind": "ack",
                "cmd_seq": cmd_seq,
                "ok": False,
                "reason": "control queue did not drain in time",
            }
        ack = {"kind": "ack", "cmd_seq": cmd_seq, "ok": ok}
        ack.update(info)
        return ack

    # -- plain HTTP --------------------------------------------------------

    def _process_request(self, connection: ServerConnection, request: Request):
        path = request.path.split("?", 1)[0]
        if path == "/healthz":
            return connection.respond(http.HTTPStatus.OK, "ok\n")
        if path == "/stream":
            return None  # continue the websocket handshake
        return self._serve_asset(connection, path)

    def _serve_asset(self, connection: ServerConnection, path: str):
        if path == "/":
            path = "/index.html"
        candidate = (self._assets_dir / path.lstrip("/")).resolve()
        try:
            candidate.relative_to(self._assets_dir.resolve())
        except ValueError:
            return connection.respond(http.HTTPStatus.NOT_FOUND, "not found\n")
        if not candidate.is_file():
            if path == "/index.html":
                return connection.respond(
                    http.HTTPStatus.OK,
                    "scope UI bundle not built; see frontend/README.md\n",
                )
            return connection.respond(http.HTTPStatus.NOT_FOUND, "not found\n")
        body = candidate.read_bytes()
        headers = Headers()
        headers["Content-Type"] = _CONTENT_TYPES.get(
            candidate.suffix, "application/octet-stream"
        )
        headers["Content-Length"] = str(len(body))
        return Response(200, "OK", headers, body)


def _default_assets_dir() -> Path:
    return Path(__file__).parent / "assets"


def serve(
    session: SessionHandle,
    port: int = DEFAULT_PORT,
    host: str = "127.0.0.1",
    assets_dir: str | Path | None = None,
) -> StreamServer:
    """Start a broadcast server for a running session and return it."""
    return StreamServer(session, host=host, port=port, assets_dir=assets_dir).start()
