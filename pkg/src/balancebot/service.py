"""Live simulation service: one robot, many clients, TCP and WebSocket.

Clients send command lines and receive echo/error replies plus the shared
telemetry broadcast.  All transports feed one asyncio loop, so command
ordering is arrival ordering.  The special line "reset" swaps in a fresh
simulation (same config and seed) and restarts the clock.

In realtime mode the logical clock chases the wall clock in bounded chunks;
a late wakeup never produces one giant catch-up step.
"""

from __future__ import annotations

import asyncio
import contextlib
import logging
from dataclasses import replace

from websockets.asyncio.server import serve as ws_serve

from .config import SimConfig
from .protocol import encode_telemetry
from .simulation import Simulation

logger = logging.getLogger(__name__)

DEFAULT_TCP_PORT = 7777
DEFAULT_WS_PORT = 7778

_PACE_INTERVAL_S = 0.005
_MAX_CHUNK_US = 50_000  # never integrate more than 50 ms per wakeup
_CLIENT_QUEUE_MAX = 256

RESET_LINE = "reset"


class SimServer:
    """Owns the simulation and its clients inside one event loop."""

    def __init__(self, cfg: SimConfig, tcp_port: int = DEFAULT_TCP_PORT,
                 ws_port: int = DEFAULT_WS_PORT) -> None:
        self.cfg = replace(cfg, realtime=True)
        self.tcp_port = tcp_port
        self.ws_port = ws_port
        self.sim = Simulation(self.cfg)
        self._clients: set[asyncio.Queue[str]] = set()
        self._origin: float | None = None
        self._stopping = asyncio.Event()
        self.tcp_server = None
        self.ws_server = None

    # -- command path -----------------------------------------------------

    def handle_line(self, line: str) -> str | None:
        """Process one client line; returns the reply for that client."""
        line = line.strip()
        if line == RESET_LINE:
            self.sim = Simulation(self.cfg)
            self._origin = None  # restart pacing from the swap point
            return None
        return self.sim.submit_command(line)

    # -- broadcast --------------------------------------------------------

    def _broadcast(self, text: str) -> None:
        for queue in self._clients:
            if queue.full():
                with contextlib.suppress(asyncio.QueueEmpty):
                    queue.get_nowait()  # drop oldest for a slow client
            queue.put_nowait(text)

    def _register(self) -> asyncio.Queue[str]:
        queue: asyncio.Queue[str] = asyncio.Queue(maxsize=_CLIENT_QUEUE_MAX)
        self._clients.add(queue)
        return queue

    def _unregister(self, queue: asyncio.Queue[str]) -> None:
        self._clients.discard(queue)

    # -- simulation pacing ------------------------------------------------

    async def _pace(self) -> None:
        loop = asyncio.get_running_loop()
        while not self._stopping.is_set():
            if self._origin is None:
                self._origin = loop.time() - self.sim.time_us * 1e-6
            target_us = int((loop.time() - self._origin) * 1e6)
            while self.sim.time_us < target_us:
                chunk_end = min(target_us, self.sim.time_us + _MAX_CHUNK_US)
                self.sim.advance_to_us(chunk_end)
                if chunk_end < target_us:
                    # Fell behind by more than a chunk: drop the backlog
                    # instead of racing the clock.
                    self._origin = loop.time() - self.sim.time_us * 1e-6
                    break
            for frame in self.sim.drain_frames():
                self._broadcast(encode_telemetry(frame))
            await asyncio.sleep(_PACE_INTERVAL_S)

    # -- transports -------------------------------------------------------

    async def _serve_tcp(self, reader: asyncio.StreamReader,
                         writer: asyncio.StreamWriter) -> None:
        queue = self._register()

        async def pump() -> None:
            while True:
                text = await queue.get()
                writer.write(text.encode() + b"\n")
                await writer.drain()

        pump_task = asyncio.create_task(pump())
        try:
            while True:
                raw = await reader.readline()
                if not raw:
                    break
                reply = self.handle_line(raw.decode(errors="replace"))
                if reply is not None:
                    writer.write(reply.encode() + b"\n")
                    await writer.drain()
        except (ConnectionError, asyncio.IncompleteReadError):
            pass
        finally:
            pump_task.cancel()
            self._unregister(queue)
            writer.close()
            with contextlib.suppress(ConnectionError):
                await writer.wait_closed()

    async def _serve_ws(self, connection) -> None:
        queue = self._register()

        async def pump() -> None:
            while True:
                await connection.send(await queue.get())

        pump_task = asyncio.create_task(pump())
        try:
            async for message in connection:
                if isinstance(message, bytes):
                    message = message.decode(errors="replace")
                reply = self.handle_line(message)
                if reply is not None:
                    await connection.send(reply)
        except Exception:
            logger.debug("websocket client dropped", exc_info=True)
        finally:
            pump_task.cancel()
            self._unregister(queue)

    # -- lifecycle --------------------------------------------------------

    async def run(self) -> None:
        """Serve until stop() is called."""
        self.tcp_server = await asyncio.start_server(
            self._serve_tcp, host="0.0.0.0", port=self.tcp_port)
        self.ws_server = await ws_serve(
            self._serve_ws, host="0.0.0.0", port=self.ws_port)
        pace_task = asyncio.create_task(self._pace())
        logger.info("serving tcp=%d ws=%d", self.tcp_port, self.ws_port)
        try:
            await self._stopping.wait()
        finally:
            pace_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await pace_task
            self.tcp_server.close()
            await self.tcp_server.wait_closed()
            self.ws_server.close(close_connections=True)
            await self.ws_server.wait_closed()

    def stop(self) -> None:
        self._stopping.set()


async def serve(cfg: SimConfig, tcp_port: int = DEFAULT_TCP_PORT,
                ws_port: int = DEFAULT_WS_PORT) -> None:
    """Run the service forever (until cancelled)."""
    await SimServer(cfg, tcp_port, ws_port).run()
