"""Live service: TCP and WebSocket transports over one shared simulation."""

import asyncio
import dataclasses
import socket

from websockets.asyncio.client import connect as ws_connect

from balancebot.config import default_config
from balancebot.protocol import decode_telemetry
from balancebot.service import SimServer
from balancebot.simulation import ERROR_REPLY


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def service_cfg():
    cfg = default_config()
    cfg.controller = dataclasses.replace(cfg.controller, warmup_delay_us=0)
    return cfg


def run_with_server(body, cfg=None):
    """Start a server in a private event loop, run the async body, tear down."""

    async def main():
        server = SimServer(cfg or service_cfg(),
                           tcp_port=free_port(), ws_port=free_port())
        run_task = asyncio.create_task(server.run())
        for _ in range(200):
            if server.tcp_server is not None and server.ws_server is not None:
                break
            await asyncio.sleep(0.01)
        else:
            run_task.cancel()
            raise RuntimeError("server did not start")
        try:
            await asyncio.wait_for(body(server), timeout=20)
        finally:
            server.stop()
            await asyncio.wait_for(run_task, timeout=5)

    asyncio.run(main())


async def tcp_client(server):
    return await asyncio.open_connection("127.0.0.1", server.tcp_port)


async def send_line(writer, line):
    writer.write(line.encode() + b"\n")
    await writer.drain()


async def read_lines_until(reader, predicate, limit=300):
    """Read text lines until one satisfies the predicate; returns it."""
    for _ in range(limit):
        raw = await asyncio.wait_for(reader.readline(), timeout=5)
        if not raw:
            break
        line = raw.decode().strip()
        if predicate(line):
            return line
    raise AssertionError("expected line never arrived")


class TestTcp:
    def test_move_echo(self):
        async def body(server):
            reader, writer = await tcp_client(server)
            await send_line(writer, "mov1.00,0.50")
            line = await read_lines_until(reader, lambda l: l.startswith("x"))
            assert line == "x1.00,0.50"
            writer.close()

        run_with_server(body)

    def test_malformed_gets_error_and_connection_survives(self):
        async def body(server):
            reader, writer = await tcp_client(server)
            await send_line(writer, "mov1.5")
            line = await read_lines_until(reader, lambda l: l.startswith("err"))
            assert line == ERROR_REPLY
            await send_line(writer, "mov2.00,0.00")
            assert await read_lines_until(reader, lambda l: l.startswith("x")) == "x2.00,0.00"
            writer.close()

        run_with_server(body)

    def test_telemetry_stream_decodes_at_wire_rate(self):
        async def body(server):
            reader, writer = await tcp_client(server)
            frames = []
            while len(frames) < 12:
                raw = await asyncio.wait_for(reader.readline(), timeout=5)
                line = raw.decode().strip()
                if line.startswith("{"):
                    frames.append(decode_telemetry(line))
            stamps = [f.time_us for f in frames]
            assert stamps == sorted(stamps)
            # Broadcast period tracks the configured 50 Hz telemetry rate.
            gaps = [b - a for a, b in zip(stamps, stamps[1:])]
            assert all(g == 20_000 for g in gaps)
            writer.close()

        run_with_server(body)

    def test_keepalive_gets_no_reply(self):
        async def body(server):
            reader, writer = await tcp_client(server)
            await send_line(writer, "xxxxx")
            await send_line(writer, "mov0.25,0.00")
            # The first non-telemetry reply is the echo; no keep-alive reply
            # precedes it.
            line = await read_lines_until(reader, lambda l: not l.startswith("{"))
            assert line == "x0.25,0.00"
            writer.close()

        run_with_server(body)

    def test_conflicting_commands_last_writer_wins(self):
        async def body(server):
            r1, w1 = await tcp_client(server)
            r2, w2 = await tcp_client(server)
            await send_line(w1, "mov1.00,0.00")
            await read_lines_until(r1, lambda l: l.startswith("x"))
            await send_line(w2, "mov-3.00,0.00")
            await read_lines_until(r2, lambda l: l.startswith("x"))
            # Both commands are queued in arrival order; the later one is the
            # reference left standing after the next control boundary.
            for _ in range(100):
                if server.sim.balancer.ref_velocity == -3.0:
                    break
                await asyncio.sleep(0.01)
            assert server.sim.balancer.ref_velocity == -3.0
            w1.close()
            w2.close()

        run_with_server(body)

    def test_reset_restarts_the_clock(self):
        async def body(server):
            reader, writer = await tcp_client(server)
            first = await read_lines_until(reader, lambda l: l.startswith("{"))
            t0 = decode_telemetry(first).time_us
            while True:
                line = await read_lines_until(reader, lambda l: l.startswith("{"))
                if decode_telemetry(line).time_us >= t0 + 100_000:
                    break
            await send_line(writer, "reset")
            line = await read_lines_until(
                reader,
                lambda l: l.startswith("{") and decode_telemetry(l).time_us < t0 + 100_000,
            )
            assert decode_telemetry(line).time_us >= 0
            writer.close()

        run_with_server(body)


class TestWebSocket:
    def test_move_echo_over_websocket(self):
        async def body(server):
            async with ws_connect(f"ws://127.0.0.1:{server.ws_port}") as ws:
                await ws.send("mov1.50,-0.50")
                for _ in range(300):
                    message = await asyncio.wait_for(ws.recv(), timeout=5)
                    if not message.startswith("{"):
                        assert message == "x1.50,-0.50"
                        return
                raise AssertionError("echo never arrived")

        run_with_server(body)

    def test_websocket_receives_decodable_telemetry(self):
        async def body(server):
            async with ws_connect(f"ws://127.0.0.1:{server.ws_port}") as ws:
                seen = 0
                while seen < 5:
                    message = await asyncio.wait_for(ws.recv(), timeout=5)
                    if message.startswith("{"):
                        decode_telemetry(message)
                        seen += 1

        run_with_server(body)


class TestLifecycle:
    def test_simulation_progresses_without_clients(self):
        async def body(server):
            await asyncio.sleep(0.3)
            assert server.sim.time_us > 0

        run_with_server(body)

    def test_handle_line_reset_swaps_simulation(self):
        async def body(server):
            await asyncio.sleep(0.2)
            old = server.sim
            assert server.handle_line("reset") is None
            assert server.sim is not old
            assert server.sim.time_us == 0

        run_with_server(body)
