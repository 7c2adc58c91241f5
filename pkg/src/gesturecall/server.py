"""Wire-protocol service for live sessions.

Each connection gets an isolated session (engine + dispatcher). Messages are
newline-delimited JSON objects carried over a WebSocket, one or more objects
per text frame inbound, one object per frame outbound. Malformed input yields
an ``error_out`` and the connection stays open.
"""

from __future__ import annotations

import asyncio
import json
from dataclasses import replace

from websockets.asyncio.server import serve as ws_serve

from .dispatch import ChannelConfig, Dispatcher, OutboxRecord
from .model import SessionConfig
from .session import PROTOCOL_VERSION, SessionEngine
from .traceio import frame_from_json


def _msg(msg_type: str, **body) -> dict:
    return {"v": PROTOCOL_VERSION, "type": msg_type, **body}


def handle_line(engine: SessionEngine, line: str) -> list[dict]:
    """Process one inbound protocol line; always returns the events to send."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        return [_msg("error_out", reason=f"malformed message: {exc.msg}")]
    if not isinstance(obj, dict):
        return [_msg("error_out", reason="malformed message: expected an object")]
    msg_type = obj.get("type")
    if msg_type == "frame_in":
        try:
            frame = frame_from_json(obj["frame"])
        except (KeyError, TypeError, ValueError) as exc:
            return [_msg("error_out", reason=f"bad frame: {exc}")]
        return engine.process_frame(frame)
    if msg_type == "config_in":
        try:
            engine.apply_config(obj.get("config", {}))
        except (TypeError, ValueError) as exc:
            return [_msg("error_out", reason=f"bad config: {exc}")]
        return []
    return [_msg("error_out", reason=f"unknown message type {msg_type!r}")]


def _record_event(record: OutboxRecord) -> dict:
    return _msg(
        "dispatch_out", label=record.label, channel=record.channel,
        status=record.status, reason=record.reason, id=record.record_id,
        request_id=record.request_id, attempts=record.attempts,
    )


async def _session(conn, config: SessionConfig, channel_config: ChannelConfig):
    loop = asyncio.get_running_loop()
    outbound: asyncio.Queue = asyncio.Queue()

    def on_record(record: OutboxRecord):
        loop.call_soon_threadsafe(outbound.put_nowait, _record_event(record))

    dispatcher = Dispatcher(channel_config, config.labels, on_record=on_record)
    engine = SessionEngine(config, dispatcher)

    async def pump():
        while True:
            event = await outbound.get()
            await conn.send(json.dumps(event))

    sender = asyncio.create_task(pump())
    try:
        async for message in conn:
            if isinstance(message, bytes):
                message = message.decode("utf-8", errors="replace")
            for line in message.split("\n"):
                if not line.strip():
                    continue
                for event in handle_line(engine, line):
                    outbound.put_nowait(event)
    finally:
        # Let queued outbound events flush before tearing the session down.
        while not outbound.empty():
            try:
                await conn.send(json.dumps(outbound.get_nowait()))
            except Exception:
                break
        sender.cancel()
        await loop.run_in_executor(None, dispatcher.close)


def serve(
    config: SessionConfig,
    channel_config: ChannelConfig,
    host: str = "127.0.0.1",
    port: int = 8765,
):
    """Bind the service; use as ``async with serve(...) as server``.

    Port 0 picks a free port; the bound address is on ``server.sockets``.
    """
    async def handler(conn):
        # Fresh config per connection keeps sessions fully isolated.
        await _session(conn, replace(config), channel_config)

    return ws_serve(handler, host, port)


async def run_forever(
    config: SessionConfig,
    channel_config: ChannelConfig,
    host: str,
    port: int,
):
    async with serve(config, channel_config, host, port) as server:
        addr = server.sockets[0].getsockname()
        print(f"listening on ws://{addr[0]}:{addr[1]}")
        await asyncio.get_running_loop().create_future()
