"""Selection-to-notification dispatch.

A selection fans out to the configured channels (phone, email, sms, voice)
through a bounded queue and a background worker, so the frame loop never
waits on delivery. Sandbox mode appends rendered payloads to an outbox file;
webhook mode POSTs each record to ``webhook_base/{channel}``.
"""

from __future__ import annotations

import itertools
import json
import logging
import os
import threading
import time
import urllib.error
import urllib.request
from collections import deque
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

from .grid import SelectionEvent
from .model import CHANNEL_ORDER, Channel

# Request ids: cheap monotonic counter under a per-process random prefix.
# Entropy is drawn once at import, not on the frame loop's selection path.
_ID_PREFIX = os.urandom(4).hex()
_ID_COUNTER = itertools.count(1)

# Built once so the first webhook POST does not pay opener construction.
_OPENER = urllib.request.build_opener()


def next_request_id() -> str:
    return f"{_ID_PREFIX}-{next(_ID_COUNTER)}"


PHONE_XML_TEMPLATE = "<Response><Say>{message}</Say></Response>"


class RenderError(Exception):
    """A channel payload could not be rendered (e.g. missing audio entry)."""


class DispatchMode:
    SANDBOX = "sandbox"
    WEBHOOK = "webhook"


@dataclass(frozen=True)
class ChannelConfig:
    enabled: frozenset[Channel] = frozenset(Channel)
    email_to: str = "care-team@example.org"
    sms_to: str = "+15550100"
    phone_to: str = "+15550100"
    from_number: str = "+14692083448"
    message_store_dir: Path = Path("message_store")
    voice_dir: Path = Path("voice_messages")
    outbox_path: Path = Path("outbox.jsonl")
    webhook_base: str | None = None
    mode: str = DispatchMode.SANDBOX
    template: str = "Patient requests: {label}"
    queue_capacity: int = 64
    retry_limit: int = 2
    backoff_s: float = 0.05

    def __post_init__(self):
        if self.mode not in (DispatchMode.SANDBOX, DispatchMode.WEBHOOK):
            raise ValueError(f"unknown dispatch mode {self.mode!r}")
        if self.mode == DispatchMode.WEBHOOK and not self.webhook_base:
            raise ValueError("webhook mode requires webhook_base")


@dataclass
class DispatchRequest:
    # Unfrozen on purpose: constructed on the frame loop's selection path.
    request_id: str
    selection: SelectionEvent
    channels: tuple[Channel, ...]
    created_t_ms: float


@dataclass(frozen=True)
class OutboxRecord:
    record_id: str
    request_id: str
    channel: str
    label: str
    payload: str
    status: str  # queued -> sent | failed
    attempts: int
    t_ms: float
    reason: str | None = None

    def to_json(self) -> dict:
        obj = {
            "id": self.record_id,
            "channel": self.channel,
            "label": self.label,
            "payload": self.payload,
            "status": self.status,
            "attempts": self.attempts,
            "t_ms": self.t_ms,
        }
        if self.reason is not None:
            obj["reason"] = self.reason
        return obj


def ensure_message_store(config: ChannelConfig, labels: tuple[str, ...]) -> None:
    """Create the per-option phone XML files that are missing."""
    config.message_store_dir.mkdir(parents=True, exist_ok=True)
    for label in labels:
        path = config.message_store_dir / f"{label}.xml"
        if not path.exists():
            message = config.template.format(label=label)
            path.write_text(PHONE_XML_TEMPLATE.format(message=message), encoding="utf-8")


def provision_voice_dir(config: ChannelConfig, labels: tuple[str, ...]) -> None:
    """Stand in for the pre-generated speech folder: one placeholder entry per option."""
    config.voice_dir.mkdir(parents=True, exist_ok=True)
    for label in labels:
        path = config.voice_dir / f"{label}.wav"
        if not path.exists():
            path.write_bytes(b"RIFF\x00\x00\x00\x00WAVE")


def render_message(selection: SelectionEvent, channel: Channel,
                   config: ChannelConfig) -> str:
    """Channel payload for a selection: message text, or a file reference.

    Raises RenderError when the voice folder has no entry for the option.
    """
    if channel in (Channel.SMS, Channel.EMAIL):
        return config.template.format(label=selection.label)
    if channel is Channel.PHONE:
        return str(config.message_store_dir / f"{selection.label}.xml")
    matches = sorted(config.voice_dir.glob(f"{selection.label}.*"))
    if not matches:
        raise RenderError("missing audio")
    return str(matches[0])


def deliver(record: OutboxRecord, config: ChannelConfig) -> OutboxRecord:
    """Attempt delivery of a queued record; returns it with a final status.

    Sandbox delivery always succeeds. Webhook delivery POSTs the record JSON
    and retries transient failures with a fixed backoff.
    """
    if record.status != "queued":
        raise ValueError("deliver expects a queued record")
    if config.mode == DispatchMode.SANDBOX:
        return replace(record, status="sent", attempts=1)

    body = json.dumps(record.to_json()).encode("utf-8")
    url = f"{config.webhook_base.rstrip('/')}/{record.channel}"
    attempts = 0
    reason = "unknown"
    while attempts <= config.retry_limit:
        attempts += 1
        try:
            req = urllib.request.Request(
                url, data=body, headers={"Content-Type": "application/json"}
            )
            with _OPENER.open(req, timeout=10) as resp:
                if 200 <= resp.status < 300:
                    return replace(record, status="sent", attempts=attempts)
                reason = f"http {resp.status}"
        except urllib.error.HTTPError as exc:
            reason = f"http {exc.code}"
        except (urllib.error.URLError, OSError):
            reason = "connect"
        if attempts <= config.retry_limit:
            time.sleep(config.backoff_s)
    return replace(record, status="failed", attempts=attempts, reason=reason)


class Dispatcher:
    """Bounded-queue fan-out worker.

    ``enqueue`` is non-blocking and safe to call from the frame loop; a full
    queue rejects the request rather than stalling or silently dropping it.
    Delivery happens on a single polling daemon thread, which keeps the outbox
    append serialized and the per-channel order FIFO. Enqueueing never wakes
    the worker directly (the worker polls, backing off to ``_POLL_MAX_S`` when
    idle), so the frame loop pays only a deque append, not a thread handoff.
    One producing thread per dispatcher: each session owns its own.
    """

    _POLL_S = 0.001
    _POLL_MAX_S = 0.016

    def __init__(
        self,
        config: ChannelConfig,
        labels: tuple[str, ...],
        on_record: Callable[[OutboxRecord], None] | None = None,
    ):
        self.config = config
        self.on_record = on_record
        ensure_message_store(config, labels)
        config.outbox_path.parent.mkdir(parents=True, exist_ok=True)
        self._queue: deque = deque()
        self._append_lock = threading.Lock()
        self._enqueued = 0  # written only by the producing thread
        self._done = 0  # written only by the worker
        self._stop = False
        self._closed = False
        self._thread = threading.Thread(target=self._worker, daemon=True,
                                        name="dispatch-worker")
        self._thread.start()

    @property
    def pending(self) -> int:
        return self._enqueued - self._done

    def enqueue(self, request: DispatchRequest) -> bool:
        """Queue a request for asynchronous delivery; False means queue full."""
        if len(self._queue) >= self.config.queue_capacity:
            return False
        self._enqueued += 1
        self._queue.append(request)
        return True

    def _worker(self):
        idle_sleep = self._POLL_S
        while True:
            try:
                request = self._queue.popleft()
            except IndexError:
                if self._stop:
                    return
                time.sleep(idle_sleep)
                idle_sleep = min(idle_sleep * 2, self._POLL_MAX_S)
                continue
            idle_sleep = self._POLL_S
            try:
                self._handle(request)
            except Exception:  # noqa: BLE001 - a bad request must not kill delivery
                logging.getLogger(__name__).exception(
                    "dispatch of request %s failed", request.request_id)
            finally:
                self._done += 1

    def _handle(self, request: DispatchRequest):
        for channel in CHANNEL_ORDER:
            if channel not in request.channels:
                continue
            record = OutboxRecord(
                record_id=next_request_id(),
                request_id=request.request_id,
                channel=channel.value,
                label=request.selection.label,
                payload="",
                status="queued",
                attempts=0,
                t_ms=request.created_t_ms,
            )
            try:
                payload = render_message(request.selection, channel, self.config)
                record = replace(record, payload=payload)
                record = deliver(record, self.config)
            except RenderError as exc:
                record = replace(record, status="failed", reason=str(exc))
            self._append(record)
            if self.on_record is not None:
                self.on_record(record)

    def _append(self, record: OutboxRecord):
        line = json.dumps(record.to_json()) + "\n"
        with self._append_lock:
            with open(self.config.outbox_path, "a", encoding="utf-8") as fh:
                fh.write(line)

    def drain(self, timeout: float = 10.0) -> bool:
        """Wait until all queued requests have been delivered."""
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            if self.pending == 0:
                return True
            time.sleep(0.005)
        return False

    def close(self, timeout: float = 10.0):
        if self._closed:
            return
        self._closed = True
        self.drain(timeout)
        self._stop = True
        self._thread.join(timeout)


def new_request(selection: SelectionEvent, channels, created_t_ms: float) -> DispatchRequest:
    ordered = tuple(c for c in CHANNEL_ORDER if c in channels)
    return DispatchRequest(
        request_id=next_request_id(),
        selection=selection,
        channels=ordered,
        created_t_ms=created_t_ms,
    )


def read_outbox(path: str | Path) -> list[dict]:
    """Parse the append-only outbox file into record dicts."""
    records = []
    p = Path(path)
    if not p.exists():
        return records
    with open(p, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records
