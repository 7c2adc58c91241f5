import threading
import time
from dataclasses import replace
from pathlib import Path

import pytest

from gesturecall.dispatch import (
    ChannelConfig,
    Dispatcher,
    DispatchMode,
    OutboxRecord,
    RenderError,
    deliver,
    ensure_message_store,
    new_request,
    provision_voice_dir,
    read_outbox,
    render_message,
)
from gesturecall.grid import OptionGrid, make_selection
from gesturecall.model import CHANNEL_ORDER, DEFAULT_LABELS, Channel
from helpers import WebhookStub

GRID = OptionGrid()


def sandbox_config(tmp_path, **overrides) -> ChannelConfig:
    base = ChannelConfig(
        message_store_dir=tmp_path / "store",
        voice_dir=tmp_path / "voice",
        outbox_path=tmp_path / "outbox.jsonl",
    )
    return replace(base, **overrides) if overrides else base


def selection(label="Nurse"):
    return make_selection(GRID, DEFAULT_LABELS.index(label), t_ms=500.0, frame_index=15)


def test_render_sms_text(tmp_path):
    config = sandbox_config(tmp_path)
    assert render_message(selection("Nurse"), Channel.SMS, config) == "Patient requests: Nurse"
    assert render_message(selection("Water"), Channel.EMAIL, config) == "Patient requests: Water"


def test_render_phone_references_per_option_xml(tmp_path):
    config = sandbox_config(tmp_path)
    ensure_message_store(config, DEFAULT_LABELS)
    payload = render_message(selection("Emergency"), Channel.PHONE, config)
    assert payload.endswith("Emergency.xml")
    text = Path(payload).read_text(encoding="utf-8")
    assert text == "<Response><Say>Patient requests: Emergency</Say></Response>"


def test_message_store_created_for_every_label(tmp_path):
    config = sandbox_config(tmp_path)
    ensure_message_store(config, DEFAULT_LABELS)
    names = {p.name for p in config.message_store_dir.iterdir()}
    assert names == {f"{label}.xml" for label in DEFAULT_LABELS}


def test_render_voice_missing_audio(tmp_path):
    config = sandbox_config(tmp_path)
    config.voice_dir.mkdir()
    with pytest.raises(RenderError, match="missing audio"):
        render_message(selection("Water"), Channel.VOICE, config)


def test_render_voice_with_provisioned_folder(tmp_path):
    config = sandbox_config(tmp_path)
    provision_voice_dir(config, DEFAULT_LABELS)
    payload = render_message(selection("Water"), Channel.VOICE, config)
    assert payload.endswith("Water.wav")


def test_sandbox_delivery_always_sends(tmp_path):
    config = sandbox_config(tmp_path)
    record = OutboxRecord("r1", "q1", "email", "Doctor", "Patient requests: Doctor",
                          "queued", 0, 0.0)
    delivered = deliver(record, config)
    assert delivered.status == "sent"
    assert delivered.attempts == 1


def test_deliver_rejects_non_queued(tmp_path):
    record = OutboxRecord("r1", "q1", "email", "Doctor", "x", "sent", 1, 0.0)
    with pytest.raises(ValueError):
        deliver(record, sandbox_config(tmp_path))


def test_webhook_retries_then_succeeds(tmp_path):
    stub = WebhookStub(responses=[500, 500, 200])
    config = sandbox_config(tmp_path, mode=DispatchMode.WEBHOOK,
                            webhook_base=stub.url, backoff_s=0.01)
    record = OutboxRecord("r1", "q1", "sms", "Nurse", "Patient requests: Nurse",
                          "queued", 0, 0.0)
    delivered = deliver(record, config)
    stub.close()
    assert delivered.status == "sent"
    assert delivered.attempts == 3
    assert [path for path, _ in stub.requests] == ["/sms"] * 3


def test_webhook_unreachable_fails_after_retries(tmp_path):
    config = sandbox_config(tmp_path, mode=DispatchMode.WEBHOOK,
                            webhook_base="http://127.0.0.1:1", backoff_s=0.01,
                            retry_limit=2)
    record = OutboxRecord("r1", "q1", "sms", "Nurse", "x", "queued", 0, 0.0)
    delivered = deliver(record, config)
    assert delivered.status == "failed"
    assert delivered.reason == "connect"
    assert delivered.attempts == 3


def test_fan_out_one_record_per_channel(tmp_path):
    config = sandbox_config(tmp_path)
    dispatcher = Dispatcher(config, DEFAULT_LABELS)
    provision_voice_dir(config, DEFAULT_LABELS)
    request = new_request(selection("Doctor"), set(Channel), created_t_ms=100.0)
    assert dispatcher.enqueue(request)
    assert dispatcher.drain()
    dispatcher.close()
    records = read_outbox(config.outbox_path)
    assert len(records) == 4
    assert [r["channel"] for r in records] == [c.value for c in CHANNEL_ORDER]
    assert all(r["status"] == "sent" for r in records)
    assert len({r["id"] for r in records}) == 4


def test_fifo_preserved_per_channel(tmp_path):
    config = sandbox_config(tmp_path)
    dispatcher = Dispatcher(config, DEFAULT_LABELS)
    for label in ("Doctor", "Nurse", "Water"):
        dispatcher.enqueue(new_request(selection(label), {Channel.SMS, Channel.EMAIL}, 0.0))
    dispatcher.drain()
    dispatcher.close()
    records = read_outbox(config.outbox_path)
    sms_labels = [r["label"] for r in records if r["channel"] == "sms"]
    email_labels = [r["label"] for r in records if r["channel"] == "email"]
    assert sms_labels == ["Doctor", "Nurse", "Water"]
    assert email_labels == ["Doctor", "Nurse", "Water"]


def test_voice_without_audio_records_failure(tmp_path):
    config = sandbox_config(tmp_path)
    dispatcher = Dispatcher(config, DEFAULT_LABELS)
    dispatcher.enqueue(new_request(selection("Water"), {Channel.VOICE}, 0.0))
    dispatcher.drain()
    dispatcher.close()
    records = read_outbox(config.outbox_path)
    assert records[0]["status"] == "failed"
    assert records[0]["reason"] == "missing audio"


def test_queue_full_rejects_instead_of_blocking(tmp_path):
    hold = threading.Event()
    stub = WebhookStub(hold_event=hold)
    config = sandbox_config(tmp_path, mode=DispatchMode.WEBHOOK,
                            webhook_base=stub.url, queue_capacity=4, retry_limit=0)
    dispatcher = Dispatcher(config, DEFAULT_LABELS)
    # First request occupies the worker (blocked on the held webhook).
    assert dispatcher.enqueue(new_request(selection("Doctor"), {Channel.SMS}, 0.0))
    deadline = time.monotonic() + 2.0
    while len(dispatcher._queue) > 0 and time.monotonic() < deadline:
        time.sleep(0.005)
    accepted = [dispatcher.enqueue(new_request(selection("Nurse"), {Channel.SMS}, 0.0))
                for _ in range(5)]
    assert accepted == [True, True, True, True, False]
    hold.set()
    dispatcher.drain()
    dispatcher.close()
    stub.close()


def test_enqueue_returns_in_bounded_time(tmp_path):
    hold = threading.Event()
    stub = WebhookStub(hold_event=hold)
    config = sandbox_config(tmp_path, mode=DispatchMode.WEBHOOK,
                            webhook_base=stub.url, retry_limit=0)
    dispatcher = Dispatcher(config, DEFAULT_LABELS)
    dispatcher.enqueue(new_request(selection("Doctor"), {Channel.SMS}, 0.0))
    time.sleep(0.05)  # let the worker block on the held POST
    t0 = time.perf_counter()
    dispatcher.enqueue(new_request(selection("Nurse"), {Channel.SMS}, 0.0))
    elapsed_ms = (time.perf_counter() - t0) * 1000
    hold.set()
    dispatcher.drain()
    dispatcher.close()
    stub.close()
    assert elapsed_ms < 1.0


def test_outbox_is_append_only(tmp_path):
    config = sandbox_config(tmp_path)
    dispatcher = Dispatcher(config, DEFAULT_LABELS)
    dispatcher.enqueue(new_request(selection("Doctor"), {Channel.SMS}, 0.0))
    dispatcher.drain()
    first = config.outbox_path.read_text(encoding="utf-8")
    dispatcher.enqueue(new_request(selection("Nurse"), {Channel.SMS}, 0.0))
    dispatcher.drain()
    dispatcher.close()
    second = config.outbox_path.read_text(encoding="utf-8")
    assert second.startswith(first)
    assert len(second.splitlines()) == 2


def test_webhook_mode_requires_base_url():
    with pytest.raises(ValueError):
        ChannelConfig(mode=DispatchMode.WEBHOOK)


def test_replaying_a_trace_twice_differs_only_in_ids(tmp_path):
    from gesturecall.model import HandPreference, SessionConfig
    from gesturecall.session import SessionEngine
    from gesturecall.traceio import read_trace
    from dataclasses import replace as dc_replace

    records = read_trace(Path(__file__).parent.parent / "traces" / "fig3.trace.jsonl")
    cfg = dc_replace(SessionConfig(), hand_preference=HandPreference.AUTO_NEARNESS,
                     channels=frozenset({Channel.SMS, Channel.PHONE}))

    def run(outbox_name):
        config = sandbox_config(tmp_path, outbox_path=tmp_path / outbox_name)
        dispatcher = Dispatcher(config, cfg.labels)
        engine = SessionEngine(cfg, dispatcher)
        for record in records:
            engine.process_frame(record)
        dispatcher.drain()
        dispatcher.close()
        return read_outbox(config.outbox_path)

    first = run("outbox-a.jsonl")
    second = run("outbox-b.jsonl")
    stable = ("channel", "label", "payload", "status", "attempts", "t_ms")
    assert [{k: r[k] for k in stable} for r in first] == \
        [{k: r[k] for k in stable} for r in second]
    assert {r["id"] for r in first}.isdisjoint({r["id"] for r in second})
