"""Command line entry points: generate, replay, serve, bench."""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from dataclasses import replace
from pathlib import Path

from .bench import bench
from .dispatch import ChannelConfig, Dispatcher
from .model import Channel, SessionConfig, session_config_from_dict
from .server import run_forever
from .session import SessionEngine
from .traceio import Pace, generate, load_script, read_trace, replay, write_trace

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def channel_config_from_dict(data: dict) -> ChannelConfig:
    kwargs: dict = {}
    for key, value in data.items():
        if key == "enabled":
            kwargs[key] = frozenset(Channel(c) for c in value)
        elif key in ("message_store_dir", "voice_dir", "outbox_path"):
            kwargs[key] = Path(value)
        else:
            kwargs[key] = value
    return ChannelConfig(**kwargs)


def load_configs(path: str | None) -> tuple[SessionConfig, ChannelConfig]:
    """Config file = SessionConfig fields plus an optional "dispatch" section."""
    if path is None:
        return SessionConfig(), ChannelConfig()
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    dispatch_data = data.pop("dispatch", {})
    return session_config_from_dict(data), channel_config_from_dict(dispatch_data)


def _require_file(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        print(f"error: no such file: {path}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    return p


def _cmd_generate(args) -> int:
    script = load_script(_require_file(args.script))
    config, _ = load_configs(args.config)
    frames = generate(script, config.camera, seed=args.seed, noise_px=args.noise)
    count = write_trace(frames, args.output)
    print(f"wrote {count} frames to {args.output}")
    return EXIT_OK


def _cmd_replay(args) -> int:
    config, channel_config = load_configs(args.config)
    if args.outbox:
        channel_config = replace(channel_config, outbox_path=Path(args.outbox))
    records = read_trace(_require_file(args.trace), config.camera)
    dispatcher = Dispatcher(channel_config, config.labels)
    engine = SessionEngine(config, dispatcher)

    def sink(frame):
        for event in engine.process_frame(frame):
            if event["type"] in ("selection_out", "dispatch_out", "error_out"):
                print(json.dumps(event))

    summary = replay(records, sink,
                     pace=Pace.REALTIME if args.realtime else Pace.MAX_SPEED)
    dispatcher.close()
    print(f"replayed {summary.frames} frames in {summary.wall_s:.3f}s, "
          f"{engine.counters.selections} selections, "
          f"outbox: {channel_config.outbox_path}")
    if summary.aborted:
        print(f"error: replay aborted: {summary.error}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _cmd_serve(args) -> int:
    config, channel_config = load_configs(args.config)
    host, _, port = args.listen.rpartition(":")
    try:
        asyncio.run(run_forever(config, channel_config, host or "127.0.0.1", int(port)))
    except KeyboardInterrupt:
        pass
    except OSError as exc:
        print(f"error: cannot bind {args.listen}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _cmd_bench(args) -> int:
    config, channel_config = load_configs(args.config)
    records = read_trace(_require_file(args.trace), config.camera)
    dispatcher = Dispatcher(channel_config, config.labels)
    report = bench(records, config, dispatcher, repeats=args.repeats)
    dispatcher.close()
    for line in report.lines():
        print(line)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gesturecall",
        description="Gesture-call engine: trace replay, generation, live service, benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="render a gesture script into a trace file")
    p.add_argument("script")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0, help="uniform pixel noise amplitude")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("replay", help="run a trace through the session pipeline")
    p.add_argument("trace")
    p.add_argument("--config")
    p.add_argument("--outbox")
    p.add_argument("--realtime", action="store_true", help="pace frames by their timestamps")
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("serve", help="serve live sessions over the wire protocol")
    p.add_argument("--listen", default="127.0.0.1:8765")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("bench", help="report per-frame processing statistics")
    p.add_argument("trace")
    p.add_argument("--config")
    p.add_argument("--repeats", type=int, default=3)
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
