"""Command line entry points: serve a live session, replay a log, bounce MIDI."""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from .config import ConfigError, load_config
from .replay import ReplayError, bounce_session, replay_to_lines
from .sessionlog import SessionLogError, write_output_log
from .server import SessionServer


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tubeplay",
        description="Seven-tube touch instrument engine.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run a live session on a socket")
    serve.add_argument("--config", help="config file (packaged default when omitted)")
    serve.add_argument("--port", type=int, help="TCP port (default from config)")
    serve.add_argument("--ws-port", type=int, help="WebSocket port (default: port+1, 0=off)")
    serve.add_argument("--seed", type=int, help="override the session seed")
    serve.add_argument("--headless", action="store_true", help="no status printout")
    serve.add_argument("--log-out", help="session log path (default: timestamped)")

    replay = sub.add_parser("replay", help="re-run a session log deterministically")
    replay.add_argument("--log", required=True, help="session log to replay")
    replay.add_argument("--out", required=True, help="file for the output frames")
    replay.add_argument("--config", help="config file (packaged default when omitted)")

    bounce = sub.add_parser("bounce", help="render a session log to a MIDI file")
    bounce.add_argument("--log", required=True, help="session log to render")
    bounce.add_argument("--midi", required=True, help="output .mid path")
    bounce.add_argument("--config", help="config file (packaged default when omitted)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "serve":
        server = SessionServer(
            config,
            port=args.port,
            seed=args.seed,
            headless=args.headless,
            ws_port=args.ws_port,
            log_path=args.log_out,
        )
        return server.run()

    if args.command == "replay":
        try:
            lines = replay_to_lines(args.log, config)
        except (ReplayError, SessionLogError, OSError) as exc:
            print(f"replay error: {exc}", file=sys.stderr)
            return 2
        write_output_log(args.out, lines)
        print(f"wrote {len(lines)} output frames to {args.out}")
        return 0

    if args.command == "bounce":
        try:
            count = bounce_session(args.log, config, args.midi)
        except (ReplayError, SessionLogError, OSError) as exc:
            print(f"bounce error: {exc}", file=sys.stderr)
            return 2
        print(f"wrote {count} notes to {args.midi}")
        return 0

    raise AssertionError("unreachable")


if __name__ == "__main__":
    raise SystemExit(main())
