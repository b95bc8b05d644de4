"""``portal`` command line client.

Every subcommand is a thin client of the gateway surface: with
``--server`` it speaks HTTP to a running service, otherwise it loads a
bundle and calls the same gateway functions in process.  Exit codes:
0 success, 1 validation or evaluation error, 2 usage error (argparse's
own convention).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .bundle import export_bundle, load_bundle
from .errors import PortalError, PortUnavailable
from .repl import repl_eval


def _fail(exc: PortalError) -> int:
    print(f"error: {exc.code}: {exc.message}", file=sys.stderr)
    return 1


def _require(parser: argparse.ArgumentParser, condition: bool, message: str) -> None:
    if not condition:
        parser.error(message)  # exits with status 2


def cmd_load(args) -> int:
    engine = load_bundle(args.bundle)
    doc = export_bundle(engine)
    summary = {
        "bundle": str(args.bundle),
        "domains": len(doc["types"]["domains"]),
        "individuals": len(doc["individuals"]),
        "frames": len(doc["frames"]),
        "gvalues": len(doc["gvalues"]),
        "users": len(doc["users"]),
        "sources": len(doc["sources"]),
        "templates": len(doc["templates"]["instances"]),
        "navigation": len(doc["navigation"]),
    }
    print(json.dumps(summary, indent=2))
    return 0


def _http_session(client, user: str) -> str:
    response = client.post("/api/sessions", json={"user": user})
    if response.status_code != 200:
        raise PortalError(f"session open failed: {response.text}")
    return response.json()["session"]


def cmd_eval(args, parser) -> int:
    if args.server:
        import httpx

        _require(parser, bool(args.user), "--user is required with --server")
        with httpx.Client(base_url=args.server) as client:
            sid = _http_session(client, args.user)
            response = client.post(f"/api/eval?session={sid}", json={"expr": args.expr})
            client.delete(f"/api/sessions/{sid}")
            if response.status_code != 200:
                return _fail(PortalError(response.text))
            print(response.json()["result"])
            return 0
    _require(parser, bool(args.bundle), "--bundle is required without --server")
    engine = load_bundle(args.bundle)
    print(repl_eval(engine, args.expr))
    return 0


def cmd_render(args, parser) -> int:
    if args.server:
        import httpx

        with httpx.Client(base_url=args.server) as client:
            sid = _http_session(client, args.user)
            response = client.get(
                f"/api/pages/{args.nav_point}", params={"session": sid, "format": args.format}
            )
            client.delete(f"/api/sessions/{sid}")
            if response.status_code != 200:
                return _fail(PortalError(response.text))
            print(response.text)
            return 0
    _require(parser, bool(args.bundle), "--bundle is required without --server")
    engine = load_bundle(args.bundle)
    session = engine.open_session(args.user)
    page = engine.page_for(args.nav_point, session.id)
    print(engine.render_page(page, args.format))
    return 0


def cmd_stats(args, parser) -> int:
    if args.server:
        import httpx

        _require(parser, bool(args.user), "--user is required with --server")
        with httpx.Client(base_url=args.server) as client:
            sid = _http_session(client, args.user)
            response = client.get("/api/stats", params={"session": sid})
            client.delete(f"/api/sessions/{sid}")
            if response.status_code != 200:
                return _fail(PortalError(response.text))
            print(json.dumps(response.json(), indent=2))
            return 0
    _require(parser, bool(args.bundle), "--bundle is required without --server")
    engine = load_bundle(args.bundle)
    print(json.dumps(engine.stats_report(), indent=2))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    engine = load_bundle(args.bundle)
    app = create_app(engine)
    if args.ui:
        from starlette.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=args.ui, html=True), name="ui")
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except OSError as exc:
        return _fail(PortUnavailable(f"cannot bind port {args.port}: {exc}"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="portal", description="portal kernel client")
    sub = parser.add_subparsers(dest="command", required=True)

    p_load = sub.add_parser("load", help="validate a bundle and print a summary")
    p_load.add_argument("bundle")

    p_eval = sub.add_parser("eval", help="evaluate an assignment expression")
    p_eval.add_argument("expr")
    p_eval.add_argument("--bundle")
    p_eval.add_argument("--server", help="base URL of a running portal service")
    p_eval.add_argument("--user", help="user to open the server session as")

    p_render = sub.add_parser("render", help="render a page for a user")
    p_render.add_argument("nav_point")
    p_render.add_argument("--user", required=True)
    p_render.add_argument("--format", choices=("html", "structured"), default="structured")
    p_render.add_argument("--bundle")
    p_render.add_argument("--server")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--bundle", required=True)
    p_serve.add_argument("--ui", help="directory of built console files to mount at /ui")

    p_stats = sub.add_parser("stats", help="print the view statistics report")
    p_stats.add_argument("--bundle")
    p_stats.add_argument("--server")
    p_stats.add_argument("--user")

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "load":
            return cmd_load(args)
        if args.command == "eval":
            return cmd_eval(args, parser)
        if args.command == "render":
            return cmd_render(args, parser)
        if args.command == "stats":
            return cmd_stats(args, parser)
        if args.command == "serve":
            return cmd_serve(args)
    except PortalError as exc:
        return _fail(exc)
    return 2


if __name__ == "__main__":
    sys.exit(main())
