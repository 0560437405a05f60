"""Command line client.

All subcommands go through the HTTP service: by default an in-process
instance (no network, fully deterministic), or a remote one when --server
is given.
"""

from __future__ import annotations

import argparse
import asyncio
import sys
from pathlib import Path

import httpx


class _InProcessTransport(httpx.BaseTransport):
    """Synchronous bridge to an ASGI app, one event loop per request."""

    def __init__(self, app: object) -> None:
        self._transport = httpx.ASGITransport(app=app)

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        async def call() -> httpx.Response:
            response = await self._transport.handle_async_request(request)
            body = await response.aread()
            return httpx.Response(response.status_code, headers=response.headers, content=body)

        return asyncio.run(call())


def _client(server: str | None) -> httpx.Client:
    if server is None:
        # run the service in-process; same code path as a remote server
        from .service import create_app

        return httpx.Client(
            transport=_InProcessTransport(create_app()),
            base_url="http://multitime-qsim.local",
        )
    return httpx.Client(base_url=server)


def _read_source(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _cmd_run(args: argparse.Namespace) -> int:
    payload: dict[str, object] = {"text": _read_source(args.file), "engine": args.engine}
    if args.tolerance is not None:
        payload["tolerance"] = args.tolerance
    with _client(args.server) as client:
        response = client.post("/v1/run", json=payload)
        response.raise_for_status()
        data = response.json()
    for diagnostic in data["diagnostics"]:
        print(
            f"{diagnostic['line']}:{diagnostic['col']}: "
            f"{diagnostic['code']}: {diagnostic['message']}",
            file=sys.stderr,
        )
    if data["error"]:
        print(data["error"], file=sys.stderr)
    if data["report"]:
        sys.stdout.write(data["report"])
    return int(data["exit_code"])


def _cmd_parse(args: argparse.Namespace) -> int:
    with _client(args.server) as client:
        response = client.post("/v1/parse", json={"text": _read_source(args.file)})
        response.raise_for_status()
        data = response.json()
    for diagnostic in data["diagnostics"]:
        print(
            f"{diagnostic['line']}:{diagnostic['col']}: "
            f"{diagnostic['code']}: {diagnostic['message']}",
            file=sys.stderr,
        )
    if data["valid"]:
        print(f"ok: {data['statements']} statements")
        return 0
    return 1


def _cmd_corpus_generate(args: argparse.Namespace) -> int:
    payload = {"count": args.count, "max_dim": args.max_dim, "seed": args.seed}
    with _client(args.server) as client:
        response = client.post("/v1/corpus/generate", json=payload)
        response.raise_for_status()
        documents = response.json()["documents"]
    if args.out is not None:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for i, text in enumerate(documents):
            target = out_dir / f"corpus_{i:03d}.mtq"
            target.write_text(text, encoding="utf-8")
            print(target)
        return 0
    for i, text in enumerate(documents):
        print(f"# --- document {i} ---")
        sys.stdout.write(text)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("multitime_qsim.service:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multitime-qsim",
        description="simulate experiments on quantum states occupying multiple times",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a script and print the outcome report")
    run_p.add_argument("file", help="script path, or - for stdin")
    run_p.add_argument(
        "--engine",
        choices=["multitime", "oracle", "both"],
        default="multitime",
        help="contraction engine, sequential engine, or cross-check the two",
    )
    run_p.add_argument(
        "--tolerance",
        type=float,
        default=None,
        help="probability agreement tolerance for --engine both",
    )
    run_p.add_argument("--server", default=None, help="base URL of a running service")
    run_p.set_defaults(handler=_cmd_run)

    parse_p = sub.add_parser("parse", help="validate a script without running it")
    parse_p.add_argument("file", help="script path, or - for stdin")
    parse_p.add_argument("--server", default=None, help="base URL of a running service")
    parse_p.set_defaults(handler=_cmd_parse)

    corpus_p = sub.add_parser("corpus", help="randomized test corpus")
    corpus_sub = corpus_p.add_subparsers(dest="corpus_command", required=True)
    gen = corpus_sub.add_parser("generate", help="emit deterministic example scripts")
    gen.add_argument("--count", type=int, default=10)
    gen.add_argument("--max-dim", type=int, default=4)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=None, help="directory to write one .mtq file per script")
    gen.add_argument("--server", default=None, help="base URL of a running service")
    gen.set_defaults(handler=_cmd_corpus_generate)

    serve_p = sub.add_parser("serve", help="start the HTTP service")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.set_defaults(handler=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    raise SystemExit(main())
