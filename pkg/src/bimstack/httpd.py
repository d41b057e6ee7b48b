"""Minimal threaded HTTP layer shared by the three services.

A Router maps (method, path regex) to handlers over a plain
ThreadingHTTPServer. Handlers get a parsed Request and return a Response;
dicts serialize as JSON, bytes pass through as octet-stream.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, unquote, urlsplit


@dataclass
class Request:
    method: str
    path: str  # percent-decoded, no query string
    query: dict[str, str]  # first value wins
    headers: dict[str, str]
    body: bytes


@dataclass
class Response:
    status: int = 200
    body: object = b""  # bytes, or anything json.dumps accepts
    content_type: str | None = None
    headers: dict[str, str] | None = None

    def encode(self) -> tuple[int, str, bytes]:
        if isinstance(self.body, (bytes, bytearray)):
            return self.status, self.content_type or "application/octet-stream", bytes(self.body)
        payload = json.dumps(self.body).encode("utf-8")
        return self.status, self.content_type or "application/json", payload


def json_error(status: int, message: str) -> Response:
    return Response(status, {"error": message})


@dataclass
class Router:
    routes: list[tuple[str, re.Pattern, object]] = field(default_factory=list)

    def add(self, method: str, pattern: str, handler) -> None:
        self.routes.append((method.upper(), re.compile(pattern), handler))

    def dispatch(self, req: Request) -> Response:
        seen_path = False
        for method, pattern, handler in self.routes:
            m = pattern.fullmatch(req.path)
            if m is None:
                continue
            seen_path = True
            if method != req.method:
                continue
            return handler(req, m)
        if seen_path:
            return json_error(405, "method not allowed")
        return json_error(404, "no such path")


def _make_handler(router: Router):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        def _serve(self):
            length = int(self.headers.get("Content-Length") or 0)
            body = self.rfile.read(length) if length else b""
            split = urlsplit(self.path)
            query = {k: v[0] for k, v in parse_qs(split.query, keep_blank_values=True).items()}
            req = Request(
                method=self.command,
                path=unquote(split.path),
                query=query,
                headers={k.lower(): v for k, v in self.headers.items()},
                body=body,
            )
            try:
                resp = router.dispatch(req)
            except Exception as exc:  # noqa: BLE001 - service must answer, not die
                resp = json_error(500, f"internal error: {exc}")
            status, ctype, payload = resp.encode()
            self.send_response(status)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(payload)))
            for name, value in (resp.headers or {}).items():
                self.send_header(name, value)
            self.end_headers()
            self.wfile.write(payload)

        do_GET = do_POST = do_PUT = do_DELETE = _serve

    return Handler


class Service:
    """A router bound to a listening socket, startable in-thread or blocking."""

    def __init__(self, router: Router, port: int = 0, host: str = "127.0.0.1"):
        self.server = ThreadingHTTPServer((host, port), _make_handler(router))
        self.port = self.server.server_address[1]
        self._thread: threading.Thread | None = None

    def start_background(self) -> "Service":
        self._thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        self.server.serve_forever()

    def stop(self) -> None:
        self.server.shutdown()
        self.server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
