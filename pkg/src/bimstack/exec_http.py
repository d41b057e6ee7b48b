"""Stateless model execution service.

Three endpoints, each a pure function of its request body: the service
holds no model state between calls. Input models arrive through presigned
GET URLs, results leave through presigned POST URLs; nothing touches the
local filesystem. An error response means nothing was uploaded.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from urllib.parse import parse_qs, unquote, urlsplit

import click
import requests

from .adapter import AdapterError, BimAdapter
from .httpd import Request, Response, Router, Service, json_error
from .ifc.check import schema_check
from .ifc.spf import SpfParseError, parse_spf
from .native import NativeAdapter
from .validation import validate_request
from .wire import Artifact, DiffRaw, Manifest, ModelRef, summarize_diff

DEFAULT_PORT = 8701


class _Failure(Exception):
    """Internal: aborts the request flow; becomes an error artifact."""


def params_digest(params: dict) -> str:
    canon = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _now_rfc3339() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def model_ref_from_url(url: str, version_id: str = "") -> ModelRef | None:
    """Recover the storage coordinates named by a presigned URL."""
    parts = urlsplit(url)
    segments = parts.path.split("/")
    if len(segments) < 4 or segments[1] != "bucket":
        return None
    bucket = unquote(segments[2])
    key = unquote("/".join(segments[3:]))
    pinned = parse_qs(parts.query).get("versionId", [""])[0]
    return ModelRef(bucket, key, pinned or version_id)


def _storage_cause(resp: requests.Response) -> str:
    try:
        return resp.json()["error"]
    except Exception:
        return f"HTTP {resp.status_code}"


class Executor:
    """Request handler; adapter and HTTP session are injected for tests."""

    def __init__(self, adapter: BimAdapter, session: requests.Session | None = None,
                 schema_gate: bool = True):
        self.adapter = adapter
        self.session = session or requests.Session()
        self.schema_gate = schema_gate

    # --- storage I/O ---------------------------------------------------

    def _download(self, url: str) -> tuple[bytes, ModelRef | None]:
        try:
            resp = self.session.get(url, timeout=60)
        except requests.RequestException as exc:
            raise _Failure(f"download failed: {exc}") from exc
        if resp.status_code != 200:
            raise _Failure(f"download failed: {_storage_cause(resp)}")
        ref = model_ref_from_url(url, resp.headers.get("X-Version-Id", ""))
        return resp.content, ref

    def _upload(self, url: str, data: bytes) -> ModelRef:
        try:
            resp = self.session.post(url, data=data, timeout=60)
        except requests.RequestException as exc:
            raise _Failure(f"upload failed: {exc}") from exc
        if resp.status_code != 200:
            raise _Failure(f"upload failed: {_storage_cause(resp)}")
        try:
            body = resp.json()
            return ModelRef(body["bucket"], body["key"], body["versionId"])
        except Exception as exc:
            raise _Failure("upload failed: malformed storage response") from exc

    # --- shared pieces ----------------------------------------------------

    def _load(self, data: bytes):
        try:
            return self.adapter.load_model(data)
        except AdapterError as exc:
            raise _Failure(f"parse failure: {exc}") from exc

    def _apply(self, tool_name: str, params: dict, handle):
        try:
            if tool_name == "run_batch":
                return self.adapter.run_batch(params.get("ops", []), handle)
            return self.adapter.run_high_level(tool_name, params, handle)
        except AdapterError as exc:
            raise _Failure(str(exc)) from exc

    def _gate(self, data: bytes) -> None:
        """Reject outputs that fail the structural model check."""
        if not self.schema_gate:
            return
        try:
            model = parse_spf(data.decode("utf-8"))
        except (SpfParseError, UnicodeDecodeError) as exc:
            raise _Failure(f"output failed model check: unreadable output: {exc}") from exc
        report = schema_check(model)
        if not report.passed:
            first = report.violations[0]
            raise _Failure(
                f"output failed model check: {first.code}: {first.message}"
            )

    def _manifest(self, operation: str, tool_name: str, params: dict,
                  input_ref: ModelRef | None) -> Manifest:
        return Manifest(
            created_at=_now_rfc3339(),
            operation=operation,
            tool_name=tool_name,
            backend_id=self.adapter.backend_id(),
            params_digest=params_digest(params),
            input_model=input_ref,
            capabilities=tuple(sorted(self.adapter.capabilities().items())),
        )

    # --- endpoints --------------------------------------------------------

    def handle_create(self, body: dict) -> Artifact:
        tool = body["toolName"]
        params = body.get("params", {})
        input_ref: ModelRef | None = None
        manifest = self._manifest("create", tool, params, None)
        try:
            if body.get("inputModel"):
                data, input_ref = self._download(body["inputModel"])
                manifest = self._manifest("create", tool, params, input_ref)
                old = self._load(data)
            else:
                old = self.adapter.new_model()
            new, logical = self._apply(tool, params, old)
            out_bytes = self.adapter.save_model(new)
            self._gate(out_bytes)
            diff = self.adapter.diff(old, new)
            out_ref = self._upload(body["outputTarget"], out_bytes)
        except _Failure as exc:
            return Artifact(status="error", manifest=manifest, error_message=str(exc))
        return Artifact(
            status="ok",
            manifest=manifest,
            file_ref=out_ref,
            logical_result=logical,
            diff_raw=DiffRaw(diff.entries, old_ref=input_ref, new_ref=out_ref),
            diff_summary=summarize_diff(diff),
        )

    def handle_modify(self, body: dict) -> Artifact:
        tool = body["toolName"]
        params = body.get("params", {})
        manifest = self._manifest("modify", tool, params, None)
        try:
            data, input_ref = self._download(body["inputModel"])
            manifest = self._manifest("modify", tool, params, input_ref)
            old = self._load(data)
            new, logical = self._apply(tool, params, old)
            out_bytes = self.adapter.save_model(new)
            self._gate(out_bytes)
            diff = self.adapter.diff(old, new)
            out_ref = self._upload(body["outputTarget"], out_bytes)
        except _Failure as exc:
            return Artifact(status="error", manifest=manifest, error_message=str(exc))
        return Artifact(
            status="ok",
            manifest=manifest,
            file_ref=out_ref,
            logical_result=logical,
            diff_raw=DiffRaw(diff.entries, old_ref=input_ref, new_ref=out_ref),
            diff_summary=summarize_diff(diff),
        )

    def handle_query(self, body: dict) -> Artifact:
        code_batch = body.get("codeBatch")
        tool = body.get("toolName") or "codeBatch"
        params = body.get("params", {})
        digest_src = {"ops": code_batch} if code_batch else params
        manifest = self._manifest("query", tool, digest_src, None)
        try:
            data, input_ref = self._download(body["inputModel"])
            manifest = self._manifest("query", tool, digest_src, input_ref)
            old = self._load(data)
            if code_batch:
                new, logical = self._apply("run_batch", {"ops": code_batch}, old)
            else:
                new, logical = self._apply(tool, params, old)
            diff = self.adapter.diff(old, new)
            if diff.entries:
                raise _Failure("query must not modify the model")
        except _Failure as exc:
            return Artifact(status="error", manifest=manifest, error_message=str(exc))
        return Artifact(
            status="ok",
            manifest=manifest,
            file_ref=input_ref,
            logical_result=logical,
            diff_raw=DiffRaw((), old_ref=input_ref, new_ref=input_ref) if code_batch else None,
        )


def build_router(executor: Executor) -> Router:
    router = Router()

    def endpoint(name: str, handler):
        def handle(req: Request, _m) -> Response:
            try:
                body = json.loads(req.body.decode("utf-8"))
            except (ValueError, UnicodeDecodeError):
                return json_error(400, "invalid JSON body")
            violations = validate_request(name, body)
            if violations:
                return Response(422, {"violations": [v.to_json() for v in violations]})
            return Response(200, handler(body).to_json())

        router.add("POST", f"/{name}", handle)

    endpoint("create", executor.handle_create)
    endpoint("modify", executor.handle_modify)
    endpoint("query", executor.handle_query)
    return router


def make_service(adapter: BimAdapter | None = None, port: int = 0,
                 session: requests.Session | None = None) -> Service:
    executor = Executor(adapter or NativeAdapter(), session=session)
    return Service(build_router(executor), port=port)


@click.command()
@click.option("--port", type=int, default=None, help="listen port (env EXEC_PORT)")
def main(port: int | None) -> None:
    """Run the model execution service."""
    if port is None:
        port = int(os.environ.get("EXEC_PORT", DEFAULT_PORT))
    service = make_service(port=port)
    click.echo(f"exec service on 127.0.0.1:{service.port}")
    service.serve_forever()


if __name__ == "__main__":
    main()
