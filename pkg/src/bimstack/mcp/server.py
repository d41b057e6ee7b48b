"""JSON-RPC endpoint at /mcp: initialize, tools/list, tools/call.

The server owns session bookkeeping and translation only. BIM calls turn
into execution-service requests over presigned storage URLs; the answer
comes back as a compact ChatArtifact in the tool result. Storage and
knowledge tools are answered locally. No model is ever parsed or edited
here.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from urllib.parse import quote

import click
import requests

from ..exec_http import params_digest
from ..httpd import Request, Response, Router, Service
from ..validation import validate_instance
from ..wire import (
    DEFAULT_CHAT_BUDGET,
    Artifact,
    ChatArtifact,
    Manifest,
    ModelRef,
    summary_line_for,
    to_chat_artifact,
)
from .catalog import CATALOG, ToolDescriptor, descriptor_for
from .knowledge import lookup_docs

DEFAULT_PORT = 8703
PROTOCOL_VERSION = "2025-03-26"

PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602

_MUTATING = ("create", "modify")


@dataclass
class SessionState:
    session_id: str
    created_at: str
    current_model: ModelRef | None = None
    history: list[ChatArtifact] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


class _StorageFailure(Exception):
    pass


def _rpc_error(msg_id, code: int, message: str, data=None) -> dict:
    err: dict = {"code": code, "message": message}
    if data is not None:
        err["data"] = data
    return {"jsonrpc": "2.0", "id": msg_id, "error": err}


def _rpc_result(msg_id, result) -> dict:
    return {"jsonrpc": "2.0", "id": msg_id, "result": result}


def _tool_result(text: str, structured, is_error: bool = False) -> dict:
    return {
        "content": [{"type": "text", "text": text}],
        "structuredContent": structured,
        "isError": is_error,
    }


class McpServer:
    def __init__(
        self,
        exec_url: str,
        store_url: str,
        chat_budget: int = DEFAULT_CHAT_BUDGET,
        http: requests.Session | None = None,
    ):
        self.exec_url = exec_url.rstrip("/")
        self.store_url = store_url.rstrip("/")
        self.chat_budget = chat_budget
        self.http = http or requests.Session()
        self._sessions: dict[str, SessionState] = {}
        self._lock = threading.Lock()

    # --- sessions -----------------------------------------------------------

    def session(self, session_id: str) -> SessionState:
        with self._lock:
            state = self._sessions.get(session_id)
            if state is None:
                state = SessionState(
                    session_id=session_id,
                    created_at=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                )
                self._sessions[session_id] = state
            return state

    def _session_key(self, session_id: str) -> str:
        return f"sessions/{session_id}/model.ifc"

    # --- JSON-RPC framing -----------------------------------------------------

    def handle_raw(self, raw: bytes):
        """Raw POST body -> JSON-RPC response object, list, or None."""
        try:
            body = json.loads(raw.decode("utf-8"))
        except (ValueError, UnicodeDecodeError):
            return _rpc_error(None, PARSE_ERROR, "parse error")
        if isinstance(body, list):
            if not body:
                return _rpc_error(None, INVALID_REQUEST, "empty batch")
            replies = [r for r in (self._process(m) for m in body) if r is not None]
            return replies or None
        return self._process(body)

    def _process(self, msg) -> dict | None:
        if not isinstance(msg, dict):
            return _rpc_error(None, INVALID_REQUEST, "request must be an object")
        msg_id = msg.get("id")
        is_request = "id" in msg
        if msg.get("jsonrpc") != "2.0" or not isinstance(msg.get("method"), str):
            return _rpc_error(msg_id if is_request else None, INVALID_REQUEST, "invalid request")
        method = msg["method"]
        params = msg.get("params")
        if params is not None and not isinstance(params, (dict, list)):
            return _rpc_error(msg_id if is_request else None, INVALID_REQUEST, "params must be structured")

        if method == "initialize":
            result = self._initialize()
        elif method == "tools/list":
            result = {"tools": [d.to_json() for d in CATALOG]}
        elif method == "tools/call":
            outcome = self._tools_call(params if isinstance(params, dict) else {})
            if isinstance(outcome, tuple):  # (code, message, data)
                if not is_request:
                    return None
                return _rpc_error(msg_id, *outcome)
            result = outcome
        elif method.startswith("notifications/"):
            return None
        else:
            if not is_request:
                return None  # errors are never reported for notifications
            return _rpc_error(msg_id, METHOD_NOT_FOUND, f"method not found: {method}")

        return _rpc_result(msg_id, result) if is_request else None

    def _initialize(self) -> dict:
        try:
            from importlib.metadata import version

            ver = version("bimstack")
        except Exception:
            ver = "0.0.0"
        return {
            "protocolVersion": PROTOCOL_VERSION,
            "capabilities": {"tools": {"listChanged": False}},
            "serverInfo": {"name": "bimstack-mcp", "version": ver},
        }

    # --- tools/call dispatch ---------------------------------------------------

    def _tools_call(self, params: dict):
        name = params.get("name")
        if not isinstance(name, str):
            return (INVALID_PARAMS, "tool name required", None)
        desc = descriptor_for(name)
        if desc is None:
            return (INVALID_PARAMS, f"unknown tool: {name}", None)
        arguments = params.get("arguments", {})
        if not isinstance(arguments, dict):
            return (INVALID_PARAMS, "arguments must be an object", None)
        violations = validate_instance(desc.input_schema, arguments)
        if violations:
            return (
                INVALID_PARAMS,
                f"invalid arguments for {name}",
                {"violations": [v.to_json() for v in violations]},
            )
        session_id = arguments.get("sessionId", "default")
        args = {k: v for k, v in arguments.items() if k != "sessionId"}
        state = self.session(session_id)
        with state.lock:
            if desc.category in ("bim_high", "bim_low"):
                return self._call_bim(state, desc, args)
            if desc.category == "storage":
                return self._call_storage(state, name, args)
            return self._call_knowledge(args)

    # --- storage plumbing -------------------------------------------------------

    def _presign(self, method: str, key: str, version_id: str | None = None) -> str:
        body: dict = {"method": method, "bucket": "models", "key": key, "ttlSec": 600}
        if version_id:
            body["versionId"] = version_id
        try:
            resp = self.http.post(f"{self.store_url}/bucket/presign", json=body, timeout=30)
        except requests.RequestException as exc:
            raise _StorageFailure(f"storage unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise _StorageFailure(f"presign failed: {_cause(resp)}")
        return self.store_url + resp.json()["url"]

    # --- BIM tools ---------------------------------------------------------------

    def _call_bim(self, state: SessionState, desc: ToolDescriptor, args: dict):
        name = desc.name
        if name == "create_project":
            endpoint, needs_input, writes = "create", False, True
        elif name in ("query_elements", "spatial_tree"):
            endpoint, needs_input, writes = "query", True, False
        else:
            endpoint, needs_input, writes = "modify", True, True

        operation = endpoint
        if needs_input and state.current_model is None:
            chat = self._local_error(
                state,
                operation,
                name,
                args,
                "no current model in this session; create_project starts one",
            )
            return _tool_result(chat.summary_line, chat.to_json(), True)

        if name == "run_batch":
            tool_name, params = "run_batch", {"ops": args["ops"]}
        else:
            tool_name, params = name, args

        body: dict = {"toolName": tool_name, "params": params}
        try:
            if needs_input:
                cur = state.current_model
                body["inputModel"] = self._presign("GET", cur.key, cur.version_id)
            if writes:
                body["outputTarget"] = self._presign("POST", self._session_key(state.session_id))
        except _StorageFailure as exc:
            chat = self._local_error(state, operation, name, args, str(exc))
            return _tool_result(chat.summary_line, chat.to_json(), True)

        try:
            resp = self.http.post(f"{self.exec_url}/{endpoint}", json=body, timeout=120)
        except requests.RequestException as exc:
            chat = self._local_error(
                state, operation, name, args, f"execution service unreachable: {exc}"
            )
            return _tool_result(chat.summary_line, chat.to_json(), True)
        if resp.status_code != 200:
            chat = self._local_error(
                state, operation, name, args, f"execution service rejected the request: {_cause(resp)}"
            )
            return _tool_result(chat.summary_line, chat.to_json(), True)

        artifact = Artifact.from_json(resp.json())
        chat = to_chat_artifact(artifact, self.chat_budget)
        state.history.append(chat)
        if artifact.status == "ok" and artifact.manifest.operation in _MUTATING:
            state.current_model = artifact.file_ref
        return _tool_result(chat.summary_line, chat.to_json(), artifact.status == "error")

    def _local_error(self, state: SessionState, operation: str, tool: str, params: dict, message: str) -> ChatArtifact:
        """Failure before/without the executor, shaped like any other result."""
        artifact = Artifact(
            status="error",
            manifest=Manifest(
                created_at=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                operation=operation,
                tool_name=tool,
                backend_id="unavailable",
                params_digest=params_digest(params),
            ),
            error_message=message,
        )
        chat = to_chat_artifact(artifact, self.chat_budget)
        state.history.append(chat)
        return chat

    # --- storage tools --------------------------------------------------------------

    def _call_storage(self, state: SessionState, name: str, args: dict):
        try:
            if name == "upload_model":
                return self._upload_model(state, args)
            if name == "download_model":
                return self._download_model(state, args)
            return self._list_versions(state, args)
        except _StorageFailure as exc:
            return _tool_result(str(exc), {"error": str(exc)}, True)

    def _require_key(self, state: SessionState, args: dict) -> tuple[str, str | None]:
        if args.get("key"):
            return args["key"], args.get("versionId")
        if state.current_model is None:
            raise _StorageFailure("no key given and the session has no current model")
        cur = state.current_model
        return cur.key, args.get("versionId") or cur.version_id

    def _upload_model(self, state: SessionState, args: dict):
        key = args.get("key") or f"sessions/{state.session_id}/uploads/model.ifc"
        url = self._presign("POST", key)
        try:
            resp = self.http.post(url, data=args["modelText"].encode("utf-8"), timeout=120)
        except requests.RequestException as exc:
            raise _StorageFailure(f"storage unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise _StorageFailure(f"upload failed: {_cause(resp)}")
        version = resp.json()
        line = f"stored models/{key}@{version['versionId']} ({version['size']} bytes)"
        return _tool_result(line, version)

    def _download_model(self, state: SessionState, args: dict):
        key, version_id = self._require_key(state, args)
        url = self._presign("GET", key, version_id)
        try:
            resp = self.http.get(url, timeout=120)
        except requests.RequestException as exc:
            raise _StorageFailure(f"storage unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise _StorageFailure(f"download failed: {_cause(resp)}")
        text = resp.content.decode("utf-8", errors="replace")
        served = resp.headers.get("X-Version-Id", version_id or "")
        payload = {
            "bucket": "models",
            "key": key,
            "versionId": served,
            "size": len(resp.content),
            "text": text[: self.chat_budget],
            "textTruncated": len(text) > self.chat_budget,
        }
        return _tool_result(f"models/{key}@{served} ({len(resp.content)} bytes)", payload)

    def _list_versions(self, state: SessionState, args: dict):
        key, _ = self._require_key(state, args)
        try:
            resp = self.http.get(
                f"{self.store_url}/bucket/models/{quote(key, safe='/')}/versions", timeout=30
            )
        except requests.RequestException as exc:
            raise _StorageFailure(f"storage unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise _StorageFailure(f"listing failed: {_cause(resp)}")
        payload = resp.json()
        line = f"{len(payload['versions'])} version(s) of models/{key}"
        return _tool_result(line, payload)

    # --- knowledge tool ----------------------------------------------------------------

    def _call_knowledge(self, args: dict):
        results = lookup_docs(args["query"], args.get("k", 3))
        line = ", ".join(r["id"] for r in results) or "no matching docs"
        return _tool_result(line, {"results": results})


def _cause(resp: requests.Response) -> str:
    try:
        body = resp.json()
        if "error" in body:
            return body["error"]
        if "violations" in body:
            return "; ".join(v["path"] + ": " + v["message"] for v in body["violations"])
    except Exception:
        pass
    return f"HTTP {resp.status_code}"


def build_router(server: McpServer) -> Router:
    router = Router()

    def handle(req: Request, _m) -> Response:
        reply = server.handle_raw(req.body)
        if reply is None:
            return Response(202, b"", content_type="application/json")
        if "text/event-stream" in req.headers.get("accept", ""):
            frame = b"event: message\ndata: " + json.dumps(reply).encode("utf-8") + b"\n\n"
            return Response(200, frame, content_type="text/event-stream")
        return Response(200, reply)

    router.add("POST", "/mcp", handle)
    return router


def make_service(server: McpServer, port: int = 0) -> Service:
    return Service(build_router(server), port=port)


@click.command()
@click.option("--port", type=int, default=None, help="listen port (env MCP_PORT)")
@click.option("--exec-url", default=None, help="execution service base URL (env EXEC_URL)")
@click.option("--store-url", default=None, help="object store base URL (env STORE_URL)")
def main(port: int | None, exec_url: str | None, store_url: str | None) -> None:
    """Run the MCP endpoint."""
    if port is None:
        port = int(os.environ.get("MCP_PORT", DEFAULT_PORT))
    exec_url = exec_url or os.environ.get("EXEC_URL", "http://127.0.0.1:8701")
    store_url = store_url or os.environ.get("STORE_URL", "http://127.0.0.1:8702")
    budget = int(os.environ.get("CHAT_BUDGET", DEFAULT_CHAT_BUDGET))
    server = McpServer(exec_url, store_url, chat_budget=budget)
    service = make_service(server, port=port)
    click.echo(f"mcp endpoint on 127.0.0.1:{service.port}/mcp")
    service.serve_forever()


if __name__ == "__main__":
    main()
