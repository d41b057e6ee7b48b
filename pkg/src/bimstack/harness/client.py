"""Thin JSON-RPC client for the MCP endpoint."""

from __future__ import annotations

import itertools

import requests


class HarnessError(Exception):
    pass


class McpClient:
    def __init__(self, base_url: str, http: requests.Session | None = None):
        self.url = base_url.rstrip("/")
        if not self.url.endswith("/mcp"):
            self.url += "/mcp"
        self.http = http or requests.Session()
        self._ids = itertools.count(1)

    def _rpc(self, method: str, params: dict | None = None):
        msg: dict = {"jsonrpc": "2.0", "id": next(self._ids), "method": method}
        if params is not None:
            msg["params"] = params
        try:
            resp = self.http.post(self.url, json=msg, timeout=120)
        except requests.RequestException as exc:
            raise HarnessError(f"MCP endpoint unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise HarnessError(f"MCP endpoint answered HTTP {resp.status_code}")
        reply = resp.json()
        if "error" in reply:
            err = reply["error"]
            raise HarnessError(f"JSON-RPC error {err['code']}: {err['message']}")
        return reply["result"]

    def initialize(self) -> dict:
        return self._rpc("initialize", {"clientInfo": {"name": "bimstack-harness"}})

    def tools_list(self) -> list[dict]:
        return self._rpc("tools/list")["tools"]

    def call(self, name: str, arguments: dict) -> dict:
        """Returns the tool result object (content, structuredContent, isError)."""
        return self._rpc("tools/call", {"name": name, "arguments": arguments})
