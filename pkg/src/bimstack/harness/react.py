"""Live agent mode: a ReAct loop over an OpenAI-style chat endpoint.

Needs a reachable chat-completion service (LLM_API_URL); nothing here runs
in the normal test suite beyond loop mechanics against a stub.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import requests

from ..wire import ModelRef
from .client import HarnessError, McpClient

DEFAULT_STEP_CAP = 40

_SYSTEM_PROMPT = (
    "You are a building-modelling agent. Solve the user's task by calling "
    "the available tools, one reasoning step at a time. Tool results arrive "
    "as compact JSON artifacts; read their status before continuing. When "
    "the task is complete, answer in plain text without calling a tool."
)


@dataclass
class ReactOutcome:
    tool_calls: int = 0
    ok_calls: int = 0
    tokens_total: int = 0
    mutated_refs: list[ModelRef] = field(default_factory=list)
    finished: bool = False  # False = step cap exceeded, run marked failed
    transcript: list = field(default_factory=list)


def _tool_defs(client: McpClient) -> list[dict]:
    defs = []
    for tool in client.tools_list():
        schema = {k: v for k, v in tool["inputSchema"].items() if k != "examples"}
        defs.append(
            {
                "type": "function",
                "function": {
                    "name": tool["name"],
                    "description": tool["description"],
                    "parameters": schema,
                },
            }
        )
    return defs


def react_loop(client: McpClient, case, session_id: str, config: dict) -> ReactOutcome:
    api_url = config.get("api_url") or os.environ.get("LLM_API_URL")
    if not api_url:
        raise HarnessError("llm agent needs LLM_API_URL (an OpenAI-style chat completions URL)")
    api_key = config.get("api_key") or os.environ.get("LLM_API_KEY", "")
    model = config.get("model") or os.environ.get("LLM_MODEL", "default")
    step_cap = int(config.get("step_cap") or os.environ.get("STEP_CAP", DEFAULT_STEP_CAP))
    http = requests.Session()
    headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}

    messages: list[dict] = [
        {"role": "system", "content": _SYSTEM_PROMPT},
        {"role": "user", "content": case.prompt},
    ]
    tools = _tool_defs(client)
    outcome = ReactOutcome(transcript=messages)

    for _ in range(step_cap):
        try:
            resp = http.post(
                api_url,
                json={"model": model, "messages": messages, "tools": tools, "tool_choice": "auto"},
                headers=headers,
                timeout=300,
            )
        except requests.RequestException as exc:
            raise HarnessError(f"chat endpoint unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise HarnessError(f"chat endpoint answered HTTP {resp.status_code}: {resp.text[:200]}")
        body = resp.json()
        usage = body.get("usage") or {}
        outcome.tokens_total += int(usage.get("total_tokens") or 0)
        message = body["choices"][0]["message"]
        messages.append(message)

        calls = message.get("tool_calls") or []
        if not calls:
            outcome.finished = True
            break
        for tc in calls:
            name = tc["function"]["name"]
            try:
                arguments = json.loads(tc["function"]["arguments"] or "{}")
            except ValueError:
                arguments = {}
            arguments["sessionId"] = session_id
            try:
                result = client.call(name, arguments)
            except HarnessError as exc:
                result = {"isError": True, "structuredContent": {"error": str(exc)}}
            outcome.tool_calls += 1
            if not result.get("isError"):
                outcome.ok_calls += 1
            chat = result.get("structuredContent") or {}
            if not result.get("isError") and chat.get("diffSummary") is not None and chat.get("fileRef"):
                outcome.mutated_refs.append(ModelRef.from_json(chat["fileRef"]))
            messages.append(
                {
                    "role": "tool",
                    "tool_call_id": tc.get("id", ""),
                    "content": json.dumps(chat)[:8000],
                }
            )
    return outcome
