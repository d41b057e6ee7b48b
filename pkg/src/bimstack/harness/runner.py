"""Case loading, rule checking, and the repetition runner."""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from urllib.parse import quote

import requests

from ..generate import json_to_value
from ..ifc import schema_table
from ..ifc.check import schema_check
from ..ifc.model import IfcModel
from ..ifc.selector import SelectorError, parse_selector, select
from ..ifc.spf import SpfParseError, parse_spf
from ..wire import ModelRef
from .client import HarnessError, McpClient

CHECKS = ("count_eq", "count_ge", "attr_eq", "exists")


@dataclass(frozen=True)
class Rule:
    selector: str
    check: str  # one of CHECKS
    value: object = None

    def to_json(self) -> dict:
        return {"selector": self.selector, "check": self.check, "value": self.value}


@dataclass(frozen=True)
class TraceStep:
    tool_name: str
    arguments: dict
    expect_status: str = "ok"  # ok | error


@dataclass(frozen=True)
class TestCase:
    id: str
    prompt: str
    rules: tuple[Rule, ...]
    trace: tuple[TraceStep, ...] = ()


@dataclass(frozen=True)
class RunMetrics:
    steps: int
    tool_calls: int
    tool_success_rate: float  # percent
    rule_pass_rate: float  # percent, "Model Success"
    schema_pass_rate: float  # percent
    tokens_total: int | None = None

    def to_json(self) -> dict:
        d: dict = {
            "steps": self.steps,
            "toolCalls": self.tool_calls,
            "toolSuccessRate": self.tool_success_rate,
            "rulePassRate": self.rule_pass_rate,
            "schemaPassRate": self.schema_pass_rate,
        }
        if self.tokens_total is not None:
            d["tokensTotal"] = self.tokens_total
        return d


@dataclass
class RepetitionResult:
    metrics: RunMetrics
    final_model: ModelRef | None
    wall_clock_sec: float
    expect_mismatches: int
    rule_outcomes: list[dict]
    session_id: str

    def to_json(self) -> dict:
        return {
            "metrics": self.metrics.to_json(),
            "finalModel": self.final_model.to_json() if self.final_model else None,
            "wallClockSec": round(self.wall_clock_sec, 3),
            "expectMismatches": self.expect_mismatches,
            "ruleOutcomes": self.rule_outcomes,
            "sessionId": self.session_id,
        }


@dataclass
class CaseResult:
    case: TestCase
    repetitions: list[RepetitionResult] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "case": self.case.id,
            "prompt": self.case.prompt,
            "rules": [r.to_json() for r in self.case.rules],
            "repetitions": [r.to_json() for r in self.repetitions],
        }


# --- case files ---------------------------------------------------------------


def load_case(path: str | Path) -> TestCase:
    try:
        raw = json.loads(Path(path).read_text("utf-8"))
    except ValueError as exc:
        raise HarnessError(f"case file is not valid JSON: {exc}") from exc
    for name in ("id", "prompt", "rules"):
        if name not in raw:
            raise HarnessError(f"case file missing field: {name}")
    rules = []
    for i, r in enumerate(raw["rules"]):
        if r.get("check") not in CHECKS:
            raise HarnessError(f"rule {i}: unknown check {r.get('check')!r}")
        try:
            parse_selector(r["selector"])
        except (SelectorError, KeyError) as exc:
            raise HarnessError(f"rule {i}: bad selector: {exc}") from exc
        rules.append(Rule(r["selector"], r["check"], r.get("value")))
    trace = tuple(
        TraceStep(s["toolName"], s.get("arguments", {}), s.get("expectStatus", "ok"))
        for s in raw.get("trace", [])
    )
    return TestCase(raw["id"], raw["prompt"], tuple(rules), trace)


def bundled_case_paths() -> list[Path]:
    base = resources.files("bimstack") / "harness" / "cases"
    return sorted(Path(str(base)).glob("*.json"))


# --- rules ------------------------------------------------------------------


def _attr_of(entity, attr_name: str):
    idx = schema_table.attr_index(entity.type_name, attr_name)
    if idx is None or idx >= len(entity.attrs):
        return None
    return entity.attrs[idx]


def check_rules(model: IfcModel | None, rules: tuple[Rule, ...]) -> list[dict]:
    """Evaluate each rule; a missing model fails everything."""
    out = []
    for i, rule in enumerate(rules):
        if model is None:
            out.append({"rule": i, "passed": False, "detail": "no final model"})
            continue
        try:
            hits = select(model, rule.selector)
        except SelectorError as exc:
            out.append({"rule": i, "passed": False, "detail": f"selector error: {exc}"})
            continue
        if rule.check == "count_eq":
            passed = len(hits) == rule.value
            detail = f"matched {len(hits)}, expected {rule.value}"
        elif rule.check == "count_ge":
            passed = len(hits) >= rule.value
            detail = f"matched {len(hits)}, expected at least {rule.value}"
        elif rule.check == "exists":
            passed = bool(hits)
            detail = f"matched {len(hits)}"
        else:  # attr_eq
            spec = rule.value or {}
            attr, expected = spec.get("attr"), spec.get("equals")
            wanted = json_to_value(expected)
            values = [_attr_of(e, attr) for e in hits]
            passed = bool(hits) and all(v == wanted for v in values)
            detail = f"{len(hits)} matched, values {values!r}, expected {wanted!r}"
        out.append({"rule": i, "passed": passed, "detail": detail})
    return out


# --- running ----------------------------------------------------------------


def _rate(hits: int, total: int) -> float:
    return 100.0 if total == 0 else round(100.0 * hits / total, 3)


def _download(store_url: str, ref: ModelRef, http: requests.Session) -> bytes:
    url = (
        f"{store_url.rstrip('/')}/viewer/download?bucket={quote(ref.bucket, safe='')}"
        f"&key={quote(ref.key, safe='')}&versionId={quote(ref.version_id, safe='')}"
    )
    resp = http.get(url, timeout=120)
    if resp.status_code != 200:
        raise HarnessError(f"model download failed: HTTP {resp.status_code}")
    return resp.content


def _parse_model(data: bytes) -> IfcModel | None:
    try:
        return parse_spf(data.decode("utf-8"))
    except (SpfParseError, UnicodeDecodeError):
        return None


def run_repetition(
    case: TestCase,
    mcp_url: str,
    store_url: str,
    session_id: str,
    agent: str = "scripted",
    llm_config: dict | None = None,
    http: requests.Session | None = None,
) -> RepetitionResult:
    http = http or requests.Session()
    client = McpClient(mcp_url, http=http)
    client.initialize()
    listed = {t["name"] for t in client.tools_list()}
    t0 = time.monotonic()

    tokens_total: int | None = None
    if agent == "scripted":
        if not case.trace:
            raise HarnessError(f"case {case.id} has no trace; use the llm agent")
        unknown = {s.tool_name for s in case.trace} - listed
        if unknown:
            raise HarnessError(f"trace names tools the server does not list: {sorted(unknown)}")
        statuses, mutated_refs = [], []
        for step in case.trace:
            result = client.call(step.tool_name, {**step.arguments, "sessionId": session_id})
            status = "error" if result.get("isError") else "ok"
            statuses.append((status, step.expect_status))
            chat = result.get("structuredContent") or {}
            if status == "ok" and chat.get("diffSummary") is not None and chat.get("fileRef"):
                mutated_refs.append(ModelRef.from_json(chat["fileRef"]))
        tool_calls = len(statuses)
        ok_calls = sum(1 for s, _ in statuses if s == "ok")
        mismatches = sum(1 for s, e in statuses if s != e)
    else:
        from .react import react_loop

        outcome = react_loop(client, case, session_id, llm_config or {})
        tool_calls = outcome.tool_calls
        ok_calls = outcome.ok_calls
        # an agent that hits the step cap never declared success
        mismatches = 0 if outcome.finished else 1
        mutated_refs = outcome.mutated_refs
        tokens_total = outcome.tokens_total

    wall_clock = time.monotonic() - t0

    final_ref = mutated_refs[-1] if mutated_refs else None
    final_model = _parse_model(_download(store_url, final_ref, http)) if final_ref else None
    rule_outcomes = check_rules(final_model, case.rules)

    schema_passes = 0
    for ref in mutated_refs:
        model = _parse_model(_download(store_url, ref, http))
        if model is not None and schema_check(model).passed:
            schema_passes += 1

    metrics = RunMetrics(
        steps=tool_calls + 1,
        tool_calls=tool_calls,
        tool_success_rate=_rate(ok_calls, tool_calls),
        rule_pass_rate=_rate(sum(1 for r in rule_outcomes if r["passed"]), len(rule_outcomes)),
        schema_pass_rate=_rate(schema_passes, len(mutated_refs)),
        tokens_total=tokens_total,
    )
    return RepetitionResult(
        metrics=metrics,
        final_model=final_ref,
        wall_clock_sec=wall_clock,
        expect_mismatches=mismatches,
        rule_outcomes=rule_outcomes,
        session_id=session_id,
    )


def run_case(
    case: TestCase,
    mcp_url: str,
    store_url: str,
    repetitions: int = 5,
    agent: str = "scripted",
    llm_config: dict | None = None,
    parallel: bool = False,
) -> CaseResult:
    nonce = "det" if os.environ.get("TEST_DETERMINISTIC") == "1" else f"{int(time.time() * 1000):x}"
    sids = [f"{case.id}-{nonce}-rep{i}" for i in range(repetitions)]

    def one(sid: str) -> RepetitionResult:
        return run_repetition(case, mcp_url, store_url, sid, agent=agent, llm_config=llm_config)

    result = CaseResult(case=case)
    if parallel:
        with ThreadPoolExecutor(max_workers=min(repetitions, 8)) as pool:
            result.repetitions = list(pool.map(one, sids))
    else:
        result.repetitions = [one(sid) for sid in sids]
    return result
