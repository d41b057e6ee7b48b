"""Backend contract checks, runnable against any execution service over HTTP.

Every function takes base URLs and plain bytes, so a second backend passes
the same checks without modification. Query checks return observed values
so callers can compare backends against each other.
"""

from __future__ import annotations

import json as _json
from urllib.parse import quote

import requests

from .validation import validate_artifact
from .wire import Artifact, ModelRef


def _http(http: requests.Session | None) -> requests.Session:
    return http or requests.Session()


def presign_url(store_url: str, method: str, bucket: str, key: str,
                version_id: str | None = None, ttl_sec: int = 300,
                http: requests.Session | None = None) -> str:
    body = {"method": method, "bucket": bucket, "key": key, "ttlSec": ttl_sec}
    if version_id:
        body["versionId"] = version_id
    resp = _http(http).post(f"{store_url.rstrip('/')}/bucket/presign", json=body, timeout=30)
    assert resp.status_code == 200, f"presign failed: HTTP {resp.status_code} {resp.text[:200]}"
    return store_url.rstrip("/") + resp.json()["url"]


def seed_bytes(store_url: str, key: str, data: bytes,
               http: requests.Session | None = None) -> ModelRef:
    http = _http(http)
    url = presign_url(store_url, "POST", "models", key, http=http)
    resp = http.post(url, data=data, timeout=30)
    assert resp.status_code == 200, f"seed upload failed: HTTP {resp.status_code}"
    v = resp.json()
    return ModelRef(v["bucket"], v["key"], v["versionId"])


def list_version_ids(store_url: str, key: str, http: requests.Session | None = None) -> list[str]:
    resp = _http(http).get(
        f"{store_url.rstrip('/')}/bucket/models/{quote(key)}/versions", timeout=30
    )
    if resp.status_code == 404:
        return []
    assert resp.status_code == 200
    return [v["versionId"] for v in resp.json()["versions"]]


def _post(exec_url: str, endpoint: str, body, http: requests.Session) -> requests.Response:
    data = body if isinstance(body, (bytes, str)) else _json.dumps(body)
    return http.post(
        f"{exec_url.rstrip('/')}{endpoint}",
        data=data,
        headers={"Content-Type": "application/json"},
        timeout=120,
    )


def _artifact(resp: requests.Response) -> Artifact:
    assert resp.status_code == 200, f"expected artifact, got HTTP {resp.status_code}: {resp.text[:200]}"
    payload = resp.json()
    problems = validate_artifact(payload)
    assert problems == [], f"artifact violates its schema: {problems[:3]}"
    return Artifact.from_json(payload)


# --- error-path checks ----------------------------------------------------------


def check_rejects_invalid_json(exec_url: str, http: requests.Session | None = None) -> None:
    http = _http(http)
    for endpoint in ("/create", "/modify", "/query"):
        resp = _post(exec_url, endpoint, b"{nope", http)
        assert resp.status_code == 400, f"{endpoint}: want 400, got {resp.status_code}"
        assert "error" in resp.json()


def check_rejects_schema_violations(exec_url: str, http: requests.Session | None = None) -> None:
    http = _http(http)
    cases = [
        ("/create", {"params": {}}),  # toolName and outputTarget missing
        ("/modify", {"toolName": "set_property", "params": {}}),  # inputModel/outputTarget missing
        ("/modify", {"toolName": 5, "params": {}, "inputModel": "x", "outputTarget": "y"}),
        ("/query", {"inputModel": "x"}),  # neither toolName nor codeBatch
        ("/query", {"toolName": "query_elements", "params": {}, "inputModel": "x", "timeoutSec": -5}),
    ]
    for endpoint, body in cases:
        resp = _post(exec_url, endpoint, body, http)
        assert resp.status_code == 422, f"{endpoint} {body}: want 422, got {resp.status_code}"
        violations = resp.json()["violations"]
        assert violations and all("path" in v and "message" in v for v in violations)


def check_http_verbs(exec_url: str, http: requests.Session | None = None) -> None:
    http = _http(http)
    resp = http.get(f"{exec_url.rstrip('/')}/query", timeout=30)
    assert resp.status_code == 405
    resp = http.post(f"{exec_url.rstrip('/')}/no-such-endpoint", data=b"{}", timeout=30)
    assert resp.status_code == 404


def check_error_artifact_bad_input_grant(
    exec_url: str, store_url: str, model_ref: ModelRef, tool: str, params: dict,
    http: requests.Session | None = None,
) -> None:
    """A garbled input signature yields an error artifact and no upload."""
    http = _http(http)
    good = presign_url(store_url, "GET", model_ref.bucket, model_ref.key,
                       version_id=model_ref.version_id, http=http)
    bad = good[:-4] + ("aaaa" if not good.endswith("aaaa") else "bbbb")
    out_key = "contract/bad-grant-out.ifc"
    before = list_version_ids(store_url, out_key, http=http)
    art = _artifact(_post(exec_url, "/modify", {
        "toolName": tool,
        "params": params,
        "inputModel": bad,
        "outputTarget": presign_url(store_url, "POST", "models", out_key, http=http),
    }, http))
    assert art.status == "error"
    assert "failed" in art.error_message
    assert art.file_ref is None and art.diff_raw is None
    assert list_version_ids(store_url, out_key, http=http) == before


def check_error_artifact_unparseable_input(
    exec_url: str, store_url: str, tool: str, params: dict,
    http: requests.Session | None = None,
) -> None:
    http = _http(http)
    garbage = seed_bytes(store_url, "contract/garbage.ifc", b"this is not a model\n", http=http)
    out_key = "contract/garbage-out.ifc"
    before = list_version_ids(store_url, out_key, http=http)
    art = _artifact(_post(exec_url, "/modify", {
        "toolName": tool,
        "params": params,
        "inputModel": presign_url(store_url, "GET", garbage.bucket, garbage.key,
                                  version_id=garbage.version_id, http=http),
        "outputTarget": presign_url(store_url, "POST", "models", out_key, http=http),
    }, http))
    assert art.status == "error"
    assert "parse" in art.error_message
    assert art.file_ref is None
    assert list_version_ids(store_url, out_key, http=http) == before


def check_error_artifact_unknown_tool(
    exec_url: str, store_url: str, model_ref: ModelRef,
    http: requests.Session | None = None,
) -> None:
    http = _http(http)
    out_key = "contract/unknown-out.ifc"
    before = list_version_ids(store_url, out_key, http=http)
    art = _artifact(_post(exec_url, "/modify", {
        "toolName": "definitely_not_a_tool",
        "params": {},
        "inputModel": presign_url(store_url, "GET", model_ref.bucket, model_ref.key,
                                  version_id=model_ref.version_id, http=http),
        "outputTarget": presign_url(store_url, "POST", "models", out_key, http=http),
    }, http))
    assert art.status == "error"
    assert art.error_message
    assert art.file_ref is None
    assert list_version_ids(store_url, out_key, http=http) == before


# --- query checks --------------------------------------------------------------


def check_query_counts(
    exec_url: str, store_url: str, model_ref: ModelRef, selector: str,
    http: requests.Session | None = None,
) -> int:
    """Run query_elements and return the observed count after wire checks."""
    http = _http(http)
    art = _artifact(_post(exec_url, "/query", {
        "toolName": "query_elements",
        "params": {"selector": selector},
        "inputModel": presign_url(store_url, "GET", model_ref.bucket, model_ref.key,
                                  version_id=model_ref.version_id, http=http),
    }, http))
    assert art.status == "ok", art.error_message
    assert art.manifest.operation == "query"
    assert art.manifest.backend_id
    assert art.file_ref == model_ref, "query must echo its input model"
    assert art.logical_result is not None and "count" in art.logical_result
    return int(art.logical_result["count"])


def check_query_purity(
    exec_url: str, store_url: str, model_ref: ModelRef, selector: str,
    http: requests.Session | None = None,
) -> None:
    """A query leaves the stored version list exactly as it was."""
    http = _http(http)
    before = list_version_ids(store_url, model_ref.key, http=http)
    check_query_counts(exec_url, store_url, model_ref, selector, http=http)
    assert list_version_ids(store_url, model_ref.key, http=http) == before


def check_query_rejects_malformed_selector(
    exec_url: str, store_url: str, model_ref: ModelRef,
    http: requests.Session | None = None,
) -> None:
    http = _http(http)
    art = _artifact(_post(exec_url, "/query", {
        "toolName": "query_elements",
        "params": {"selector": "IfcWall, Name="},
        "inputModel": presign_url(store_url, "GET", model_ref.bucket, model_ref.key,
                                  version_id=model_ref.version_id, http=http),
    }, http))
    assert art.status == "error"
    assert art.error_message


# --- bundles --------------------------------------------------------------------


def run_error_path_suite(
    exec_url: str, store_url: str, model_ref: ModelRef, modify_tool: str, modify_params: dict,
    http: requests.Session | None = None,
) -> None:
    """The subset every backend must pass, mutating nothing."""
    http = _http(http)
    check_rejects_invalid_json(exec_url, http=http)
    check_rejects_schema_violations(exec_url, http=http)
    check_http_verbs(exec_url, http=http)
    check_error_artifact_bad_input_grant(exec_url, store_url, model_ref,
                                         modify_tool, modify_params, http=http)
    check_error_artifact_unparseable_input(exec_url, store_url,
                                           modify_tool, modify_params, http=http)
    check_error_artifact_unknown_tool(exec_url, store_url, model_ref, http=http)


def run_query_suite(
    exec_url: str, store_url: str, model_ref: ModelRef, selectors: list[str],
    http: requests.Session | None = None,
) -> dict[str, int]:
    """Query checks; returns selector -> count for cross-backend comparison."""
    http = _http(http)
    counts = {s: check_query_counts(exec_url, store_url, model_ref, s, http=http) for s in selectors}
    check_query_purity(exec_url, store_url, model_ref, selectors[0], http=http)
    return counts
