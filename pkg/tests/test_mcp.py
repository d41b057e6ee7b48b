"""MCP endpoint: JSON-RPC conformance, catalogue, sessions, dispatch."""

import json
import random
import re

import pytest
import requests

from bimstack.exec_http import make_service as make_exec_service
from bimstack.mcp.catalog import CATALOG, CATEGORIES, descriptor_for
from bimstack.mcp.knowledge import corpus_ids, doc_text, lookup_docs
from bimstack.mcp.server import McpServer, make_service as make_mcp_service
from bimstack.store import ObjectStore
from bimstack.store_http import make_service as make_store_service
from bimstack.validation import validate_instance


def rpc(server, method, params=None, msg_id=1):
    msg = {"jsonrpc": "2.0", "id": msg_id, "method": method}
    if params is not None:
        msg["params"] = params
    return server.handle_raw(json.dumps(msg).encode())


def call_tool(server, name, arguments):
    reply = rpc(server, "tools/call", {"name": name, "arguments": arguments})
    assert "result" in reply, reply
    return reply["result"]


def offline_server():
    # dummy backends: fine for anything that never leaves the server
    return McpServer("http://127.0.0.1:1", "http://127.0.0.1:1")


# --- JSON-RPC conformance vectors ---------------------------------------------


def test_parse_error():
    reply = offline_server().handle_raw(b"{nope")
    assert reply["error"]["code"] == -32700
    assert reply["id"] is None


def test_invalid_requests():
    s = offline_server()
    assert s.handle_raw(b'"just a string"')["error"]["code"] == -32600
    assert s.handle_raw(b'{"id": 1, "method": "initialize"}')["error"]["code"] == -32600
    assert (
        s.handle_raw(b'{"jsonrpc": "1.0", "id": 1, "method": "initialize"}')["error"]["code"]
        == -32600
    )
    reply = s.handle_raw(b'{"jsonrpc": "2.0", "id": 3, "method": 5}')
    assert reply["error"]["code"] == -32600
    assert reply["id"] == 3
    reply = s.handle_raw(b'{"jsonrpc": "2.0", "id": 4, "method": "tools/list", "params": "x"}')
    assert reply["error"]["code"] == -32600


def test_method_not_found_and_notification_silence():
    s = offline_server()
    reply = rpc(s, "frobnicate")
    assert reply["error"]["code"] == -32601
    assert "frobnicate" in reply["error"]["message"]
    # notifications never get replies, not even for unknown methods
    assert s.handle_raw(b'{"jsonrpc": "2.0", "method": "frobnicate"}') is None
    assert s.handle_raw(b'{"jsonrpc": "2.0", "method": "notifications/initialized"}') is None


def test_initialize_shape_and_id_echo():
    s = offline_server()
    for msg_id in ("abc", 7, None):
        reply = rpc(s, "initialize", {"clientInfo": {"name": "t"}}, msg_id=msg_id)
        assert reply["id"] == msg_id
        result = reply["result"]
        assert result["protocolVersion"]
        assert result["capabilities"]["tools"] == {"listChanged": False}
        assert result["serverInfo"]["name"]


def test_batch_id_matching_and_edge_cases():
    s = offline_server()
    batch = [
        {"jsonrpc": "2.0", "id": "a", "method": "initialize"},
        {"jsonrpc": "2.0", "method": "notifications/initialized"},
        {"jsonrpc": "2.0", "id": "b", "method": "tools/list"},
        "garbage",
    ]
    replies = s.handle_raw(json.dumps(batch).encode())
    assert isinstance(replies, list) and len(replies) == 3
    assert replies[0]["id"] == "a" and "protocolVersion" in replies[0]["result"]
    assert replies[1]["id"] == "b" and "tools" in replies[1]["result"]
    assert replies[2]["error"]["code"] == -32600

    assert s.handle_raw(b"[]")["error"]["code"] == -32600
    only_notes = [{"jsonrpc": "2.0", "method": "notifications/initialized"}]
    assert s.handle_raw(json.dumps(only_notes).encode()) is None


def test_tools_call_param_errors():
    s = offline_server()
    reply = rpc(s, "tools/call", {"name": "teleport", "arguments": {}})
    assert reply["error"]["code"] == -32602
    assert "teleport" in reply["error"]["message"]

    reply = rpc(s, "tools/call", {"arguments": {}})
    assert reply["error"]["code"] == -32602

    reply = rpc(s, "tools/call", {"name": "create_project", "arguments": {}})
    assert reply["error"]["code"] == -32602
    paths = {v["path"] for v in reply["error"]["data"]["violations"]}
    assert "/name" in paths

    reply = rpc(s, "tools/call", {"name": "create_project", "arguments": {"name": "X", "bogus": 1}})
    assert reply["error"]["code"] == -32602
    assert any(v["path"] == "/bogus" for v in reply["error"]["data"]["violations"])


# --- catalogue -----------------------------------------------------------------


def test_catalogue_contents_and_uniqueness():
    names = [d.name for d in CATALOG]
    assert len(names) == len(set(names)) == 16
    for required in (
        "create_project", "georeference", "add_storey", "create_wall", "create_slab",
        "add_door", "add_window", "set_property", "delete_elements", "query_elements",
        "spatial_tree", "run_batch", "upload_model", "download_model",
        "list_model_versions", "lookup_docs",
    ):
        assert required in names
    assert all(d.category in CATEGORIES for d in CATALOG)
    assert {d.category for d in CATALOG} == set(CATEGORIES)


def test_tools_list_stable_and_examples_validate():
    s = offline_server()
    first = rpc(s, "tools/list")["result"]["tools"]
    second = rpc(s, "tools/list")["result"]["tools"]
    assert first == second
    for tool in first:
        schema = tool["inputSchema"]
        assert schema["type"] == "object"
        examples = schema.get("examples", [])
        assert examples, tool["name"]
        for ex in examples:
            assert validate_instance(schema, ex) == [], (tool["name"], ex)
        # sessionId is accepted everywhere
        assert "sessionId" in schema["properties"]


def test_catalogue_closure():
    s = offline_server()
    listed = {t["name"] for t in rpc(s, "tools/list")["result"]["tools"]}
    for name in listed:
        reply = rpc(s, "tools/call", {"name": name, "arguments": {"definitely": "wrong"}})
        # reaching argument validation proves the tool is accepted
        assert reply["error"]["code"] == -32602
        assert "unknown tool" not in reply["error"]["message"]
    assert descriptor_for("not_a_tool") is None


# --- knowledge tool ---------------------------------------------------------------


def lookup_oracle(query, k):
    terms = re.findall(r"[a-z0-9_]+", query.lower())
    if not terms:
        return []
    hits = []
    for doc_id in corpus_ids():
        words = re.findall(r"[a-z0-9_]+", doc_text(doc_id).lower())
        score = sum(words.count(t) for t in terms)
        if score:
            hits.append((-score, doc_id))
    hits.sort()
    return [(doc_id, -neg) for neg, doc_id in hits[: max(1, min(k, len(corpus_ids())))]]


def test_lookup_docs_ranking_matches_oracle():
    for query, k in [
        ("wall thickness parameter", 3),
        ("property set boolean", 5),
        ("storey elevation", 2),
        ("opening door window sill", 4),
        ("version presigned url", 3),
    ]:
        got = [(r["id"], r["score"]) for r in lookup_docs(query, k)]
        assert got == lookup_oracle(query, k), query


def test_lookup_docs_top_hit_for_wall_query():
    results = lookup_docs("wall thickness parameter", 3)
    assert results[0]["id"] == "tool/create_wall"


def test_lookup_docs_edges():
    assert lookup_docs("", 3) == []
    assert lookup_docs("   --- !!!", 3) == []
    everything = lookup_docs("model", 10_000)
    assert len(everything) == len(lookup_oracle("model", 10_000))
    assert all(len(r["snippet"]) <= 512 for r in everything)
    assert len(lookup_docs("wall", 1)) == 1


def test_lookup_docs_via_rpc():
    s = offline_server()
    result = call_tool(s, "lookup_docs", {"query": "wall thickness parameter", "k": 2})
    assert result["isError"] is False
    assert result["structuredContent"]["results"][0]["id"] == "tool/create_wall"
    reply = rpc(s, "tools/call", {"name": "lookup_docs", "arguments": {"query": "x", "k": 0}})
    assert reply["error"]["code"] == -32602


# --- live rig -------------------------------------------------------------------


class RecordingSession(requests.Session):
    def __init__(self):
        super().__init__()
        self.calls = []

    def request(self, method, url, *args, **kwargs):
        body = kwargs.get("json")
        if body is None and kwargs.get("data") is not None:
            body = "<bytes>"
        self.calls.append((method.upper(), url, body))
        return super().request(method, url, *args, **kwargs)


@pytest.fixture(scope="module")
def rig(tmp_path_factory):
    store = ObjectStore(tmp_path_factory.mktemp("store"), "mcp-test-secret")
    store_svc = make_store_service(store)
    store_svc.start_background()
    exec_svc = make_exec_service()
    exec_svc.start_background()
    yield {
        "store": store,
        "store_url": f"http://127.0.0.1:{store_svc.port}",
        "exec_url": f"http://127.0.0.1:{exec_svc.port}",
    }
    exec_svc.stop()
    store_svc.stop()


def live_server(rig, recording=False):
    http = RecordingSession() if recording else None
    return McpServer(rig["exec_url"], rig["store_url"], http=http)


def test_e2e_session_chains_file_refs(rig):
    s = live_server(rig, recording=True)
    r1 = call_tool(s, "create_project", {"name": "Demo", "sessionId": "chain"})
    assert r1["isError"] is False
    chat1 = r1["structuredContent"]
    assert chat1["status"] == "ok"
    v1 = chat1["fileRef"]["versionId"]

    r2 = call_tool(s, "add_storey", {"name": "EG", "elevation": 0.0, "sessionId": "chain"})
    assert r2["isError"] is False
    v2 = r2["structuredContent"]["fileRef"]["versionId"]
    assert v2 != v1

    # the second call's executor request carried the first call's output version
    exec_bodies = [b for m, u, b in s.http.calls if u.endswith("/modify")]
    assert len(exec_bodies) == 1
    assert v1 in exec_bodies[0]["inputModel"]

    r3 = call_tool(
        s,
        "create_wall",
        {
            "storeyRef": "IfcBuildingStorey",
            "start": [0, 0],
            "end": [5, 0],
            "height": 3.0,
            "thickness": 0.2,
            "sessionId": "chain",
        },
    )
    assert r3["isError"] is False
    assert r3["structuredContent"]["diffSummary"]["perType"]["IFCWALL"]["added"] == 1

    r4 = call_tool(s, "query_elements", {"selector": "IfcWall", "sessionId": "chain"})
    assert r4["isError"] is False
    assert r4["structuredContent"]["logicalResult"]["count"] == 1
    # queries must not advance the session model
    assert s.session("chain").current_model.version_id == r3["structuredContent"]["fileRef"]["versionId"]


def test_backend_neutrality_of_outbound_bodies(rig):
    s = live_server(rig, recording=True)
    call_tool(s, "create_project", {"name": "N", "sessionId": "neutral"})
    call_tool(s, "add_storey", {"name": "EG", "elevation": 0.0, "sessionId": "neutral"})
    call_tool(s, "query_elements", {"selector": "IfcWall", "sessionId": "neutral"})
    allowed = {"toolName", "params", "inputModel", "outputTarget", "codeBatch", "timeoutSec"}
    exec_prefix = rig["exec_url"]
    exec_calls = [(u, b) for m, u, b in s.http.calls if u.startswith(exec_prefix)]
    assert exec_calls
    for url, body in exec_calls:
        assert set(body) <= allowed, url


def test_executor_error_keeps_current_model(rig):
    s = live_server(rig)
    call_tool(s, "create_project", {"name": "D", "sessionId": "err"})
    call_tool(s, "add_storey", {"name": "EG", "elevation": 0.0, "sessionId": "err"})
    call_tool(
        s,
        "create_wall",
        {"storeyRef": "IfcBuildingStorey", "start": [0, 0], "end": [5, 0], "height": 3.0, "thickness": 0.2, "sessionId": "err"},
    )
    before = s.session("err").current_model
    r = call_tool(
        s,
        "add_door",
        {"wallRef": "IfcWall", "offsetAlongWall": 0.0, "width": 6.0, "height": 2.0, "sessionId": "err"},
    )
    assert r["isError"] is True
    chat = r["structuredContent"]
    assert chat["status"] == "error"
    assert "opening exceeds wall" in chat["summaryLine"]
    assert s.session("err").current_model == before


def test_no_current_model_is_tool_error_not_protocol_error(rig):
    s = live_server(rig)
    r = call_tool(
        s,
        "create_wall",
        {"storeyRef": "IfcBuildingStorey", "start": [0, 0], "end": [1, 0], "height": 1.0, "thickness": 0.1, "sessionId": "fresh"},
    )
    assert r["isError"] is True
    assert "no current model" in r["structuredContent"]["summaryLine"]
    r = call_tool(s, "query_elements", {"selector": "IfcWall", "sessionId": "fresh2"})
    assert r["isError"] is True


def test_sessions_are_isolated(rig):
    s = live_server(rig)
    call_tool(s, "create_project", {"name": "A", "sessionId": "iso-a"})
    assert s.session("iso-a").current_model is not None
    r = call_tool(s, "add_storey", {"name": "EG", "elevation": 0.0, "sessionId": "iso-b"})
    assert r["isError"] is True
    assert s.session("iso-b").current_model is None
    # default session is its own bucket
    r = call_tool(s, "spatial_tree", {})
    assert r["isError"] is True


def test_executor_unreachable_is_tool_result(rig):
    s = McpServer("http://127.0.0.1:9", rig["store_url"])
    r = call_tool(s, "create_project", {"name": "X", "sessionId": "down"})
    assert r["isError"] is True
    assert "unreachable" in r["structuredContent"]["summaryLine"]
    assert s.session("down").current_model is None


def test_storage_tools_do_not_move_session(rig):
    s = live_server(rig)
    sid = "storage-side"
    call_tool(s, "create_project", {"name": "S", "sessionId": sid})
    current = s.session(sid).current_model

    model_text = "ISO-10303-21;\nHEADER;\nENDSEC;\nDATA;\nENDSEC;\nEND-ISO-10303-21;\n"
    up = call_tool(s, "upload_model", {"modelText": model_text, "key": "imports/x.ifc", "sessionId": sid})
    assert up["isError"] is False
    assert up["structuredContent"]["versionId"]
    assert s.session(sid).current_model == current

    lst = call_tool(s, "list_model_versions", {"key": "imports/x.ifc", "sessionId": sid})
    assert lst["isError"] is False
    assert len(lst["structuredContent"]["versions"]) >= 1

    down = call_tool(
        s,
        "download_model",
        {"key": "imports/x.ifc", "versionId": up["structuredContent"]["versionId"], "sessionId": sid},
    )
    assert down["isError"] is False
    assert down["structuredContent"]["text"] == model_text
    assert down["structuredContent"]["textTruncated"] is False

    # default: the session's current model, pinned version
    down2 = call_tool(s, "download_model", {"sessionId": sid})
    assert down2["isError"] is False
    assert down2["structuredContent"]["versionId"] == current.version_id

    lst2 = call_tool(s, "list_model_versions", {"sessionId": sid})
    assert lst2["isError"] is False

    # without key or current model: a tool error, not a crash
    bad = call_tool(s, "download_model", {"sessionId": "storage-empty"})
    assert bad["isError"] is True


def test_run_batch_via_mcp(rig):
    s = live_server(rig)
    sid = "batch"
    call_tool(s, "create_project", {"name": "B", "sessionId": sid})
    r = call_tool(
        s,
        "run_batch",
        {
            "ops": [{"op": "call_helper", "args": {"name": "count_type", "args": {"type": "IfcSite"}}}],
            "sessionId": sid,
        },
    )
    assert r["isError"] is False
    assert r["structuredContent"]["logicalResult"]["results"][0]["result"] == 1


def check_session_soundness(server, sid):
    # invariant: currentModel equals the fileRef of the last ok mutating
    # result in history; mutating results are the ones carrying a diff
    # summary (queries echo a fileRef but have none)
    state = server.session(sid)
    last_ref = None
    for chat in state.history:
        if chat.status == "ok" and chat.diff_summary is not None:
            last_ref = chat.file_ref
    assert state.current_model == last_ref


def test_session_soundness_after_random_sequences(rig):
    rnd = random.Random(20240816)
    s = live_server(rig)
    pool = [
        ("create_project", lambda: {"name": "R"}),
        ("add_storey", lambda: {"name": f"L{rnd.randint(0, 9)}", "elevation": float(rnd.randint(0, 9))}),
        (
            "create_wall",
            lambda: {
                "storeyRef": "IfcBuildingStorey, Name='L1'",
                "start": [0, rnd.randint(0, 5)],
                "end": [rnd.randint(1, 6), 8],
                "height": 3.0,
                "thickness": 0.2,
            },
        ),
        ("query_elements", lambda: {"selector": "IfcWall"}),
        ("delete_elements", lambda: {"selector": "IfcDoor"}),
        ("spatial_tree", lambda: {}),
        ("add_door", lambda: {"wallRef": "IfcWall", "offsetAlongWall": 0.0, "width": 9.0, "height": 9.0}),
    ]
    for round_no in range(3):
        sid = f"fuzz-{round_no}"
        for _ in range(10):
            name, gen = pool[rnd.randrange(len(pool))]
            args = gen()
            args["sessionId"] = sid
            call_tool(s, name, args)
            check_session_soundness(s, sid)


# --- transport ------------------------------------------------------------------


@pytest.fixture(scope="module")
def http_rig(rig):
    server = McpServer(rig["exec_url"], rig["store_url"])
    svc = make_mcp_service(server)
    svc.start_background()
    yield f"http://127.0.0.1:{svc.port}"
    svc.stop()


def test_http_post_initialize(http_rig):
    r = requests.post(
        f"{http_rig}/mcp",
        json={"jsonrpc": "2.0", "id": 1, "method": "initialize"},
    )
    assert r.status_code == 200
    assert r.headers["Content-Type"].startswith("application/json")
    assert r.json()["result"]["protocolVersion"]


def test_http_parse_error_vector(http_rig):
    r = requests.post(f"{http_rig}/mcp", data=b"{bad json", headers={"Content-Type": "application/json"})
    assert r.status_code == 200
    assert r.json()["error"]["code"] == -32700


def test_http_notifications_only_gets_202(http_rig):
    r = requests.post(
        f"{http_rig}/mcp",
        json=[{"jsonrpc": "2.0", "method": "notifications/initialized"}],
    )
    assert r.status_code == 202
    assert r.content == b""


def test_http_get_is_405(http_rig):
    assert requests.get(f"{http_rig}/mcp").status_code == 405


def test_http_event_stream_frame(http_rig):
    r = requests.post(
        f"{http_rig}/mcp",
        json={"jsonrpc": "2.0", "id": 5, "method": "tools/list"},
        headers={"Accept": "text/event-stream"},
    )
    assert r.status_code == 200
    assert r.headers["Content-Type"].startswith("text/event-stream")
    body = r.content.decode()
    assert body.startswith("event: message\ndata: ")
    assert body.endswith("\n\n")
    payload = json.loads(body[len("event: message\ndata: "):])
    assert payload["id"] == 5
    assert len(payload["result"]["tools"]) == 16
