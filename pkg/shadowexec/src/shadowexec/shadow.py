"""Shadow entity table: a deliberately small second backend.

The model here is not a real IFC engine. Loading projects each entity line
of a STEP file down to (instance id, type, GlobalId, Name); saving echoes
the original text back out; set_property lands in an overlay table instead
of the file. The point is to run the execution endpoints against something
that shares none of the native backend's code paths.

Limits, on purpose: one entity per line (block comments are stripped, but
an entity split across lines stays out of the table), exact type-name
matching without subtype expansion, and selectors restricted to
`IfcType` or `IfcType, Name='...'`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace

from bimstack.adapter import AdapterError, BimAdapter
from bimstack.wire import DiffEntry, DiffRaw

_COMMENT = re.compile(r"/\*.*?\*/")
_ENTITY_LINE = re.compile(r"^#(\d+)\s*=\s*([A-Z0-9]+)\s*\((.*)\)\s*;\s*$")
_GUID = re.compile(r"^[0-9A-Za-z_$]{22}$")
_TYPE_TOKEN = re.compile(r"^Ifc[A-Za-z0-9]+$")
_NAME_FILTER = re.compile(r"^Name\s*=\s*'((?:[^']|'')*)'$")


@dataclass(frozen=True)
class ShadowEntity:
    eid: int
    global_id: str
    type_name: str  # upper-case token as written in the file
    name: str | None


# one overlay record per (GlobalId, pset, property); value stored as JSON text
PropRecord = tuple[str, str, str, str]


@dataclass(frozen=True)
class ShadowModel:
    raw: str
    entities: tuple[ShadowEntity, ...]
    props: tuple[PropRecord, ...] = ()


def _split_args(raw: str) -> list[str]:
    """Top-level comma split; quotes (with '' escapes) and parens respected."""
    args, buf, depth, in_str = [], [], 0, False
    i = 0
    while i < len(raw):
        ch = raw[i]
        if in_str:
            if ch == "'" and i + 1 < len(raw) and raw[i + 1] == "'":
                buf.append("''")
                i += 2
                continue
            if ch == "'":
                in_str = False
            buf.append(ch)
        elif ch == "'":
            in_str = True
            buf.append(ch)
        elif ch == "(":
            depth += 1
            buf.append(ch)
        elif ch == ")":
            depth -= 1
            buf.append(ch)
        elif ch == "," and depth == 0:
            args.append("".join(buf).strip())
            buf = []
        else:
            buf.append(ch)
        i += 1
    if buf or args:
        args.append("".join(buf).strip())
    return args


def _unquote(token: str) -> str | None:
    if len(token) >= 2 and token.startswith("'") and token.endswith("'"):
        return token[1:-1].replace("''", "'")
    return None


def parse_shadow(text: str) -> ShadowModel:
    if "ISO-10303-21" not in text[:200] or "DATA;" not in text:
        raise AdapterError("cannot parse model: not a STEP physical file")
    entities: list[ShadowEntity] = []
    seen: set[str] = set()
    for line in text.splitlines():
        m = _ENTITY_LINE.match(_COMMENT.sub("", line).strip())
        if not m:
            continue
        args = _split_args(m.group(3))
        gid = _unquote(args[0]) if args else None
        if gid is None or not _GUID.match(gid):
            continue  # unrooted support entity; not projected
        if gid in seen:
            raise AdapterError(f"cannot parse model: duplicate GlobalId {gid!r}")
        seen.add(gid)
        name = _unquote(args[2]) if len(args) > 2 else None
        entities.append(ShadowEntity(int(m.group(1)), gid, m.group(2), name))
    return ShadowModel(raw=text, entities=tuple(entities))


def parse_simple_selector(text) -> tuple[str, str | None]:
    """`IfcType` or `IfcType, Name='...'`; anything richer is refused."""
    if not isinstance(text, str) or not text.strip():
        raise AdapterError("selector must be a non-empty string")
    parts = [p.strip() for p in text.split(",")]
    if not _TYPE_TOKEN.match(parts[0]):
        raise AdapterError(f"unsupported selector for this backend: {text!r}")
    if len(parts) == 1:
        return parts[0].upper(), None
    # a Name filter value may itself contain a comma; re-join and re-check
    tail = text.split(",", 1)[1].strip()
    m = _NAME_FILTER.match(tail)
    if not m:
        raise AdapterError(f"unsupported selector for this backend: {text!r}")
    return parts[0].upper(), m.group(1).replace("''", "'")


def _matches(model: ShadowModel, selector) -> list[ShadowEntity]:
    type_name, name = parse_simple_selector(selector)
    return [
        e for e in model.entities
        if e.type_name == type_name and (name is None or e.name == name)
    ]


def query_elements(model: ShadowModel, selector) -> dict:
    hits = _matches(model, selector)
    return {"count": len(hits), "ids": [e.global_id for e in hits]}


def set_property(model: ShadowModel, selector, pset_name, prop_name, value) -> tuple[ShadowModel, dict]:
    if not isinstance(pset_name, str) or not pset_name:
        raise AdapterError("psetName must be a non-empty string")
    if not isinstance(prop_name, str) or not prop_name:
        raise AdapterError("propName must be a non-empty string")
    hits = _matches(model, selector)
    token = json.dumps(value, sort_keys=True)
    touched = {e.global_id for e in hits}
    kept = tuple(
        r for r in model.props
        if not (r[0] in touched and r[1] == pset_name and r[2] == prop_name)
    )
    fresh = tuple((e.global_id, pset_name, prop_name, token) for e in hits)
    new_model = replace(model, props=kept + fresh)
    return new_model, {"matched": len(hits), "pset": pset_name, "property": prop_name}


def shadow_diff(old: ShadowModel, new: ShadowModel) -> DiffRaw:
    """Coarse: presence changes plus one bare `modified` entry per element."""
    old_by = {e.global_id: e for e in old.entities}
    new_by = {e.global_id: e for e in new.entities}
    old_props: dict[str, set[PropRecord]] = {}
    for r in old.props:
        old_props.setdefault(r[0], set()).add(r)
    new_props: dict[str, set[PropRecord]] = {}
    for r in new.props:
        new_props.setdefault(r[0], set()).add(r)

    entries: list[DiffEntry] = []
    for gid, e in new_by.items():
        if gid not in old_by:
            entries.append(DiffEntry(gid, e.type_name, "added"))
    for gid, e in old_by.items():
        if gid not in new_by:
            entries.append(DiffEntry(gid, e.type_name, "removed"))
    for gid, e in new_by.items():
        o = old_by.get(gid)
        if o is None:
            continue
        if (o.type_name, o.name) != (e.type_name, e.name) or old_props.get(gid, set()) != new_props.get(gid, set()):
            entries.append(DiffEntry(gid, e.type_name, "modified"))
    return DiffRaw(tuple(entries))


class ShadowAdapter(BimAdapter):
    """set_property and query_elements over the shadow table; nothing else."""

    def backend_id(self) -> str:
        return "shadow-table"

    def capabilities(self) -> dict:
        return {"diff": "coarse", "save": "echo"}

    def new_model(self) -> ShadowModel:
        return ShadowModel(raw="", entities=())

    def load_model(self, data: bytes) -> ShadowModel:
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise AdapterError(f"cannot parse model: {exc}") from exc
        return parse_shadow(text)

    def save_model(self, handle: ShadowModel) -> bytes:
        return handle.raw.encode("utf-8")

    def run_high_level(self, tool_name: str, params: dict, handle: ShadowModel):
        if not handle.raw:
            raise AdapterError("unsupported: this backend cannot create models")
        if tool_name == "set_property":
            return set_property(handle, params.get("selector"), params.get("psetName"),
                                params.get("propName"), params.get("value"))
        if tool_name == "query_elements":
            return handle, query_elements(handle, params.get("selector"))
        raise AdapterError(f"unsupported tool: {tool_name}")

    def run_batch(self, ops, handle: ShadowModel):
        raise AdapterError("unsupported tool: run_batch")

    def diff(self, old: ShadowModel, new: ShadowModel) -> DiffRaw:
        return shadow_diff(old, new)
