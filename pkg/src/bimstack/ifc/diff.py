"""Entity-level model diffing.

Rooted entities (IfcRoot subtypes) are keyed by GlobalId; everything else
gets a structural fingerprint so renumbering instance ids never shows up
as a change. Attribute equality canonicalizes references to the target's
key, so a wall is "modified" when its placement subtree really changed,
not when the file was renumbered.
"""

from __future__ import annotations

import hashlib

from ..wire import AttrChange, DiffEntry, DiffRaw
from . import schema_table
from .model import IfcEntity, IfcModel
from .values import Ref, SpfValue, Typed, format_value


def _fingerprints(model: IfcModel) -> dict[int, str]:
    """Structural fingerprint per unrooted entity.

    Refs to rooted entities contribute the GlobalId; refs to unrooted ones
    recurse. A back-edge in a cycle contributes the distance up the active
    chain instead of recursing forever. Duplicate structures get ordinal
    suffixes assigned in ascending id order, making keys a stable multiset.
    """
    guids = {eid: g for eid, e in model.entities.items() if (g := e.global_id())}
    memo: dict[int, str] = {}

    def token(v: SpfValue, stack: list[int]) -> tuple[str, bool]:
        if isinstance(v, Ref):
            if v.target in guids:
                return f"G<{guids[v.target]}>", False
            return describe(v.target, stack)
        if isinstance(v, tuple):
            parts, cyclic = [], False
            for x in v:
                t, c = token(x, stack)
                parts.append(t)
                cyclic = cyclic or c
            return "L(" + ",".join(parts) + ")", cyclic
        if isinstance(v, Typed):
            t, c = token(v.value, stack)
            return f"T<{v.type_name}>({t})", c
        return format_value(v), False

    def describe(eid: int, stack: list[int]) -> tuple[str, bool]:
        if eid in memo:
            return memo[eid], False
        if eid in stack:
            return f"C<{len(stack) - stack.index(eid)}>", True
        if eid not in model.entities:
            return f"X<{eid}>", False  # dangling ref: stable placeholder
        e = model.entities[eid]
        stack.append(eid)
        parts, cyclic = [], False
        for a in e.attrs:
            t, c = token(a, stack)
            parts.append(t)
            cyclic = cyclic or c
        stack.pop()
        text = f"E<{e.type_name}>(" + ",".join(parts) + ")"
        if not cyclic:
            memo[eid] = text
        return text, cyclic

    raw: dict[int, str] = {}
    for eid in sorted(model.entities):
        if eid in guids:
            continue
        text, _ = describe(eid, [])
        raw[eid] = hashlib.sha256(text.encode("utf-8")).hexdigest()

    seen: dict[str, int] = {}
    out: dict[int, str] = {}
    for eid in sorted(raw):
        fp = raw[eid]
        n = seen.get(fp, 0)
        seen[fp] = n + 1
        out[eid] = f"{fp}#{n}"
    return out


def entity_keys(model: IfcModel) -> dict[str, IfcEntity]:
    """Stable diff key for every entity: GlobalId or fingerprint ordinal."""
    fps = _fingerprints(model)
    out: dict[str, IfcEntity] = {}
    for eid in sorted(model.entities):
        e = model.entities[eid]
        out[e.global_id() or fps[eid]] = e
    return out


def _bare_key(key: str) -> str:
    """Key without the multiset ordinal: refs to structurally equal twins
    are indistinguishable, so attribute comparison must not see which twin
    happened to come first in id order."""
    return key.partition("#")[0]


def _canon(v: SpfValue, keys_by_id: dict[int, str]) -> object:
    """Comparison form: refs become the target's bare key, scalars their token."""
    if isinstance(v, Ref):
        return ("ref", _bare_key(keys_by_id.get(v.target, f"X<{v.target}>")))
    if isinstance(v, tuple):
        return tuple(_canon(x, keys_by_id) for x in v)
    if isinstance(v, Typed):
        return ("typed", v.type_name, _canon(v.value, keys_by_id))
    return format_value(v)  # exact on serialized tokens


def _id_to_key(keyed: dict[str, IfcEntity]) -> dict[int, str]:
    return {e.eid: k for k, e in keyed.items()}


def _attr_changes(old: IfcEntity, new: IfcEntity, old_ids: dict[int, str], new_ids: dict[int, str]) -> tuple[AttrChange, ...]:
    names = schema_table.attr_names(new.type_name)
    width = max(len(old.attrs), len(new.attrs))
    changes = []
    for i in range(width):
        has_old, has_new = i < len(old.attrs), i < len(new.attrs)
        before = _canon(old.attrs[i], old_ids) if has_old else ("absent",)
        after = _canon(new.attrs[i], new_ids) if has_new else ("absent",)
        if before == after:
            continue
        name = names[i] if names and i < len(names) else f"attr{i}"
        changes.append(
            AttrChange(
                attr_index=i,
                attr_name=name,
                before=format_value(old.attrs[i]) if has_old else "",
                after=format_value(new.attrs[i]) if has_new else "",
            )
        )
    return tuple(changes)


_KIND_ORDER = {"added": 0, "removed": 1, "modified": 2}


def entity_diff(old: IfcModel, new: IfcModel) -> DiffRaw:
    old_keys = entity_keys(old)
    new_keys = entity_keys(new)
    old_ids = _id_to_key(old_keys)
    new_ids = _id_to_key(new_keys)

    entries: list[DiffEntry] = []
    for key, e in new_keys.items():
        if key not in old_keys:
            entries.append(DiffEntry(key, e.type_name, "added"))
    for key, e in old_keys.items():
        if key not in new_keys:
            entries.append(DiffEntry(key, e.type_name, "removed"))
    for key, e_new in new_keys.items():
        e_old = old_keys.get(key)
        if e_old is None:
            continue
        # unrooted keys encode the structure, so a shared key means equal
        if e_old.global_id() is None:
            continue
        changes = _attr_changes(e_old, e_new, old_ids, new_ids)
        # a type swap on the same GlobalId still counts as modified even if
        # every attribute token happens to match
        if e_old.type_name != e_new.type_name or changes:
            entries.append(DiffEntry(key, e_new.type_name, "modified", changes))

    entries.sort(key=lambda d: (_KIND_ORDER[d.change_kind], d.entity_type, d.entity_key))
    return DiffRaw(entries=tuple(entries))
