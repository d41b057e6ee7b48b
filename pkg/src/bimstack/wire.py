"""Shared wire types: model references, manifests, diffs, artifacts.

Every service speaks these shapes. Dataclasses are immutable after
construction; to_json/from_json map to the camelCase wire form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class ModelRef:
    bucket: str
    key: str
    version_id: str

    def to_json(self) -> dict:
        return {"bucket": self.bucket, "key": self.key, "versionId": self.version_id}

    @classmethod
    def from_json(cls, d: dict) -> "ModelRef":
        return cls(d["bucket"], d["key"], d["versionId"])

    def __str__(self) -> str:
        return f"{self.bucket}/{self.key}@{self.version_id}"


@dataclass(frozen=True)
class Manifest:
    created_at: str  # RFC 3339 UTC
    operation: str  # create | modify | query
    tool_name: str
    backend_id: str
    params_digest: str  # sha-256 hex of canonical params JSON
    input_model: ModelRef | None = None
    capabilities: tuple[tuple[str, Any], ...] | None = None  # backend feature flags

    def to_json(self) -> dict:
        d: dict[str, Any] = {
            "createdAt": self.created_at,
            "operation": self.operation,
            "toolName": self.tool_name,
            "backendId": self.backend_id,
            "paramsDigest": self.params_digest,
        }
        if self.input_model is not None:
            d["inputModel"] = self.input_model.to_json()
        if self.capabilities is not None:
            d["capabilities"] = dict(self.capabilities)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Manifest":
        return cls(
            created_at=d["createdAt"],
            operation=d["operation"],
            tool_name=d["toolName"],
            backend_id=d["backendId"],
            params_digest=d["paramsDigest"],
            input_model=ModelRef.from_json(d["inputModel"]) if d.get("inputModel") else None,
            capabilities=tuple(sorted(d["capabilities"].items())) if d.get("capabilities") else None,
        )


@dataclass(frozen=True)
class AttrChange:
    attr_index: int
    attr_name: str
    before: str  # SPF literal token
    after: str

    def to_json(self) -> dict:
        return {"attrIndex": self.attr_index, "attrName": self.attr_name, "before": self.before, "after": self.after}

    @classmethod
    def from_json(cls, d: dict) -> "AttrChange":
        return cls(d["attrIndex"], d["attrName"], d["before"], d["after"])


@dataclass(frozen=True)
class DiffEntry:
    entity_key: str  # GlobalId (rooted) or fingerprint hex (unrooted)
    entity_type: str
    change_kind: str  # added | removed | modified
    changed_attributes: tuple[AttrChange, ...] = ()

    def to_json(self) -> dict:
        return {
            "entityKey": self.entity_key,
            "entityType": self.entity_type,
            "changeKind": self.change_kind,
            "changedAttributes": [c.to_json() for c in self.changed_attributes],
        }

    @classmethod
    def from_json(cls, d: dict) -> "DiffEntry":
        return cls(
            d["entityKey"],
            d["entityType"],
            d["changeKind"],
            tuple(AttrChange.from_json(c) for c in d.get("changedAttributes", [])),
        )


@dataclass(frozen=True)
class DiffRaw:
    entries: tuple[DiffEntry, ...]
    old_ref: ModelRef | None = None
    new_ref: ModelRef | None = None

    def to_json(self) -> dict:
        d: dict[str, Any] = {"entries": [e.to_json() for e in self.entries]}
        if self.old_ref is not None:
            d["oldRef"] = self.old_ref.to_json()
        if self.new_ref is not None:
            d["newRef"] = self.new_ref.to_json()
        return d

    @classmethod
    def from_json(cls, d: dict) -> "DiffRaw":
        return cls(
            tuple(DiffEntry.from_json(e) for e in d["entries"]),
            ModelRef.from_json(d["oldRef"]) if d.get("oldRef") else None,
            ModelRef.from_json(d["newRef"]) if d.get("newRef") else None,
        )


@dataclass(frozen=True)
class TypeCounts:
    added: int = 0
    removed: int = 0
    modified: int = 0

    def to_json(self) -> dict:
        return {"added": self.added, "removed": self.removed, "modified": self.modified}

    @classmethod
    def from_json(cls, d: dict) -> "TypeCounts":
        return cls(d.get("added", 0), d.get("removed", 0), d.get("modified", 0))


@dataclass(frozen=True)
class DiffSummary:
    per_type: dict[str, TypeCounts]
    totals: TypeCounts

    def to_json(self) -> dict:
        return {
            "perType": {t: c.to_json() for t, c in sorted(self.per_type.items())},
            "totals": self.totals.to_json(),
        }

    @classmethod
    def from_json(cls, d: dict) -> "DiffSummary":
        return cls(
            {t: TypeCounts.from_json(c) for t, c in d.get("perType", {}).items()},
            TypeCounts.from_json(d.get("totals", {})),
        )


@dataclass(frozen=True)
class Artifact:
    status: str  # ok | error
    manifest: Manifest
    file_ref: ModelRef | None = None
    logical_result: Any = None
    diff_raw: DiffRaw | None = None
    diff_summary: DiffSummary | None = None
    error_message: str | None = None

    def to_json(self) -> dict:
        d: dict[str, Any] = {"status": self.status, "manifest": self.manifest.to_json()}
        if self.file_ref is not None:
            d["fileRef"] = self.file_ref.to_json()
        if self.logical_result is not None:
            d["logicalResult"] = self.logical_result
        if self.diff_raw is not None:
            d["diffRaw"] = self.diff_raw.to_json()
        if self.diff_summary is not None:
            d["diffSummary"] = self.diff_summary.to_json()
        if self.error_message is not None:
            d["errorMessage"] = self.error_message
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Artifact":
        return cls(
            status=d["status"],
            manifest=Manifest.from_json(d["manifest"]),
            file_ref=ModelRef.from_json(d["fileRef"]) if d.get("fileRef") else None,
            logical_result=d.get("logicalResult"),
            diff_raw=DiffRaw.from_json(d["diffRaw"]) if d.get("diffRaw") else None,
            diff_summary=DiffSummary.from_json(d["diffSummary"]) if d.get("diffSummary") else None,
            error_message=d.get("errorMessage"),
        )


@dataclass(frozen=True)
class ChatArtifact:
    status: str
    summary_line: str
    truncated: bool = False
    file_ref: ModelRef | None = None
    diff_summary: DiffSummary | None = None
    logical_result: Any = None

    def to_json(self) -> dict:
        d: dict[str, Any] = {"status": self.status, "summaryLine": self.summary_line, "truncated": self.truncated}
        if self.file_ref is not None:
            d["fileRef"] = self.file_ref.to_json()
        if self.diff_summary is not None:
            d["diffSummary"] = self.diff_summary.to_json()
        if self.logical_result is not None:
            d["logicalResult"] = self.logical_result
        return d

    @classmethod
    def from_json(cls, d: dict) -> "ChatArtifact":
        return cls(
            status=d["status"],
            summary_line=d["summaryLine"],
            truncated=d.get("truncated", False),
            file_ref=ModelRef.from_json(d["fileRef"]) if d.get("fileRef") else None,
            diff_summary=DiffSummary.from_json(d["diffSummary"]) if d.get("diffSummary") else None,
            logical_result=d.get("logicalResult"),
        )


DEFAULT_CHAT_BUDGET = 4096
MIN_CHAT_BUDGET = 256


def summarize_diff(diff: DiffRaw) -> DiffSummary:
    """Aggregate raw entries into per-type and total counts. Order-insensitive."""
    per_type: dict[str, dict[str, int]] = {}
    totals = {"added": 0, "removed": 0, "modified": 0}
    for entry in diff.entries:
        counts = per_type.setdefault(entry.entity_type, {"added": 0, "removed": 0, "modified": 0})
        counts[entry.change_kind] += 1
        totals[entry.change_kind] += 1
    return DiffSummary(
        per_type={t: TypeCounts(**c) for t, c in per_type.items()},
        totals=TypeCounts(**totals),
    )


def _encoded_size(chat: ChatArtifact) -> int:
    return len(json.dumps(chat.to_json(), separators=(",", ":"), ensure_ascii=False).encode("utf-8"))


def _clip_utf8(s: str, max_bytes: int) -> str:
    raw = s.encode("utf-8")[: max(max_bytes, 0)]
    return raw.decode("utf-8", errors="ignore")


def summary_line_for(a: Artifact) -> str:
    tool = a.manifest.tool_name
    if a.status == "error":
        return f"{tool} failed: {a.error_message or 'unknown error'}"
    if a.manifest.operation in ("create", "modify"):
        t = a.diff_summary.totals if a.diff_summary else TypeCounts()
        where = f" -> {a.file_ref}" if a.file_ref else ""
        return f"{tool} ok: +{t.added} -{t.removed} ~{t.modified} entities{where}"
    return f"{tool} ok"


def _fit_text(budget: int, build, text: str) -> ChatArtifact | None:
    """Shrink a text payload until the built artifact encodes within budget.

    JSON escaping inflates the payload unpredictably, so measure the real
    encoded size and shave off the overshoot until it fits (or give up).
    """
    room = budget
    while room > 0:
        candidate = build(_clip_utf8(text, room))
        over = _encoded_size(candidate) - budget
        if over <= 0:
            return candidate
        room -= over
    candidate = build("")
    return candidate if _encoded_size(candidate) <= budget else None


def to_chat_artifact(a: Artifact, budget: int = DEFAULT_CHAT_BUDGET) -> ChatArtifact:
    """Compact an Artifact for the conversation context.

    Drops diffRaw always; trims logicalResult (then diffSummary, then the
    summary line) until the compact JSON encoding fits the byte budget.
    """
    if budget < MIN_CHAT_BUDGET:
        raise ValueError(f"chat budget must be at least {MIN_CHAT_BUDGET} bytes")

    line = summary_line_for(a)
    diff_summary = a.diff_summary if a.status == "ok" else None
    full = ChatArtifact(a.status, line, False, a.file_ref, diff_summary, a.logical_result)
    if _encoded_size(full) <= budget:
        return full

    encoded = (
        json.dumps(a.logical_result, separators=(",", ":"), ensure_ascii=False)
        if a.logical_result is not None
        else None
    )
    if encoded is not None:
        # replace the payload with a string prefix of its compact encoding
        chat = _fit_text(budget, lambda t: ChatArtifact(a.status, line, True, a.file_ref, diff_summary, t), encoded)
        if chat is not None:
            return chat
    if diff_summary is not None:
        if encoded is not None:
            chat = _fit_text(budget, lambda t: ChatArtifact(a.status, line, True, a.file_ref, None, t), encoded)
        else:
            bare = ChatArtifact(a.status, line, True, a.file_ref, None, None)
            chat = bare if _encoded_size(bare) <= budget else None
        if chat is not None:
            return chat

    chat = _fit_text(budget, lambda t: ChatArtifact(a.status, t, True, a.file_ref, None, None), line)
    if chat is None:
        raise ValueError("chat budget too small for the file reference")
    return chat
