"""Native backend: the in-process IFC engine behind the adapter contract."""

from __future__ import annotations

import json

from .adapter import AdapterError, BimAdapter
from .generate import (
    HIGH_LEVEL_TOOLS,
    QUERY_TOOLS,
    ModelBuilder,
    ToolError,
    guid_source,
    run_tool,
)
from .ifc.diff import entity_diff
from .ifc.model import IfcModel
from .ifc.spf import SpfParseError, parse_spf, serialize_spf
from .wire import DiffRaw


def _guid_seed(tool_name: str, params: dict) -> str:
    # deterministic mode derives the GlobalId stream from the call itself
    return tool_name + "\n" + json.dumps(params, sort_keys=True, separators=(",", ":"))


class NativeAdapter(BimAdapter):
    def backend_id(self) -> str:
        return "native-ifc"

    def new_model(self) -> IfcModel:
        return IfcModel()

    def load_model(self, data: bytes) -> IfcModel:
        try:
            return parse_spf(data.decode("utf-8"))
        except (SpfParseError, UnicodeDecodeError) as exc:
            raise AdapterError(f"cannot parse model: {exc}") from exc

    def save_model(self, handle: IfcModel) -> bytes:
        return serialize_spf(handle).encode("utf-8")

    def run_high_level(self, tool_name: str, params: dict, handle: IfcModel) -> tuple[IfcModel, dict]:
        if tool_name not in HIGH_LEVEL_TOOLS and tool_name not in QUERY_TOOLS:
            raise AdapterError(f"unknown tool: {tool_name}")
        builder = ModelBuilder(handle.copy(), guids=guid_source(_guid_seed(tool_name, params)))
        try:
            logical = run_tool(builder, tool_name, params)
        except ToolError as exc:
            raise AdapterError(str(exc)) from exc
        return builder.model, logical

    def run_batch(self, ops: list[dict], handle: IfcModel) -> tuple[IfcModel, dict]:
        builder = ModelBuilder(handle.copy(), guids=guid_source(_guid_seed("run_batch", {"ops": ops})))
        try:
            logical = builder.run_batch(ops)
        except ToolError as exc:
            raise AdapterError(str(exc)) from exc
        return builder.model, logical

    def diff(self, old_handle: IfcModel, new_handle: IfcModel) -> DiffRaw:
        return entity_diff(old_handle, new_handle)
