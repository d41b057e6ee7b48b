"""Agent-facing JSON-RPC endpoint: tool catalogue, sessions, dispatch."""

from .catalog import CATALOG, ToolDescriptor, descriptor_for
from .server import McpServer, make_service

__all__ = ["CATALOG", "ToolDescriptor", "descriptor_for", "McpServer", "make_service"]
