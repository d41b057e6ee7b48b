"""Backend contract for the model execution service.

The executor never touches model internals itself: every operation goes
through this interface, so swapping the backend cannot change the wire
behavior of the service. Handles are opaque to the caller and must be
treated as immutable snapshots: ``run_high_level`` and ``run_batch``
return a new handle and leave the input handle untouched.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any

from .wire import DiffRaw


class AdapterError(Exception):
    """Tool-level failure; the executor turns it into an error artifact."""


class BimAdapter(ABC):
    @abstractmethod
    def backend_id(self) -> str:
        """Stable identifier recorded in artifact manifests."""

    @abstractmethod
    def new_model(self) -> Any:
        """Handle for an empty model, the starting point for create tools."""

    @abstractmethod
    def load_model(self, data: bytes) -> Any:
        """Parse serialized model bytes into a handle.

        Raises AdapterError if the bytes are not a model this backend reads.
        """

    @abstractmethod
    def save_model(self, handle: Any) -> bytes:
        """Serialize a handle back to bytes."""

    @abstractmethod
    def run_high_level(self, tool_name: str, params: dict, handle: Any) -> tuple[Any, dict]:
        """Apply a named tool; returns (new handle, logical result).

        Raises AdapterError with a user-facing message on any tool failure,
        in which case the input handle must remain valid and unchanged.
        """

    @abstractmethod
    def run_batch(self, ops: list[dict], handle: Any) -> tuple[Any, dict]:
        """Apply a list of low-level ops atomically; same contract as above."""

    @abstractmethod
    def diff(self, old_handle: Any, new_handle: Any) -> DiffRaw:
        """Structural diff between two handles."""

    def capabilities(self) -> dict:
        """Feature flags surfaced in manifests; backends override to restrict."""
        return {"diff": "entity"}
