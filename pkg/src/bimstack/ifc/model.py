"""In-memory IFC entity graph."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from . import schema_table
from .guid import is_guid
from .values import Ref, SpfValue

SUPPORTED_SCHEMAS = ("IFC4", "IFC2X3")

DEFAULT_TIMESTAMP = "2024-01-01T00:00:00"


@dataclass
class IfcHeader:
    description: str = ""
    name: str = ""
    timestamp: str = DEFAULT_TIMESTAMP
    authoring_tool: str = "bimstack"
    schema_id: str = "IFC4"


@dataclass
class IfcEntity:
    eid: int
    type_name: str
    attrs: list[SpfValue] = field(default_factory=list)

    def global_id(self) -> str | None:
        """GlobalId when this is a rooted instance, else None."""
        if not schema_table.is_rooted(self.type_name):
            return None
        if self.attrs and is_guid(self.attrs[0]):
            return self.attrs[0]  # type: ignore[return-value]
        return None


class IfcModel:
    """A parsed model: header plus an id-keyed entity map.

    Single-writer by convention; copy() before speculative mutation.
    """

    def __init__(self, header: IfcHeader | None = None):
        self.header = header or IfcHeader()
        self.entities: dict[int, IfcEntity] = {}
        self.next_id = 1

    def add(self, type_name: str, attrs: list[SpfValue]) -> IfcEntity:
        ent = IfcEntity(self.next_id, type_name.upper(), attrs)
        self.entities[ent.eid] = ent
        self.next_id += 1
        return ent

    def put(self, ent: IfcEntity) -> IfcEntity:
        """Insert an entity with a caller-chosen id (parser use)."""
        self.entities[ent.eid] = ent
        if ent.eid >= self.next_id:
            self.next_id = ent.eid + 1
        return ent

    def get(self, eid: int) -> IfcEntity:
        return self.entities[eid]

    def delete(self, eid: int) -> None:
        del self.entities[eid]

    def by_type(self, type_name: str, subtypes: bool = True) -> list[IfcEntity]:
        """Entities of a type (optionally its subtypes), ordered by id."""
        wanted = type_name.upper()
        names = schema_table.subtype_closure(wanted) if subtypes else {wanted}
        return [e for eid, e in sorted(self.entities.items()) if e.type_name in names]

    def find_by_guid(self, guid: str) -> IfcEntity | None:
        for _, e in sorted(self.entities.items()):
            if e.global_id() == guid:
                return e
        return None

    def used_guids(self) -> set[str]:
        return {g for e in self.entities.values() if (g := e.global_id())}

    def refs_of(self, ent: IfcEntity) -> list[int]:
        out: list[int] = []

        def walk(v: SpfValue) -> None:
            if isinstance(v, Ref):
                out.append(v.target)
            elif isinstance(v, tuple):
                for x in v:
                    walk(x)
            elif hasattr(v, "value"):  # Typed
                walk(v.value)  # type: ignore[union-attr]

        for a in ent.attrs:
            walk(a)
        return out

    def copy(self) -> "IfcModel":
        m = IfcModel(copy.deepcopy(self.header))
        m.entities = {eid: IfcEntity(e.eid, e.type_name, copy.deepcopy(e.attrs)) for eid, e in self.entities.items()}
        m.next_id = self.next_id
        return m

    def __len__(self) -> int:
        return len(self.entities)
