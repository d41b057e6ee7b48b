"""Native IFC substrate: STEP file parsing, entity graph, queries, diffing."""

from .model import IfcEntity, IfcHeader, IfcModel
from .spf import SpfParseError, parse_spf, serialize_spf
from .values import DERIVED, EnumVal, Ref, Typed

__all__ = [
    "DERIVED",
    "EnumVal",
    "IfcEntity",
    "IfcHeader",
    "IfcModel",
    "Ref",
    "SpfParseError",
    "Typed",
    "parse_spf",
    "serialize_spf",
]
