"""Query selector: type plus attribute/property-set equality filters.

Grammar: ``TypeName (',' filter)*`` where a filter is either
``AttrName = literal`` or ``PsetName.PropName = literal``. Literals are
quoted strings, numbers, TRUE/FALSE, or bare text running to the next
comma. Type matching includes subtypes known to the bundled hierarchy.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import schema_table
from .model import IfcEntity, IfcModel
from .values import EnumVal, Ref, SpfValue, Typed


class SelectorError(ValueError):
    pass


@dataclass(frozen=True)
class Filter:
    name: str  # attribute name, or property name when pset is set
    value: object  # str | int | float | bool
    pset: str | None = None


@dataclass(frozen=True)
class Selector:
    type_name: str
    filters: tuple[Filter, ...] = ()


def _parse_literal(text: str) -> object:
    text = text.strip()
    if not text:
        raise SelectorError("empty literal")
    if text[0] in "'\"":
        quote = text[0]
        if len(text) < 2 or text[-1] != quote:
            raise SelectorError(f"unterminated string literal: {text}")
        return text[1:-1].replace(quote * 2, quote)
    if text.upper() == "TRUE":
        return True
    if text.upper() == "FALSE":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text  # bare string literal


def parse_selector(text: str) -> Selector:
    if not isinstance(text, str) or not text.strip():
        raise SelectorError("selector must be a non-empty string")
    parts = text.split(",")
    type_name = parts[0].strip()
    if not type_name or not type_name.replace("_", "").isalnum() or not type_name[0].isalpha():
        raise SelectorError(f"malformed type name: {parts[0].strip()!r}")
    filters = []
    for part in parts[1:]:
        if "=" not in part:
            raise SelectorError(f"filter must look like Name=value: {part.strip()!r}")
        lhs, rhs = part.split("=", 1)
        lhs = lhs.strip()
        value = _parse_literal(rhs)
        if "." in lhs:
            pset, _, prop = lhs.partition(".")
            pset, prop = pset.strip(), prop.strip()
            if not pset or not prop:
                raise SelectorError(f"malformed property filter: {lhs!r}")
            filters.append(Filter(prop, value, pset=pset))
        else:
            if not lhs:
                raise SelectorError("missing attribute name in filter")
            filters.append(Filter(lhs, value))
    return Selector(type_name.upper(), tuple(filters))


def _unwrap(v: SpfValue) -> SpfValue:
    return v.value if isinstance(v, Typed) else v


def _value_matches(attr: SpfValue, wanted: object) -> bool:
    attr = _unwrap(attr)
    if isinstance(wanted, bool):
        return isinstance(attr, EnumVal) and attr.name == ("T" if wanted else "F")
    if isinstance(wanted, (int, float)):
        return isinstance(attr, (int, float)) and not isinstance(attr, bool) and attr == wanted
    if isinstance(wanted, str):
        if isinstance(attr, str):
            return attr == wanted
        if isinstance(attr, EnumVal):
            return attr.name == wanted
    return False


def _attr_filter_hits(e: IfcEntity, f: Filter) -> bool:
    names = schema_table.attr_names(e.type_name)
    if names is None or f.name not in names:
        return False
    idx = names.index(f.name)
    if idx >= len(e.attrs):
        return False
    return _value_matches(e.attrs[idx], f.value)


def _pset_filter_hits(model: IfcModel, e: IfcEntity, f: Filter) -> bool:
    for rel in model.by_type("IFCRELDEFINESBYPROPERTIES", subtypes=False):
        if len(rel.attrs) < 6:
            continue
        related, definition = rel.attrs[4], rel.attrs[5]
        if not isinstance(related, tuple) or Ref(e.eid) not in related:
            continue
        if not isinstance(definition, Ref) or definition.target not in model.entities:
            continue
        pset = model.entities[definition.target]
        if pset.type_name != "IFCPROPERTYSET" or len(pset.attrs) < 5 or pset.attrs[2] != f.pset:
            continue
        props = pset.attrs[4]
        if not isinstance(props, tuple):
            continue
        for ref in props:
            if not isinstance(ref, Ref) or ref.target not in model.entities:
                continue
            prop = model.entities[ref.target]
            if prop.type_name == "IFCPROPERTYSINGLEVALUE" and len(prop.attrs) >= 3 and prop.attrs[0] == f.name:
                if _value_matches(prop.attrs[2], f.value):
                    return True
    return False


def select(model: IfcModel, selector: str | Selector) -> list[IfcEntity]:
    """Entities matching the selector, in ascending id order."""
    sel = parse_selector(selector) if isinstance(selector, str) else selector

    # attribute names must resolve against the queried type when it is known
    known_names = schema_table.attr_names(sel.type_name)
    for f in sel.filters:
        if f.pset is None:
            if known_names is None:
                raise SelectorError(f"cannot resolve attribute {f.name!r} on unknown type {sel.type_name}")
            if f.name not in known_names:
                raise SelectorError(f"unknown attribute {f.name!r} for {sel.type_name}")

    out = []
    for e in model.by_type(sel.type_name):
        ok = True
        for f in sel.filters:
            hit = _pset_filter_hits(model, e, f) if f.pset is not None else _attr_filter_hits(e, f)
            if not hit:
                ok = False
                break
        if ok:
            out.append(e)
    return out
