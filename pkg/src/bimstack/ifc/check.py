"""Structural model validation.

Five rules: attribute arity against the bundled class table, no dangling
references, exactly one project, every product reachable from the project
through the spatial/feature relationship graph, and GlobalId uniqueness.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import schema_table
from .guid import is_guid
from .model import IfcModel
from .values import Ref


@dataclass(frozen=True)
class Violation:
    code: str  # arity | dangling-ref | project-count | unreachable-product | guid
    message: str
    entity_id: int | None = None

    def to_json(self) -> dict:
        d: dict = {"code": self.code, "message": self.message}
        if self.entity_id is not None:
            d["entityId"] = self.entity_id
        return d


@dataclass(frozen=True)
class CheckReport:
    passed: bool
    violations: tuple[Violation, ...]

    def to_json(self) -> dict:
        return {"passed": self.passed, "violations": [v.to_json() for v in self.violations]}


# relationship attrs that parent spatial/feature graph edges:
# (type, one-or-many parent attr, one-or-many child attr)
_EDGE_RELS = {
    "IFCRELAGGREGATES": (4, 5),  # RelatingObject -> RelatedObjects
    "IFCRELCONTAINEDINSPATIALSTRUCTURE": (5, 4),  # RelatingStructure -> RelatedElements
    "IFCRELVOIDSELEMENT": (4, 5),  # RelatingBuildingElement -> RelatedOpeningElement
    "IFCRELFILLSELEMENT": (4, 5),  # RelatingOpeningElement -> RelatedBuildingElement
}


def _ref_targets(value) -> list[int]:
    if isinstance(value, Ref):
        return [value.target]
    if isinstance(value, tuple):
        out = []
        for v in value:
            out.extend(_ref_targets(v))
        return out
    return []


def schema_check(model: IfcModel) -> CheckReport:
    violations: list[Violation] = []

    # (a) arity for classes the table knows
    for eid in sorted(model.entities):
        e = model.entities[eid]
        names = schema_table.attr_names(e.type_name)
        if names is not None and len(e.attrs) != len(names):
            violations.append(
                Violation("arity", f"{e.type_name} takes {len(names)} attributes, found {len(e.attrs)}", eid)
            )

    # (b) dangling references
    for eid in sorted(model.entities):
        for target in model.refs_of(model.entities[eid]):
            if target not in model.entities:
                violations.append(Violation("dangling-ref", f"#{eid} references missing instance #{target}", eid))

    # (c) exactly one project
    projects = model.by_type("IFCPROJECT")
    if len(projects) != 1:
        violations.append(Violation("project-count", f"expected exactly one IfcProject, found {len(projects)}"))

    # (d) product reachability from the project over containment edges
    if projects:
        reachable: set[int] = set()
        frontier = [p.eid for p in projects]
        reachable.update(frontier)
        edges: dict[int, list[int]] = {}
        for e in model.entities.values():
            spec = _EDGE_RELS.get(e.type_name)
            if spec is None:
                continue
            parent_idx, child_idx = spec
            if len(e.attrs) <= max(parent_idx, child_idx):
                continue
            for parent in _ref_targets(e.attrs[parent_idx]):
                edges.setdefault(parent, []).extend(_ref_targets(e.attrs[child_idx]))
        while frontier:
            nxt = []
            for eid in frontier:
                for child in edges.get(eid, ()):
                    if child not in reachable:
                        reachable.add(child)
                        nxt.append(child)
            frontier = nxt
        for eid in sorted(model.entities):
            e = model.entities[eid]
            if schema_table.is_subtype(e.type_name, "IFCPRODUCT") and eid not in reachable:
                violations.append(Violation("unreachable-product", f"{e.type_name} #{eid} is not contained in the spatial structure", eid))

    # (e) GlobalId validity and uniqueness
    seen: dict[str, int] = {}
    for eid in sorted(model.entities):
        e = model.entities[eid]
        if not schema_table.is_rooted(e.type_name):
            continue
        gid = e.attrs[0] if e.attrs else None
        if not is_guid(gid):
            violations.append(Violation("guid", f"{e.type_name} #{eid} lacks a valid 22-char GlobalId", eid))
            continue
        if gid in seen:
            violations.append(Violation("guid", f"GlobalId {gid} shared by #{seen[gid]} and #{eid}", eid))
        else:
            seen[gid] = eid

    return CheckReport(passed=not violations, violations=tuple(violations))
