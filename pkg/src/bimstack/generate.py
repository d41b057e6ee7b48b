"""High-level IFC modelling verbs over the in-memory entity graph.

ModelBuilder applies one tool call to one model in place: project
bootstrap, georeferencing, storeys, swept-solid walls and slabs, hosted
openings (doors, windows), property sets, selector-based deletion, and a
low-level op batch for direct entity surgery. Geometry is SI meters;
angles arrive in degrees. Callers wanting all-or-nothing semantics run
tools against a copy and keep the original on ToolError.
"""

from __future__ import annotations

import math
import os
import time
from fractions import Fraction

from .ifc import schema_table
from .ifc.guid import SeededGuids, is_guid, new_guid
from .ifc.model import DEFAULT_TIMESTAMP, IfcEntity, IfcHeader, IfcModel
from .ifc.selector import SelectorError, select
from .ifc.values import DERIVED, EnumVal, Ref, Typed

# epoch second for 2024-01-01T00:00:00Z, the pinned header timestamp
FIXED_CREATION_DATE = 1704067200


class ToolError(Exception):
    """Tool precondition violation; the message is safe to surface."""


def deterministic_mode() -> bool:
    return os.environ.get("TEST_DETERMINISTIC") == "1"


class RandomGuids:
    def next(self, used: set[str] | None = None) -> str:
        while True:
            g = new_guid()
            if used is None or g not in used:
                return g


def guid_source(seed_material: str) -> SeededGuids | RandomGuids:
    """Seeded stream in deterministic mode, random otherwise."""
    if deterministic_mode():
        return SeededGuids(seed_material)
    return RandomGuids()


def degrees_to_dms(deg: float) -> tuple[int, int, int, int]:
    """Decimal degrees to (degrees, minutes, seconds, millionth-seconds).

    All components carry the sign of the input, the compound plane angle
    convention. Exact integer arithmetic avoids drift at component edges.
    """
    total = round(Fraction(abs(deg)) * 3_600_000_000)
    micro, total = total % 1_000_000, total // 1_000_000
    sec, total = total % 60, total // 60
    minute, degree = total % 60, total // 60
    parts = (int(degree), int(minute), int(sec), int(micro))
    if deg < 0:
        parts = tuple(-p for p in parts)  # type: ignore[assignment]
    return parts  # type: ignore[return-value]


def json_to_value(v):
    """JSON encoding of an SPF attribute value to the in-memory form.

    null -> $; true/false -> .T./.F.; {"ref": id} -> #id; {"enum": name};
    {"typed": [name, value]}; {"derived": true} -> *; arrays -> aggregates.
    """
    if isinstance(v, bool):
        return EnumVal("T" if v else "F")
    if v is None or isinstance(v, (int, float, str)):
        return v
    if isinstance(v, list):
        return tuple(json_to_value(x) for x in v)
    if isinstance(v, dict):
        if set(v) == {"ref"}:
            if not isinstance(v["ref"], int):
                raise ToolError("ref must be an integer entity id")
            return Ref(v["ref"])
        if set(v) == {"enum"}:
            return EnumVal(str(v["enum"]).upper())
        if set(v) == {"typed"}:
            name, inner = v["typed"]
            return Typed(str(name).upper(), json_to_value(inner))
        if set(v) == {"derived"}:
            return DERIVED
        raise ToolError(f"unrecognized value object: {sorted(v)}")
    raise ToolError(f"unsupported value: {type(v).__name__}")


def value_to_json(v):
    if isinstance(v, Ref):
        return {"ref": v.target}
    if isinstance(v, EnumVal):
        return {"enum": v.name}
    if isinstance(v, Typed):
        return {"typed": [v.type_name, value_to_json(v.value)]}
    if v is DERIVED:
        return {"derived": True}
    if isinstance(v, tuple):
        return [value_to_json(x) for x in v]
    return v


def _typed_property_value(value) -> Typed:
    if isinstance(value, bool):
        return Typed("IFCBOOLEAN", EnumVal("T" if value else "F"))
    if isinstance(value, int):
        return Typed("IFCINTEGER", value)
    if isinstance(value, float):
        return Typed("IFCREAL", value)
    if isinstance(value, str):
        return Typed("IFCLABEL", value)
    raise ToolError(f"property value must be bool, number, or string, not {type(value).__name__}")


def _num(value, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ToolError(f"{what} must be a number")
    return float(value)

def _positive(value, what: str) -> float:
    x = _num(value, what)
    if x <= 0:
        raise ToolError(f"{what} must be strictly positive")
    return x


def _xy(value, what: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ToolError(f"{what} must be an [x, y] pair in meters")
    return _num(value[0], f"{what}[0]"), _num(value[1], f"{what}[1]")


class ModelBuilder:
    def __init__(self, model: IfcModel | None = None, guids=None):
        self.model = model if model is not None else self._empty_model()
        self.guids = guids if guids is not None else RandomGuids()

    @staticmethod
    def _empty_model() -> IfcModel:
        ts = DEFAULT_TIMESTAMP if deterministic_mode() else time.strftime("%Y-%m-%dT%H:%M:%S")
        return IfcModel(IfcHeader(description="", name="model.ifc", timestamp=ts))

    # -- plumbing ----------------------------------------------------------

    def _add(self, type_name: str, *attrs) -> IfcEntity:
        return self.model.add(type_name, list(attrs))

    def _new_guid(self) -> str:
        return self.guids.next(self.model.used_guids())

    def _singleton(self, type_name: str, label: str) -> IfcEntity:
        found = self.model.by_type(type_name, subtypes=False)
        if not found:
            raise ToolError(f"model has no {label}")
        return found[0]

    def resolve_ref(self, ref, expected_type: str, what: str) -> IfcEntity:
        """Accepts a GlobalId or a selector expression matching exactly one entity."""
        if not isinstance(ref, str) or not ref:
            raise ToolError(f"{what} must be a GlobalId or selector string")
        if is_guid(ref):
            ent = self.model.find_by_guid(ref)
            if ent is None:
                raise ToolError(f"no entity with GlobalId {ref}")
            hits = [ent]
        else:
            try:
                hits = select(self.model, ref)
            except SelectorError as exc:
                raise ToolError(f"bad {what} selector: {exc}") from None
            if not hits:
                raise ToolError(f"{what} selector matched nothing: {ref}")
            if len(hits) > 1:
                raise ToolError(f"{what} selector is ambiguous ({len(hits)} matches): {ref}")
        ent = hits[0]
        wanted = expected_type.upper()
        if not schema_table.is_subtype(ent.type_name, wanted):
            raise ToolError(f"{what} resolves to {ent.type_name}, expected {wanted}")
        return ent

    def _owner_history(self) -> Ref | None:
        hist = self.model.by_type("IFCOWNERHISTORY", subtypes=False)
        return Ref(hist[0].eid) if hist else None

    def _point(self, *coords) -> Ref:
        return Ref(self._add("IFCCARTESIANPOINT", tuple(float(c) for c in coords)).eid)

    def _direction(self, *coords) -> Ref:
        return Ref(self._add("IFCDIRECTION", tuple(float(c) for c in coords)).eid)

    def _axis2d(self, x: float, y: float) -> Ref:
        return Ref(self._add("IFCAXIS2PLACEMENT2D", self._point(x, y), None).eid)

    def _axis3d(self, origin=(0.0, 0.0, 0.0), axis: Ref | None = None, refdir: Ref | None = None) -> Ref:
        return Ref(self._add("IFCAXIS2PLACEMENT3D", self._point(*origin), axis, refdir).eid)

    def _local_placement(self, rel_to: Ref | None, axis: Ref) -> Ref:
        return Ref(self._add("IFCLOCALPLACEMENT", rel_to, axis).eid)

    def _placement_of(self, ent: IfcEntity) -> Ref | None:
        pl = ent.attrs[5] if len(ent.attrs) > 5 else None
        return pl if isinstance(pl, Ref) else None

    def _body_context(self) -> Ref:
        for sub in self.model.by_type("IFCGEOMETRICREPRESENTATIONSUBCONTEXT", subtypes=False):
            if sub.attrs and sub.attrs[0] == "Body":
                return Ref(sub.eid)
        ctxs = self.model.by_type("IFCGEOMETRICREPRESENTATIONCONTEXT", subtypes=False)
        if not ctxs:
            raise ToolError("model has no geometric representation context")
        return Ref(ctxs[0].eid)

    def _box_shape(self, xdim: float, ydim: float, zdim: float) -> Ref:
        """Swept-solid box: x spans [0, xdim], y centered, z spans [0, zdim]."""
        profile = self._add(
            "IFCRECTANGLEPROFILEDEF",
            EnumVal("AREA"), None, self._axis2d(xdim / 2.0, 0.0), float(xdim), float(ydim),
        )
        solid = self._add(
            "IFCEXTRUDEDAREASOLID", Ref(profile.eid), None, self._direction(0.0, 0.0, 1.0), float(zdim)
        )
        shape = self._add(
            "IFCSHAPEREPRESENTATION", self._body_context(), "Body", "SweptSolid", (Ref(solid.eid),)
        )
        return Ref(self._add("IFCPRODUCTDEFINITIONSHAPE", None, None, (Ref(shape.eid),)).eid)

    def _contain_in(self, storey: IfcEntity, element: IfcEntity) -> None:
        for rel in self.model.by_type("IFCRELCONTAINEDINSPATIALSTRUCTURE", subtypes=False):
            if rel.attrs[5] == Ref(storey.eid):
                rel.attrs[4] = tuple(rel.attrs[4] or ()) + (Ref(element.eid),)
                return
        self._add(
            "IFCRELCONTAINEDINSPATIALSTRUCTURE",
            self._new_guid(), self._owner_history(), None, None,
            (Ref(element.eid),), Ref(storey.eid),
        )

    def _aggregate(self, parent: IfcEntity, child: IfcEntity) -> None:
        for rel in self.model.by_type("IFCRELAGGREGATES", subtypes=False):
            if rel.attrs[4] == Ref(parent.eid):
                rel.attrs[5] = tuple(rel.attrs[5] or ()) + (Ref(child.eid),)
                return
        self._add(
            "IFCRELAGGREGATES",
            self._new_guid(), self._owner_history(), None, None,
            Ref(parent.eid), (Ref(child.eid),),
        )

    # -- high-level tools ---------------------------------------------------

    def create_project(self, name, site_name="Site", building_name="Building") -> dict:
        if not isinstance(name, str) or not name:
            raise ToolError("project name must be a non-empty string")
        if self.model.by_type("IFCPROJECT", subtypes=False):
            raise ToolError("model already has an IfcProject")
        creation = FIXED_CREATION_DATE if deterministic_mode() else int(time.time())

        person = self._add("IFCPERSON", None, None, None, None, None, None, None, None)
        org = self._add("IFCORGANIZATION", None, "bimstack", None, None, None)
        pao = self._add("IFCPERSONANDORGANIZATION", Ref(person.eid), Ref(org.eid), None)
        app = self._add("IFCAPPLICATION", Ref(org.eid), "0", "bimstack", "bimstack")
        hist = self._add(
            "IFCOWNERHISTORY",
            Ref(pao.eid), Ref(app.eid), None, EnumVal("ADDED"), None, None, None, creation,
        )
        oh = Ref(hist.eid)

        units = []
        for unit_type, unit_name in (
            ("LENGTHUNIT", "METRE"),
            ("AREAUNIT", "SQUARE_METRE"),
            ("VOLUMEUNIT", "CUBIC_METRE"),
            ("PLANEANGLEUNIT", "RADIAN"),
        ):
            units.append(Ref(self._add("IFCSIUNIT", DERIVED, EnumVal(unit_type), None, EnumVal(unit_name)).eid))
        unit_assignment = self._add("IFCUNITASSIGNMENT", tuple(units))

        wcs = self._axis3d()
        ctx = self._add("IFCGEOMETRICREPRESENTATIONCONTEXT", None, "Model", 3, 1e-5, wcs, None)
        self._add(
            "IFCGEOMETRICREPRESENTATIONSUBCONTEXT",
            "Body", "Model", DERIVED, DERIVED, DERIVED, DERIVED,
            Ref(ctx.eid), None, EnumVal("MODEL_VIEW"), None,
        )

        project_guid, site_guid, building_guid = (self._new_guid() for _ in range(3))
        project = self._add(
            "IFCPROJECT",
            project_guid, oh, name, None, None, None, None, (Ref(ctx.eid),), Ref(unit_assignment.eid),
        )
        site_pl = self._local_placement(None, self._axis3d())
        site = self._add(
            "IFCSITE",
            site_guid, oh, str(site_name), None, None, site_pl, None, None,
            EnumVal("ELEMENT"), None, None, None, None, None,
        )
        building_pl = self._local_placement(site_pl, self._axis3d())
        building = self._add(
            "IFCBUILDING",
            building_guid, oh, str(building_name), None, None, building_pl, None, None,
            EnumVal("ELEMENT"), None, None, None,
        )
        self._aggregate(project, site)
        self._aggregate(site, building)
        return {"projectId": project_guid, "siteId": site_guid, "buildingId": building_guid}

    def georeference(self, latitude, longitude, elevation, true_north=0.0) -> dict:
        lat = _num(latitude, "latitude")
        lon = _num(longitude, "longitude")
        elev = _num(elevation, "elevation")
        north = _num(true_north, "trueNorth")
        if not -90.0 <= lat <= 90.0:
            raise ToolError("latitude must be within [-90, 90] degrees")
        if not -180.0 <= lon <= 180.0:
            raise ToolError("longitude must be within [-180, 180] degrees")
        site = self._singleton("IFCSITE", "IfcSite")
        lat_dms = degrees_to_dms(lat)
        lon_dms = degrees_to_dms(lon)
        site.attrs[9] = lat_dms
        site.attrs[10] = lon_dms
        site.attrs[11] = elev
        ctx = self._singleton("IFCGEOMETRICREPRESENTATIONCONTEXT", "geometric representation context")
        rad = math.radians(north)
        ctx.attrs[5] = self._direction(math.sin(rad), math.cos(rad))
        return {
            "siteId": site.global_id(),
            "refLatitude": list(lat_dms),
            "refLongitude": list(lon_dms),
            "refElevation": elev,
        }

    def add_storey(self, name, elevation) -> dict:
        if not isinstance(name, str) or not name:
            raise ToolError("storey name must be a non-empty string")
        elev = _num(elevation, "elevation")
        building = self._singleton("IFCBUILDING", "IfcBuilding")
        guid = self._new_guid()
        pl = self._local_placement(self._placement_of(building), self._axis3d((0.0, 0.0, elev)))
        storey = self._add(
            "IFCBUILDINGSTOREY",
            guid, self._owner_history(), name, None, None, pl, None, None,
            EnumVal("ELEMENT"), elev,
        )
        self._aggregate(building, storey)
        return {"storeyId": guid, "name": name, "elevation": elev}

    def create_wall(self, storey_ref, start, end, height, thickness, name=None) -> dict:
        storey = self.resolve_ref(storey_ref, "IFCBUILDINGSTOREY", "storeyRef")
        sx, sy = _xy(start, "start")
        ex, ey = _xy(end, "end")
        h = _positive(height, "height")
        t = _positive(thickness, "thickness")
        length = math.hypot(ex - sx, ey - sy)
        if length <= 0.0:
            raise ToolError("wall start and end coincide")
        guid = self._new_guid()
        ux, uy = (ex - sx) / length, (ey - sy) / length
        pl = self._local_placement(
            self._placement_of(storey),
            self._axis3d((sx, sy, 0.0), self._direction(0.0, 0.0, 1.0), self._direction(ux, uy, 0.0)),
        )
        shape = self._box_shape(length, t, h)
        wall_name = name if name else f"Wall-{len(self.model.by_type('IFCWALL')) + 1:03d}"
        wall = self._add(
            "IFCWALL",
            guid, self._owner_history(), wall_name, None, None, pl, shape, None,
            EnumVal("STANDARD"),
        )
        self._contain_in(storey, wall)
        return {"wallId": guid, "name": wall_name, "length": length}

    def create_slab(self, storey_ref, polygon, thickness, name=None) -> dict:
        storey = self.resolve_ref(storey_ref, "IFCBUILDINGSTOREY", "storeyRef")
        t = _positive(thickness, "thickness")
        if not isinstance(polygon, (list, tuple)) or len(polygon) < 3:
            raise ToolError("polygon needs at least 3 [x, y] points")
        pts = [self._point(*_xy(p, f"polygon[{i}]")) for i, p in enumerate(polygon)]
        guid = self._new_guid()
        polyline = self._add("IFCPOLYLINE", tuple(pts) + (pts[0],))
        profile = self._add("IFCARBITRARYCLOSEDPROFILEDEF", EnumVal("AREA"), None, Ref(polyline.eid))
        # floor plate: top face on the storey plane, extruded downward
        solid = self._add(
            "IFCEXTRUDEDAREASOLID", Ref(profile.eid), None, self._direction(0.0, 0.0, -1.0), t
        )
        shape = self._add(
            "IFCSHAPEREPRESENTATION", self._body_context(), "Body", "SweptSolid", (Ref(solid.eid),)
        )
        pds = Ref(self._add("IFCPRODUCTDEFINITIONSHAPE", None, None, (Ref(shape.eid),)).eid)
        pl = self._local_placement(self._placement_of(storey), self._axis3d())
        slab_name = name if name else f"Slab-{len(self.model.by_type('IFCSLAB')) + 1:03d}"
        slab = self._add(
            "IFCSLAB",
            guid, self._owner_history(), slab_name, None, None, pl, pds, None,
            EnumVal("FLOOR"),
        )
        self._contain_in(storey, slab)
        return {"slabId": guid, "name": slab_name}

    def _wall_box(self, wall: IfcEntity) -> tuple[float, float, float]:
        """(length, height, thickness) read back from a swept-rectangle body."""
        pds = wall.attrs[6] if len(wall.attrs) > 6 else None
        if not isinstance(pds, Ref):
            raise ToolError("wall has no body representation")
        for shape_ref in self.model.get(pds.target).attrs[2] or ():
            shape = self.model.get(shape_ref.target)
            if shape.type_name != "IFCSHAPEREPRESENTATION":
                continue
            for item_ref in shape.attrs[3] or ():
                solid = self.model.get(item_ref.target)
                if solid.type_name != "IFCEXTRUDEDAREASOLID":
                    continue
                profile = self.model.get(solid.attrs[0].target)
                if profile.type_name != "IFCRECTANGLEPROFILEDEF":
                    continue
                return float(profile.attrs[3]), float(solid.attrs[3]), float(profile.attrs[4])
        raise ToolError("wall body is not a swept rectangle; cannot host openings")

    def _hosted_opening(self, wall: IfcEntity, offset, width, height, sill: float):
        length, wall_h, wall_t = self._wall_box(wall)
        off = _num(offset, "offset")
        w = _positive(width, "width")
        h = _positive(height, "height")
        if off < 0.0:
            raise ToolError("offset must be non-negative")
        if off + w > length + 1e-9:
            raise ToolError(
                f"opening exceeds wall: offset {off} + width {w} > wall length {length}"
            )
        if sill + h > wall_h + 1e-9:
            raise ToolError(
                f"opening exceeds wall: sill {sill} + height {h} > wall height {wall_h}"
            )
        wall_pl = self._placement_of(wall)
        opening_guid = self._new_guid()
        filler_guid = self._new_guid()
        opening_pl = self._local_placement(wall_pl, self._axis3d((off, 0.0, sill)))
        n = len(self.model.by_type("IFCOPENINGELEMENT", subtypes=False)) + 1
        opening = self._add(
            "IFCOPENINGELEMENT",
            opening_guid, self._owner_history(), f"Opening-{n:03d}", None, None,
            opening_pl, self._box_shape(w, wall_t, h), None, EnumVal("OPENING"),
        )
        self._add(
            "IFCRELVOIDSELEMENT",
            self._new_guid(), self._owner_history(), None, None,
            Ref(wall.eid), Ref(opening.eid),
        )
        filler_pl = self._local_placement(wall_pl, self._axis3d((off, 0.0, sill)))
        filler_shape = self._box_shape(w, wall_t, h)
        return opening_guid, filler_guid, filler_pl, filler_shape, (w, h)

    def add_door(self, wall_ref, offset_along_wall, width, height, name=None) -> dict:
        wall = self.resolve_ref(wall_ref, "IFCWALL", "wallRef")
        opening_guid, door_guid, pl, shape, (w, h) = self._hosted_opening(
            wall, offset_along_wall, width, height, 0.0
        )
        n = len(self.model.by_type("IFCDOOR", subtypes=False)) + 1
        door = self._add(
            "IFCDOOR",
            door_guid, self._owner_history(), name if name else f"Door-{n:03d}", None, None,
            pl, shape, None, h, w, EnumVal("DOOR"), None, None,
        )
        opening = self.model.find_by_guid(opening_guid)
        self._add(
            "IFCRELFILLSELEMENT",
            self._new_guid(), self._owner_history(), None, None,
            Ref(opening.eid), Ref(door.eid),
        )
        return {"doorId": door_guid, "openingId": opening_guid, "width": w, "height": h}

    def add_window(self, wall_ref, offset, width, height, sill_height, name=None) -> dict:
        wall = self.resolve_ref(wall_ref, "IFCWALL", "wallRef")
        sill = _num(sill_height, "sillHeight")
        if sill < 0.0:
            raise ToolError("sillHeight must be non-negative")
        opening_guid, window_guid, pl, shape, (w, h) = self._hosted_opening(
            wall, offset, width, height, sill
        )
        n = len(self.model.by_type("IFCWINDOW", subtypes=False)) + 1
        window = self._add(
            "IFCWINDOW",
            window_guid, self._owner_history(), name if name else f"Window-{n:03d}", None, None,
            pl, shape, None, h, w, EnumVal("WINDOW"), None, None,
        )
        opening = self.model.find_by_guid(opening_guid)
        self._add(
            "IFCRELFILLSELEMENT",
            self._new_guid(), self._owner_history(), None, None,
            Ref(opening.eid), Ref(window.eid),
        )
        return {"windowId": window_guid, "openingId": opening_guid, "sillHeight": sill}

    def set_property(self, selector, pset_name, prop_name, value) -> dict:
        if not isinstance(pset_name, str) or not pset_name:
            raise ToolError("psetName must be a non-empty string")
        if not isinstance(prop_name, str) or not prop_name:
            raise ToolError("propName must be a non-empty string")
        try:
            hits = select(self.model, selector)
        except SelectorError as exc:
            raise ToolError(f"selector error: {exc}") from None
        typed = _typed_property_value(value)
        for e in hits:
            if e.global_id() is None:
                raise ToolError(f"selector matched unrooted {e.type_name}; properties need rooted elements")
            pset = self._pset_of(e, pset_name)
            if pset is None:
                prop = self._add("IFCPROPERTYSINGLEVALUE", prop_name, None, typed, None)
                pset = self._add(
                    "IFCPROPERTYSET",
                    self._new_guid(), self._owner_history(), pset_name, None, (Ref(prop.eid),),
                )
                self._add(
                    "IFCRELDEFINESBYPROPERTIES",
                    self._new_guid(), self._owner_history(), None, None,
                    (Ref(e.eid),), Ref(pset.eid),
                )
                continue
            for prop_ref in pset.attrs[4] or ():
                prop = self.model.get(prop_ref.target)
                if prop.type_name == "IFCPROPERTYSINGLEVALUE" and prop.attrs[0] == prop_name:
                    prop.attrs[2] = typed
                    break
            else:
                prop = self._add("IFCPROPERTYSINGLEVALUE", prop_name, None, typed, None)
                pset.attrs[4] = tuple(pset.attrs[4] or ()) + (Ref(prop.eid),)
        return {"matched": len(hits), "pset": pset_name, "property": prop_name}

    def _pset_of(self, element: IfcEntity, pset_name: str) -> IfcEntity | None:
        for rel in self.model.by_type("IFCRELDEFINESBYPROPERTIES", subtypes=False):
            if Ref(element.eid) not in (rel.attrs[4] or ()):
                continue
            target = rel.attrs[5]
            if not isinstance(target, Ref):
                continue
            pset = self.model.get(target.target)
            if pset.type_name == "IFCPROPERTYSET" and pset.attrs[2] == pset_name:
                return pset
        return None

    def delete_elements(self, selector) -> dict:
        try:
            hits = select(self.model, selector)
        except SelectorError as exc:
            raise ToolError(f"selector error: {exc}") from None
        doomed = {e.eid for e in hits}
        doomed |= self._hosted_closure(doomed)
        dead_rels = self._scrub_relationships(doomed)
        doomed |= self._orphaned_psets(dead_rels)
        dead_rels |= self._scrub_relationships(doomed) if doomed else set()
        deleted_ids = sorted(
            g for eid in doomed if (g := self.model.get(eid).global_id()) is not None
        )
        for eid in doomed | dead_rels:
            self.model.delete(eid)
        swept = self._collect_unreachable_support()
        for eid in swept:
            self.model.delete(eid)
        return {
            "deletedIds": deleted_ids,
            "entitiesRemoved": len(doomed | dead_rels) + len(swept),
        }

    def _hosted_closure(self, doomed: set[int]) -> set[int]:
        """Openings voided by doomed elements, plus their fillers, recursively."""
        extra: set[int] = set()
        grown = True
        while grown:
            grown = False
            gone = doomed | extra
            for rel in self.model.by_type("IFCRELVOIDSELEMENT", subtypes=False):
                host, opening = rel.attrs[4], rel.attrs[5]
                if isinstance(host, Ref) and isinstance(opening, Ref):
                    if host.target in gone and opening.target not in gone:
                        extra.add(opening.target)
                        grown = True
            for rel in self.model.by_type("IFCRELFILLSELEMENT", subtypes=False):
                opening, filler = rel.attrs[4], rel.attrs[5]
                if isinstance(opening, Ref) and isinstance(filler, Ref):
                    if opening.target in gone and filler.target not in gone:
                        extra.add(filler.target)
                        grown = True
        return extra

    def _scrub_relationships(self, doomed: set[int]) -> set[int]:
        """Drop doomed ids from relationship membership; return dead rel ids."""
        dead: set[int] = set()
        for eid, ent in sorted(self.model.entities.items()):
            if eid in doomed or not schema_table.is_subtype(ent.type_name, "IFCRELATIONSHIP"):
                continue
            rel_died = False
            for i, attr in enumerate(ent.attrs):
                if isinstance(attr, Ref) and attr.target in doomed:
                    rel_died = True
                elif isinstance(attr, tuple):
                    kept = tuple(v for v in attr if not (isinstance(v, Ref) and v.target in doomed))
                    if len(kept) != len(attr):
                        if not kept:
                            rel_died = True
                        ent.attrs[i] = kept
            if rel_died:
                dead.add(eid)
        return dead

    def _orphaned_psets(self, dead_rels: set[int]) -> set[int]:
        """Property sets whose every defining relation died."""
        candidates: set[int] = set()
        for eid in dead_rels:
            rel = self.model.get(eid)
            if rel.type_name != "IFCRELDEFINESBYPROPERTIES":
                continue
            target = rel.attrs[5]
            if isinstance(target, Ref):
                candidates.add(target.target)
        orphaned: set[int] = set()
        for pset_id in candidates:
            if self.model.get(pset_id).type_name != "IFCPROPERTYSET":
                continue
            referencing = {
                rel.eid
                for rel in self.model.by_type("IFCRELDEFINESBYPROPERTIES", subtypes=False)
                if rel.attrs[5] == Ref(pset_id)
            }
            if referencing <= dead_rels:
                orphaned.add(pset_id)
        return orphaned

    def _collect_unreachable_support(self) -> set[int]:
        """Unrooted entities not reachable from any remaining rooted entity.

        Representation contexts count as roots too: subcontexts point at
        their parent rather than the other way round, so a product-free
        model would otherwise lose its Body subcontext.
        """
        reachable: set[int] = set()
        frontier = [
            e.eid
            for e in self.model.entities.values()
            if e.global_id() is not None
            or schema_table.is_subtype(e.type_name, "IFCREPRESENTATIONCONTEXT")
        ]
        while frontier:
            eid = frontier.pop()
            if eid in reachable:
                continue
            reachable.add(eid)
            ent = self.model.entities.get(eid)
            if ent is None:
                continue
            frontier.extend(t for t in self.model.refs_of(ent) if t in self.model.entities)
        return {
            eid
            for eid, ent in self.model.entities.items()
            if eid not in reachable and ent.global_id() is None
        }

    # -- queries -------------------------------------------------------------

    def query_elements(self, selector) -> dict:
        try:
            hits = select(self.model, selector)
        except SelectorError as exc:
            raise ToolError(f"selector error: {exc}") from None
        return {
            "count": len(hits),
            "ids": [e.global_id() or f"#{e.eid}" for e in hits],
        }

    def spatial_tree(self) -> dict:
        project = self._singleton("IFCPROJECT", "IfcProject")

        agg_children: dict[int, list[int]] = {}
        for rel in self.model.by_type("IFCRELAGGREGATES", subtypes=False):
            parent = rel.attrs[4]
            if isinstance(parent, Ref):
                for child in rel.attrs[5] or ():
                    if isinstance(child, Ref):
                        agg_children.setdefault(parent.target, []).append(child.target)
        for rel in self.model.by_type("IFCRELCONTAINEDINSPATIALSTRUCTURE", subtypes=False):
            structure = rel.attrs[5]
            if isinstance(structure, Ref):
                for child in rel.attrs[4] or ():
                    if isinstance(child, Ref):
                        agg_children.setdefault(structure.target, []).append(child.target)

        def node(eid: int, seen: frozenset) -> dict:
            ent = self.model.get(eid)
            name = ent.attrs[2] if len(ent.attrs) > 2 and isinstance(ent.attrs[2], str) else None
            children = [
                node(c, seen | {eid})
                for c in sorted(agg_children.get(eid, []))
                if c not in seen and c in self.model.entities
            ]
            return {
                "type": ent.type_name,
                "globalId": ent.global_id(),
                "name": name,
                "children": children,
            }

        return node(project.eid, frozenset())

    # -- low-level batch -------------------------------------------------------

    def run_batch(self, ops) -> dict:
        if not isinstance(ops, list) or not ops:
            raise ToolError("batch must be a non-empty list of ops")
        results = []
        for i, op in enumerate(ops):
            if not isinstance(op, dict) or "op" not in op:
                raise ToolError(f"op {i}: each entry needs an 'op' field")
            kind = op["op"]
            args = op.get("args", {})
            if not isinstance(args, dict):
                raise ToolError(f"op {i}: args must be an object")
            try:
                if kind == "add_entity":
                    results.append(self._op_add_entity(args))
                elif kind == "set_attr":
                    results.append(self._op_set_attr(args))
                elif kind == "delete_entity":
                    results.append(self._op_delete_entity(args))
                elif kind == "call_helper":
                    results.append(self._op_call_helper(args))
                else:
                    raise ToolError(f"unknown op {kind!r}")
            except ToolError as exc:
                raise ToolError(f"op {i} ({kind}): {exc}") from None
        return {"results": results}

    def _resolve_op_target(self, ref) -> IfcEntity:
        if isinstance(ref, int):
            ent = self.model.entities.get(ref)
            if ent is None:
                raise ToolError(f"no entity #{ref}")
            return ent
        if isinstance(ref, str) and is_guid(ref):
            ent = self.model.find_by_guid(ref)
            if ent is None:
                raise ToolError(f"no entity with GlobalId {ref}")
            return ent
        raise ToolError("ref must be an entity id or a GlobalId")

    def _op_add_entity(self, args: dict) -> dict:
        type_name = str(args.get("type", "")).upper()
        if not type_name:
            raise ToolError("add_entity needs a type")
        attrs = [json_to_value(v) for v in args.get("attrs", [])]
        arity = schema_table.attr_names(type_name)
        if arity is not None and len(attrs) != len(arity):
            raise ToolError(f"{type_name} takes {len(arity)} attributes, got {len(attrs)}")
        guid = None
        if schema_table.is_rooted(type_name) and attrs and attrs[0] is None:
            guid = self._new_guid()
            attrs[0] = guid
        ent = self.model.add(type_name, attrs)
        return {"op": "add_entity", "id": ent.eid, "globalId": ent.global_id() or guid}

    def _op_set_attr(self, args: dict) -> dict:
        ent = self._resolve_op_target(args.get("ref"))
        index = args.get("index")
        if not isinstance(index, int) or not 0 <= index < len(ent.attrs):
            raise ToolError(f"index must be within [0, {len(ent.attrs) - 1}]")
        ent.attrs[index] = json_to_value(args.get("value"))
        return {"op": "set_attr", "id": ent.eid, "index": index}

    def _op_delete_entity(self, args: dict) -> dict:
        ent = self._resolve_op_target(args.get("ref"))
        self.model.delete(ent.eid)
        return {"op": "delete_entity", "id": ent.eid}

    def _op_call_helper(self, args: dict) -> dict:
        name = args.get("name")
        helper_args = args.get("args", {})
        if not isinstance(helper_args, dict):
            raise ToolError("helper args must be an object")
        helpers = {
            "new_guid": self._helper_new_guid,
            "count_type": self._helper_count_type,
            "list_ids": self._helper_list_ids,
            "get_attr": self._helper_get_attr,
        }
        fn = helpers.get(name)
        if fn is None:
            raise ToolError(f"unknown helper {name!r}; available: {', '.join(sorted(helpers))}")
        return {"op": "call_helper", "name": name, "result": fn(**helper_args)}

    def _helper_new_guid(self) -> str:
        return self._new_guid()

    def _helper_count_type(self, type=None, subtypes=True) -> int:
        if not isinstance(type, str) or not type:
            raise ToolError("count_type needs a type name")
        return len(self.model.by_type(type, subtypes=bool(subtypes)))

    def _helper_list_ids(self, type=None, subtypes=True) -> list:
        if not isinstance(type, str) or not type:
            raise ToolError("list_ids needs a type name")
        return [e.global_id() or f"#{e.eid}" for e in self.model.by_type(type, subtypes=bool(subtypes))]

    def _helper_get_attr(self, ref=None, index=None):
        ent = self._resolve_op_target(ref)
        if not isinstance(index, int) or not 0 <= index < len(ent.attrs):
            raise ToolError(f"index must be within [0, {len(ent.attrs) - 1}]")
        return value_to_json(ent.attrs[index])


HIGH_LEVEL_TOOLS = (
    "create_project",
    "georeference",
    "add_storey",
    "create_wall",
    "create_slab",
    "add_door",
    "add_window",
    "set_property",
    "delete_elements",
)
QUERY_TOOLS = ("query_elements", "spatial_tree")


def run_tool(builder: ModelBuilder, tool_name: str, params: dict) -> dict:
    """Dispatch one wire-named tool call onto the builder."""
    if not isinstance(params, dict):
        raise ToolError("params must be an object")
    try:
        if tool_name == "create_project":
            return builder.create_project(
                params.get("name"),
                params.get("siteName", "Site"),
                params.get("buildingName", "Building"),
            )
        if tool_name == "georeference":
            return builder.georeference(
                params.get("latitude"),
                params.get("longitude"),
                params.get("elevation"),
                params.get("trueNorth", 0.0),
            )
        if tool_name == "add_storey":
            return builder.add_storey(params.get("name"), params.get("elevation"))
        if tool_name == "create_wall":
            return builder.create_wall(
                params.get("storeyRef"),
                params.get("start"),
                params.get("end"),
                params.get("height"),
                params.get("thickness"),
                params.get("name"),
            )
        if tool_name == "create_slab":
            return builder.create_slab(
                params.get("storeyRef"),
                params.get("polygon"),
                params.get("thickness"),
                params.get("name"),
            )
        if tool_name == "add_door":
            return builder.add_door(
                params.get("wallRef"),
                params.get("offsetAlongWall"),
                params.get("width"),
                params.get("height"),
                params.get("name"),
            )
        if tool_name == "add_window":
            return builder.add_window(
                params.get("wallRef"),
                params.get("offset"),
                params.get("width"),
                params.get("height"),
                params.get("sillHeight"),
                params.get("name"),
            )
        if tool_name == "set_property":
            return builder.set_property(
                params.get("selector"),
                params.get("psetName"),
                params.get("propName"),
                params.get("value"),
            )
        if tool_name == "delete_elements":
            return builder.delete_elements(params.get("selector"))
        if tool_name == "query_elements":
            return builder.query_elements(params.get("selector"))
        if tool_name == "spatial_tree":
            return builder.spatial_tree()
        if tool_name == "run_batch":
            return builder.run_batch(params.get("ops"))
    except ToolError:
        raise
    except (TypeError, ValueError, KeyError, AttributeError, IndexError) as exc:
        raise ToolError(f"bad arguments for {tool_name}: {exc}") from None
    raise ToolError(f"unknown tool: {tool_name}")
