"""Tool catalogue served over tools/list.

Every schema is self-contained and carries worked examples; the server
validates tools/call arguments against these exact documents, so the
catalogue is the single source of truth for what a call may look like.
"""

from __future__ import annotations

from dataclasses import dataclass

CATEGORIES = ("bim_low", "bim_high", "storage", "knowledge")

_SESSION = {
    "sessionId": {
        "type": "string",
        "minLength": 1,
        "description": "conversation the call belongs to; defaults to 'default'",
    }
}

_POINT2 = {
    "type": "array",
    "minItems": 2,
    "maxItems": 2,
    "items": {"type": "number"},
    "description": "[x, y] in meters",
}

_OPS = {
    "type": "array",
    "minItems": 1,
    "items": {
        "type": "object",
        "required": ["op", "args"],
        "additionalProperties": False,
        "properties": {
            "op": {"enum": ["add_entity", "set_attr", "delete_entity", "call_helper"]},
            "args": {"type": "object"},
        },
    },
}


@dataclass(frozen=True)
class ToolDescriptor:
    name: str
    description: str
    input_schema: dict
    category: str  # one of CATEGORIES

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "inputSchema": self.input_schema,
            "category": self.category,
        }


def _schema(properties: dict, required: list[str], examples: list[dict]) -> dict:
    return {
        "type": "object",
        "properties": {**properties, **_SESSION},
        "required": required,
        "additionalProperties": False,
        "examples": examples,
    }


CATALOG: tuple[ToolDescriptor, ...] = (
    ToolDescriptor(
        "create_project",
        "Start a fresh model: project, site, building, units and geometric "
        "contexts. Replaces the session's current model.",
        _schema(
            {
                "name": {"type": "string", "minLength": 1},
                "siteName": {"type": "string", "minLength": 1},
                "buildingName": {"type": "string", "minLength": 1},
            },
            ["name"],
            [{"name": "Office Demo", "siteName": "Yard", "buildingName": "Block A"}],
        ),
        "bim_high",
    ),
    ToolDescriptor(
        "georeference",
        "Set the site's latitude/longitude (degrees), elevation (meters) and "
        "optional true-north rotation (degrees) on the current model.",
        _schema(
            {
                "latitude": {"type": "number", "minimum": -90, "maximum": 90},
                "longitude": {"type": "number", "minimum": -180, "maximum": 180},
                "elevation": {"type": "number"},
                "trueNorth": {"type": "number"},
            },
            ["latitude", "longitude", "elevation"],
            [{"latitude": 48.137, "longitude": 11.575, "elevation": 520.0, "trueNorth": 0.0}],
        ),
        "bim_high",
    ),
    ToolDescriptor(
        "add_storey",
        "Add a building storey at the given elevation (meters).",
        _schema(
            {
                "name": {"type": "string", "minLength": 1},
                "elevation": {"type": "number"},
            },
            ["name", "elevation"],
            [{"name": "Level 1", "elevation": 3.0}],
        ),
        "bim_high",
    ),
    ToolDescriptor(
        "create_wall",
        "Create a straight wall on a storey from start to end ([x, y] meters) "
        "with the given height and thickness (meters). storeyRef is a "
        "GlobalId or a selector such as \"IfcBuildingStorey, Name='Level 1'\".",
        _schema(
            {
                "storeyRef": {"type": "string", "minLength": 1},
                "start": _POINT2,
                "end": _POINT2,
                "height": {"type": "number", "exclusiveMinimum": 0},
                "thickness": {"type": "number", "exclusiveMinimum": 0},
                "name": {"type": "string", "minLength": 1},
            },
            ["storeyRef", "start", "end", "height", "thickness"],
            [
                {
                    "storeyRef": "IfcBuildingStorey, Name='Level 1'",
                    "start": [0, 0],
                    "end": [5, 0],
                    "height": 3.0,
                    "thickness": 0.2,
                }
            ],
        ),
        "bim_high",
    ),
    ToolDescriptor(
        "create_slab",
        "Create a floor slab on a storey from a closed polygon ([x, y] meter "
        "pairs, at least 3) extruded downward by thickness (meters).",
        _schema(
            {
                "storeyRef": {"type": "string", "minLength": 1},
                "polygon": {"type": "array", "minItems": 3, "items": _POINT2},
                "thickness": {"type": "number", "exclusiveMinimum": 0},
                "name": {"type": "string", "minLength": 1},
            },
            ["storeyRef", "polygon", "thickness"],
            [
                {
                    "storeyRef": "IfcBuildingStorey",
                    "polygon": [[0, 0], [5, 0], [5, 4], [0, 4]],
                    "thickness": 0.3,
                }
            ],
        ),
        "bim_high",
    ),
    ToolDescriptor(
        "add_door",
        "Cut an opening into a wall and fit a door. Offset is measured along "
        "the wall axis from its start (meters); the opening must fit within "
        "the wall's length and height.",
        _schema(
            {
                "wallRef": {"type": "string", "minLength": 1},
                "offsetAlongWall": {"type": "number", "minimum": 0},
                "width": {"type": "number", "exclusiveMinimum": 0},
                "height": {"type": "number", "exclusiveMinimum": 0},
                "name": {"type": "string", "minLength": 1},
            },
            ["wallRef", "offsetAlongWall", "width", "height"],
            [{"wallRef": "IfcWall, Name='Wall-001'", "offsetAlongWall": 1.0, "width": 1.0, "height": 2.1}],
        ),
        "bim_high",
    ),
    ToolDescriptor(
        "add_window",
        "Cut an opening into a wall and fit a window at the given sill height "
        "(meters above the wall base).",
        _schema(
            {
                "wallRef": {"type": "string", "minLength": 1},
                "offset": {"type": "number", "minimum": 0},
                "width": {"type": "number", "exclusiveMinimum": 0},
                "height": {"type": "number", "exclusiveMinimum": 0},
                "sillHeight": {"type": "number", "minimum": 0},
                "name": {"type": "string", "minLength": 1},
            },
            ["wallRef", "offset", "width", "height", "sillHeight"],
            [{"wallRef": "IfcWall", "offset": 2.5, "width": 1.2, "height": 1.2, "sillHeight": 0.9}],
        ),
        "bim_high",
    ),
    ToolDescriptor(
        "set_property",
        "Set a single property on every element matched by the selector, "
        "creating the property set if needed. Value may be a string, number "
        "or boolean.",
        _schema(
            {
                "selector": {"type": "string", "minLength": 1},
                "psetName": {"type": "string", "minLength": 1},
                "propName": {"type": "string", "minLength": 1},
                "value": {"type": ["string", "number", "boolean", "integer"]},
            },
            ["selector", "psetName", "propName", "value"],
            [
                {
                    "selector": "IfcWall",
                    "psetName": "Pset_WallCommon",
                    "propName": "IsExternal",
                    "value": True,
                }
            ],
        ),
        "bim_high",
    ),
    ToolDescriptor(
        "delete_elements",
        "Delete every element matched by the selector, including hosted "
        "openings and fillers, and clean up dangling relationships.",
        _schema(
            {"selector": {"type": "string", "minLength": 1}},
            ["selector"],
            [{"selector": "IfcDoor"}],
        ),
        "bim_high",
    ),
    ToolDescriptor(
        "query_elements",
        "Count and list elements matching a selector, e.g. \"IfcWall\" or "
        "\"IfcWall, Pset_WallCommon.IsExternal=TRUE\". Read-only.",
        _schema(
            {"selector": {"type": "string", "minLength": 1}},
            ["selector"],
            [{"selector": "IfcWall, Pset_WallCommon.IsExternal=TRUE"}],
        ),
        "bim_high",
    ),
    ToolDescriptor(
        "spatial_tree",
        "Return the project/site/building/storey/element containment tree of "
        "the current model. Read-only.",
        _schema({}, [], [{}]),
        "bim_high",
    ),
    ToolDescriptor(
        "run_batch",
        "Apply a list of low-level entity operations to the current model: "
        "add_entity {type, attrs}, set_attr {ref, index, value}, "
        "delete_entity {ref}, call_helper {name, args}. Helpers: new_guid, "
        "count_type, list_ids, get_attr. All-or-nothing.",
        _schema(
            {"ops": _OPS},
            ["ops"],
            [
                {
                    "ops": [
                        {"op": "call_helper", "args": {"name": "count_type", "args": {"type": "IfcWall"}}}
                    ]
                }
            ],
        ),
        "bim_low",
    ),
    ToolDescriptor(
        "upload_model",
        "Store model text as a new version under a key in the model bucket. "
        "Does not change the session's current model.",
        _schema(
            {
                "modelText": {"type": "string", "minLength": 1},
                "key": {"type": "string", "minLength": 1},
            },
            ["modelText"],
            [{"modelText": "ISO-10303-21;...", "key": "imports/office.ifc"}],
        ),
        "storage",
    ),
    ToolDescriptor(
        "download_model",
        "Fetch a stored model version (defaults to the session's current "
        "model). Returns version metadata plus the leading slice of the text.",
        _schema(
            {
                "key": {"type": "string", "minLength": 1},
                "versionId": {"type": "string", "minLength": 1},
            },
            [],
            [{"key": "sessions/default/model.ifc"}],
        ),
        "storage",
    ),
    ToolDescriptor(
        "list_model_versions",
        "List all stored versions of a key (defaults to the session's "
        "current model), oldest first.",
        _schema(
            {"key": {"type": "string", "minLength": 1}},
            [],
            [{}],
        ),
        "storage",
    ),
    ToolDescriptor(
        "lookup_docs",
        "Search the bundled tool and IFC concept documentation; returns the "
        "top-k snippets by keyword relevance.",
        _schema(
            {
                "query": {"type": "string"},
                "k": {"type": "integer", "minimum": 1},
            },
            ["query"],
            [{"query": "wall thickness parameter", "k": 3}],
        ),
        "knowledge",
    ),
)

_BY_NAME = {d.name: d for d in CATALOG}


def descriptor_for(name: str) -> ToolDescriptor | None:
    return _BY_NAME.get(name)
