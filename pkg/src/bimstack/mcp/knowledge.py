"""Bundled documentation lookup.

Deterministic keyword scoring: a document's score is the summed term
frequency of the query tokens it contains. Ties break by document id, so
rankings are stable across runs and platforms. A vector search service
could replace this behind the same tool signature.
"""

from __future__ import annotations

import re

SNIPPET_LIMIT = 512

_DOCS: dict[str, str] = {
    "tool/create_project": (
        "create_project(name, siteName, buildingName) starts a fresh model. "
        "It creates the project, one site and one building, SI units (meters, "
        "square meters, cubic meters, radians) and the geometric "
        "representation contexts, and aggregates project -> site -> building. "
        "Every other modelling tool requires a project, so call this first. "
        "A session's current model is replaced by the new file."
    ),
    "tool/georeference": (
        "georeference(latitude, longitude, elevation, trueNorth) stores the "
        "site location. Latitude and longitude are decimal degrees and are "
        "converted to degree/minute/second/millionth lists on the site; "
        "elevation is meters above sea level; trueNorth rotates the model "
        "context's north direction by the given degrees."
    ),
    "tool/add_storey": (
        "add_storey(name, elevation) appends a building storey at the given "
        "elevation in meters relative to the building origin. Storeys are "
        "aggregated under the building and act as containers for walls, "
        "slabs and other elements."
    ),
    "tool/create_wall": (
        "create_wall(storeyRef, start, end, height, thickness) builds a "
        "straight wall along the axis from start to end, both [x, y] meter "
        "pairs on the storey plane. The wall body is a rectangle profile of "
        "the wall length times the thickness parameter, extruded upward by "
        "height. The storeyRef may be a GlobalId or a selector; the wall is "
        "contained in that storey."
    ),
    "tool/create_slab": (
        "create_slab(storeyRef, polygon, thickness) builds a floor slab from "
        "a closed polygon of [x, y] meter pairs extruded downward by the "
        "thickness, so the top face lies on the storey plane."
    ),
    "tool/add_door": (
        "add_door(wallRef, offsetAlongWall, width, height) cuts an opening "
        "into the wall and fits a door. The offset runs along the wall axis "
        "from its start point; offset plus width must stay within the wall "
        "length and the door height within the wall height, otherwise the "
        "call fails with 'opening exceeds wall' and changes nothing."
    ),
    "tool/add_window": (
        "add_window(wallRef, offset, width, height, sillHeight) cuts an "
        "opening and fits a window whose sill sits sillHeight meters above "
        "the wall base. The same fit rules as doors apply, including the "
        "sill plus window height against the wall height."
    ),
    "tool/set_property": (
        "set_property(selector, psetName, propName, value) writes one "
        "property on every element the selector matches, creating a "
        "property set and single-value property when missing and updating "
        "in place when present. Values may be strings, numbers or booleans."
    ),
    "tool/delete_elements": (
        "delete_elements(selector) removes all matched elements plus their "
        "hosted openings and fillers (a deleted wall takes its doors and "
        "windows along), scrubs the relationships that referenced them and "
        "garbage-collects unreferenced geometry."
    ),
    "tool/query_elements": (
        "query_elements(selector) counts and lists elements without touching "
        "the model. Selector grammar: a type name with optional filters, "
        "e.g. IfcWall, Name='Wall-001' or IfcWall, "
        "Pset_WallCommon.IsExternal=TRUE. Subtypes are included."
    ),
    "tool/spatial_tree": (
        "spatial_tree() returns the containment hierarchy: project, site, "
        "building, storeys, and the elements each storey contains, as nested "
        "JSON with type, GlobalId and name per node."
    ),
    "tool/run_batch": (
        "run_batch(ops) applies low-level operations directly to entities: "
        "add_entity {type, attrs}, set_attr {ref, index, value}, "
        "delete_entity {ref}, call_helper {name, args}. refs are entity ids "
        "or GlobalIds. Helpers: new_guid, count_type, list_ids, get_attr. "
        "The batch is all-or-nothing and the result must still pass the "
        "model checks."
    ),
    "tool/upload_model": (
        "upload_model(modelText, key) stores STEP text as a new immutable "
        "version under the key. Versions are never overwritten; each upload "
        "appends and returns the new versionId."
    ),
    "tool/download_model": (
        "download_model(key, versionId) fetches a stored version, by default "
        "the session's current model, returning metadata and the leading "
        "text of the file."
    ),
    "tool/list_model_versions": (
        "list_model_versions(key) lists every stored version of a key oldest "
        "first with versionId, size and content hash."
    ),
    "tool/lookup_docs": (
        "lookup_docs(query, k) searches this documentation corpus and "
        "returns the k best-matching snippets."
    ),
    "ifc/globalid": (
        "Every rooted entity carries a GlobalId: 128 bits rendered as 22 "
        "characters over the base64-like alphabet 0-9 A-Z a-z _ $. GlobalIds "
        "must be unique within a model and are the stable identity used for "
        "diffing and for GlobalId references in tool calls."
    ),
    "ifc/spatial-structure": (
        "The spatial structure nests project, site, building and storeys via "
        "aggregation relationships; elements attach to storeys via spatial "
        "containment. Every product must be reachable from the project "
        "through these relationships for the model to pass checks."
    ),
    "ifc/property-sets": (
        "Property sets group named single-value properties and attach to "
        "elements through property-definition relationships. Common sets "
        "follow the Pset_ naming convention, e.g. Pset_WallCommon with "
        "IsExternal or FireRating."
    ),
    "ifc/step-format": (
        "Models serialize as STEP physical files: a header section and a "
        "data section of numbered entity instances like "
        "#12=IFCWALL('guid',...);. Strings escape non-ASCII text through "
        "X2 directives; attribute order follows the schema definition."
    ),
    "ifc/openings": (
        "Doors and windows never cut geometry themselves: an opening element "
        "voids the wall through a voiding relationship and the door or "
        "window fills the opening through a filling relationship. Deleting "
        "the host cascades over both."
    ),
    "ifc/diff": (
        "Model versions are compared entity-wise: rooted entities match by "
        "GlobalId, support entities by a structural fingerprint, and the "
        "diff lists added, removed and modified entities with per-attribute "
        "before/after values."
    ),
    "store/versioning": (
        "The object store is append-only: every upload creates a new version "
        "with a sortable versionId; nothing is overwritten or deleted. "
        "Access goes through presigned URLs with an expiry and an HMAC "
        "signature covering method, bucket, key and version."
    ),
    "harness/selector-rules": (
        "Evaluation cases attach rules to a model: count_eq and count_ge "
        "compare how many elements a selector matches, attr_eq compares a "
        "matched attribute value, exists asserts at least one match."
    ),
}


def _tokens(text: str) -> list[str]:
    return re.findall(r"[a-z0-9_]+", text.lower())


def corpus_ids() -> list[str]:
    return sorted(_DOCS)


def doc_text(doc_id: str) -> str:
    return _DOCS[doc_id]


def lookup_docs(query: str, k: int = 3) -> list[dict]:
    """Top-k docs by summed query-token frequency; ties by doc id."""
    terms = _tokens(query)
    if not terms:
        return []
    k = max(1, min(int(k), len(_DOCS)))
    scored = []
    for doc_id in sorted(_DOCS):
        doc_terms = _tokens(_DOCS[doc_id])
        counts: dict[str, int] = {}
        for t in doc_terms:
            counts[t] = counts.get(t, 0) + 1
        score = sum(counts.get(t, 0) for t in terms)
        if score > 0:
            scored.append((-score, doc_id))
    scored.sort()
    return [
        {"id": doc_id, "score": -neg, "snippet": _DOCS[doc_id][:SNIPPET_LIMIT]}
        for neg, doc_id in scored[:k]
    ]
