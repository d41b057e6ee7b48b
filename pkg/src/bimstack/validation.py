"""Request validation against the bundled JSON schemas.

A small draft-2020-12 subset evaluator covering exactly the keywords the
bundled schemas use (plus the obvious neighbours). Violations carry
JSON-pointer paths into the instance. Schemas ship as package data so every
service validates against identical bytes.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources


@dataclass(frozen=True)
class SchemaViolation:
    path: str  # JSON pointer into the instance
    message: str

    def to_json(self) -> dict:
        return {"path": self.path, "message": self.message}


_TYPES = {
    "object": dict,
    "array": list,
    "string": str,
    "null": type(None),
}


def _type_ok(value, name: str) -> bool:
    if name == "boolean":
        return isinstance(value, bool)
    if name == "integer":
        return isinstance(value, int) and not isinstance(value, bool)
    if name == "number":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    expected = _TYPES.get(name)
    return expected is not None and isinstance(value, expected)


def _json_eq(a, b) -> bool:
    # bool is an int subclass in Python; JSON keeps them distinct
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    return a == b


def _escape(token: str) -> str:
    return token.replace("~", "~0").replace("/", "~1")


def _resolve_ref(root: dict, ref: str) -> dict | bool:
    if not ref.startswith("#"):
        raise ValueError(f"only local $ref supported: {ref}")
    node: object = root
    for token in ref[1:].lstrip("/").split("/"):
        if not token:
            continue
        token = token.replace("~1", "/").replace("~0", "~")
        node = node[token]  # type: ignore[index]
    return node  # type: ignore[return-value]


def validate_instance(schema: dict | bool, instance, root: dict | None = None, path: str = "") -> list[SchemaViolation]:
    """All violations of instance against schema (empty list = valid)."""
    if schema is True:
        return []
    if schema is False:
        return [SchemaViolation(path or "", "no value allowed here")]
    if root is None:
        root = schema if isinstance(schema, dict) else {}

    out: list[SchemaViolation] = []

    if "$ref" in schema:
        target = _resolve_ref(root, schema["$ref"])
        out.extend(validate_instance(target, instance, root, path))

    if "type" in schema:
        names = schema["type"] if isinstance(schema["type"], list) else [schema["type"]]
        if not any(_type_ok(instance, n) for n in names):
            out.append(SchemaViolation(path or "", f"expected {' or '.join(names)}"))
            return out  # type gates everything else

    if "enum" in schema and not any(_json_eq(instance, v) for v in schema["enum"]):
        allowed = ", ".join(json.dumps(v) for v in schema["enum"])
        out.append(SchemaViolation(path or "", f"not one of: {allowed}"))
    if "const" in schema and not _json_eq(instance, schema["const"]):
        out.append(SchemaViolation(path or "", f"must equal {json.dumps(schema['const'])}"))

    if isinstance(instance, str):
        if "minLength" in schema and len(instance) < schema["minLength"]:
            out.append(SchemaViolation(path or "", f"shorter than {schema['minLength']} characters"))
        if "maxLength" in schema and len(instance) > schema["maxLength"]:
            out.append(SchemaViolation(path or "", f"longer than {schema['maxLength']} characters"))
        if "pattern" in schema and not re.search(schema["pattern"], instance):
            out.append(SchemaViolation(path or "", f"does not match pattern {schema['pattern']}"))

    if isinstance(instance, (int, float)) and not isinstance(instance, bool):
        if "minimum" in schema and instance < schema["minimum"]:
            out.append(SchemaViolation(path or "", f"less than minimum {schema['minimum']}"))
        if "maximum" in schema and instance > schema["maximum"]:
            out.append(SchemaViolation(path or "", f"greater than maximum {schema['maximum']}"))
        if "exclusiveMinimum" in schema and instance <= schema["exclusiveMinimum"]:
            out.append(SchemaViolation(path or "", f"must exceed {schema['exclusiveMinimum']}"))
        if "exclusiveMaximum" in schema and instance >= schema["exclusiveMaximum"]:
            out.append(SchemaViolation(path or "", f"must be below {schema['exclusiveMaximum']}"))

    if isinstance(instance, dict):
        for name in schema.get("required", []):
            if name not in instance:
                out.append(SchemaViolation(f"{path}/{_escape(name)}", "required property missing"))
        props = schema.get("properties", {})
        for name, sub in props.items():
            if name in instance:
                out.extend(validate_instance(sub, instance[name], root, f"{path}/{_escape(name)}"))
        extra = schema.get("additionalProperties")
        if extra is not None:
            for name in instance:
                if name in props:
                    continue
                if extra is False:
                    out.append(SchemaViolation(f"{path}/{_escape(name)}", "unexpected property"))
                elif extra is not True:
                    out.extend(validate_instance(extra, instance[name], root, f"{path}/{_escape(name)}"))

    if isinstance(instance, list):
        if "minItems" in schema and len(instance) < schema["minItems"]:
            out.append(SchemaViolation(path or "", f"fewer than {schema['minItems']} items"))
        if "maxItems" in schema and len(instance) > schema["maxItems"]:
            out.append(SchemaViolation(path or "", f"more than {schema['maxItems']} items"))
        if "items" in schema:
            for i, item in enumerate(instance):
                out.extend(validate_instance(schema["items"], item, root, f"{path}/{i}"))

    if "allOf" in schema:
        for sub in schema["allOf"]:
            out.extend(validate_instance(sub, instance, root, path))
    if "anyOf" in schema:
        if all(validate_instance(sub, instance, root, path) for sub in schema["anyOf"]):
            out.append(SchemaViolation(path or "", "matches none of the allowed variants"))
    if "oneOf" in schema:
        hits = sum(1 for sub in schema["oneOf"] if not validate_instance(sub, instance, root, path))
        if hits != 1:
            out.append(SchemaViolation(path or "", f"must match exactly one variant, matched {hits}"))

    return out


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    """Bundled schema by basename, e.g. 'create_request' or 'artifact'."""
    text = (resources.files("bimstack") / "schemas" / f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


ENDPOINTS = ("create", "modify", "query")


def validate_request(endpoint: str, body) -> list[SchemaViolation]:
    """Violations of a request body for one of the three endpoints."""
    if endpoint not in ENDPOINTS:
        raise ValueError(f"unknown endpoint {endpoint!r}")
    return validate_instance(load_schema(f"{endpoint}_request"), body)


def validate_artifact(body) -> list[SchemaViolation]:
    return validate_instance(load_schema("artifact"), body)
