"""Read and write schema models as ``.uschema.json`` documents.

The document layout mirrors the model one to one: a schema object holds
entity and relationship types, each type its variations, each variation its
features.  Data types are encoded as tagged objects so that nested
collection types survive round trips.  Saves are deterministic: types sort
by name, variations by id, features by name.
"""

from __future__ import annotations

import json
from datetime import date
from pathlib import Path
from typing import Any, Optional, Union

from skiql.model import (
    Aggregate,
    ArrayType,
    Attribute,
    Cardinality,
    DataType,
    EntityType,
    Feature,
    Key,
    ListType,
    MapType,
    Reference,
    RelationshipType,
    SCALARS,
    SetType,
    SkiqlError,
    StructuralVariation,
    TupleType,
    UnionType,
    USchemaModel,
    Violation,
    feature_sort_key,
    validate_model,
)


class SchemaSyntaxError(SkiqlError):
    """The document is not well-formed (bad JSON or a bad shape)."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(message)
        self.line = line
        self.column = column


class SchemaValidationError(SkiqlError):
    """The document parsed but violates the structural rules."""

    def __init__(self, violations: list[Violation]):
        listing = "; ".join(f"{v.path}: {v.rule}" for v in violations[:8])
        more = "" if len(violations) <= 8 else f" (+{len(violations) - 8} more)"
        super().__init__(f"invalid schema: {listing}{more}")
        self.violations = violations


# ---------------------------------------------------------------------------
# Decoding
# ---------------------------------------------------------------------------


def _bad(path: str, why: str) -> SchemaSyntaxError:
    return SchemaSyntaxError(f"{path}: {why}")


def _expect(value: Any, type_: type, path: str) -> Any:
    if not isinstance(value, type_):
        raise _bad(path, f"expected {type_.__name__}, got {type(value).__name__}")
    return value


def _decode_data_type(raw: Any, path: str) -> DataType:
    _expect(raw, dict, path)
    kind = raw.get("kind")
    if kind in SCALARS:
        return SCALARS[kind]
    if kind in ("array", "set", "list"):
        element = _decode_data_type(raw.get("element"), f"{path}/element")
        return {"array": ArrayType, "set": SetType, "list": ListType}[kind](element)
    if kind == "tuple":
        elements = _expect(raw.get("elements"), list, f"{path}/elements")
        return TupleType(
            tuple(_decode_data_type(e, f"{path}/elements/{i}") for i, e in enumerate(elements))
        )
    if kind == "map":
        return MapType(
            _decode_data_type(raw.get("key"), f"{path}/key"),
            _decode_data_type(raw.get("value"), f"{path}/value"),
        )
    if kind == "union":
        members = _expect(raw.get("members"), list, f"{path}/members")
        return UnionType(
            tuple(_decode_data_type(m, f"{path}/members/{i}") for i, m in enumerate(members))
        )
    raise _bad(path, f"unknown data type kind {kind!r}")


def _decode_cardinality(raw: Any, path: str) -> Cardinality:
    _expect(raw, str, path)
    try:
        return Cardinality.parse(raw)
    except ValueError as exc:
        raise _bad(path, str(exc)) from exc


def _decode_feature(raw: Any, path: str) -> Feature:
    _expect(raw, dict, path)
    kind = raw.get("kind")
    name = _expect(raw.get("name"), str, f"{path}/name")
    if kind == "attribute":
        return Attribute(name, _decode_data_type(raw.get("type"), f"{path}/type"))
    if kind == "key":
        attrs = _expect(raw.get("attributes"), list, f"{path}/attributes")
        return Key(name, tuple(_expect(a, str, f"{path}/attributes") for a in attrs))
    if kind == "reference":
        featured = raw.get("featuredBy", [])
        _expect(featured, list, f"{path}/featuredBy")
        pairs = []
        for i, entry in enumerate(featured):
            entry = _expect(entry, list, f"{path}/featuredBy/{i}")
            if len(entry) != 2:
                raise _bad(f"{path}/featuredBy/{i}", "expected [relationshipType, variationId]")
            pairs.append((_expect(entry[0], str, path), _expect(entry[1], int, path)))
        return Reference(
            name,
            _expect(raw.get("target"), str, f"{path}/target"),
            _decode_cardinality(raw.get("cardinality"), f"{path}/cardinality"),
            tuple(pairs),
        )
    if kind == "aggregate":
        ids = _expect(raw.get("targetVariations"), list, f"{path}/targetVariations")
        return Aggregate(
            name,
            _expect(raw.get("target"), str, f"{path}/target"),
            tuple(_expect(v, int, f"{path}/targetVariations") for v in ids),
            _decode_cardinality(raw.get("cardinality"), f"{path}/cardinality"),
        )
    raise _bad(path, f"unknown feature kind {kind!r}")


def _decode_date(raw: Any, path: str) -> Optional[date]:
    if raw is None:
        return None
    _expect(raw, str, path)
    try:
        return date.fromisoformat(raw)
    except ValueError as exc:
        raise _bad(path, f"bad date {raw!r}") from exc


def _decode_variation(raw: Any, path: str) -> StructuralVariation:
    _expect(raw, dict, path)
    vid = _expect(raw.get("id"), int, f"{path}/id")
    features_raw = _expect(raw.get("features"), list, f"{path}/features")
    features = tuple(
        _decode_feature(f, f"{path}/features/{i}") for i, f in enumerate(features_raw)
    )
    count = raw.get("instanceCount", 0)
    _expect(count, int, f"{path}/instanceCount")
    return StructuralVariation(
        variation_id=vid,
        features=features,
        instance_count=count,
        first_seen=_decode_date(raw.get("firstSeen"), f"{path}/firstSeen"),
        last_seen=_decode_date(raw.get("lastSeen"), f"{path}/lastSeen"),
    )


def _decode_variations(raw: Any, path: str) -> tuple[StructuralVariation, ...]:
    _expect(raw, list, path)
    return tuple(_decode_variation(v, f"{path}/{i}") for i, v in enumerate(raw))


def schema_from_payload(payload: Any) -> USchemaModel:
    """Build and validate a model from an already-parsed JSON value."""
    _expect(payload, dict, "schema")
    name = _expect(payload.get("name"), str, "schema/name")
    kind = _expect(payload.get("kind"), str, "schema/kind")
    entities = []
    for i, raw in enumerate(_expect(payload.get("entityTypes"), list, "schema/entityTypes")):
        _expect(raw, dict, f"schema/entityTypes/{i}")
        type_name = _expect(raw.get("name"), str, f"schema/entityTypes/{i}/name")
        entities.append(
            EntityType(
                name=type_name,
                root=bool(raw.get("root", True)),
                variations=_decode_variations(raw.get("variations"), type_name),
            )
        )
    rels = []
    for i, raw in enumerate(payload.get("relationshipTypes", [])):
        _expect(raw, dict, f"schema/relationshipTypes/{i}")
        type_name = _expect(raw.get("name"), str, f"schema/relationshipTypes/{i}/name")
        rels.append(
            RelationshipType(
                name=type_name,
                variations=_decode_variations(raw.get("variations"), type_name),
            )
        )
    model = USchemaModel(
        name=name, kind=kind, entity_types=tuple(entities), relationship_types=tuple(rels)
    )
    violations = validate_model(model)
    if violations:
        raise SchemaValidationError(violations)
    return model


def parse_schema(text: str) -> USchemaModel:
    """Parse a ``.uschema.json`` document string into a validated model."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaSyntaxError(exc.msg, exc.lineno, exc.colno) from exc
    return schema_from_payload(payload)


def load_schema(path: Union[str, Path]) -> USchemaModel:
    return parse_schema(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------


def _encode_data_type(dt: DataType) -> dict[str, Any]:
    if dt in SCALARS.values():
        return {"kind": dt.name}  # type: ignore[union-attr]
    if isinstance(dt, ArrayType):
        return {"kind": "array", "element": _encode_data_type(dt.element)}
    if isinstance(dt, SetType):
        return {"kind": "set", "element": _encode_data_type(dt.element)}
    if isinstance(dt, ListType):
        return {"kind": "list", "element": _encode_data_type(dt.element)}
    if isinstance(dt, TupleType):
        return {"kind": "tuple", "elements": [_encode_data_type(e) for e in dt.elements]}
    if isinstance(dt, MapType):
        return {
            "kind": "map",
            "key": _encode_data_type(dt.key),
            "value": _encode_data_type(dt.value),
        }
    if isinstance(dt, UnionType):
        return {"kind": "union", "members": [_encode_data_type(m) for m in dt.members]}
    raise TypeError(f"cannot encode {dt!r}")


def _encode_feature(f: Feature) -> dict[str, Any]:
    if isinstance(f, Attribute):
        return {"kind": "attribute", "name": f.name, "type": _encode_data_type(f.data_type)}
    if isinstance(f, Key):
        return {"kind": "key", "name": f.name, "attributes": list(f.attribute_names)}
    if isinstance(f, Reference):
        out: dict[str, Any] = {
            "kind": "reference",
            "name": f.name,
            "target": f.target,
            "cardinality": f.cardinality.render(),
        }
        if f.featured_by:
            out["featuredBy"] = [[rel, vid] for rel, vid in f.featured_by]
        return out
    return {
        "kind": "aggregate",
        "name": f.name,
        "target": f.target,
        "targetVariations": list(f.target_variation_ids),
        "cardinality": f.cardinality.render(),
    }


def _encode_variation(v: StructuralVariation) -> dict[str, Any]:
    out: dict[str, Any] = {
        "id": v.variation_id,
        "instanceCount": v.instance_count,
        "features": [_encode_feature(f) for f in sorted(v.features, key=feature_sort_key)],
    }
    if v.first_seen is not None:
        out["firstSeen"] = v.first_seen.isoformat()
    if v.last_seen is not None:
        out["lastSeen"] = v.last_seen.isoformat()
    return out


def schema_to_payload(model: USchemaModel) -> dict[str, Any]:
    return {
        "name": model.name,
        "kind": model.kind,
        "entityTypes": [
            {
                "name": t.name,
                "root": t.root,
                "variations": [
                    _encode_variation(v)
                    for v in sorted(t.variations, key=lambda v: v.variation_id)
                ],
            }
            for t in sorted(model.entity_types, key=lambda t: t.name)
        ],
        "relationshipTypes": [
            {
                "name": t.name,
                "variations": [
                    _encode_variation(v)
                    for v in sorted(t.variations, key=lambda v: v.variation_id)
                ],
            }
            for t in sorted(model.relationship_types, key=lambda t: t.name)
        ],
    }


def serialize_schema(model: USchemaModel) -> str:
    return json.dumps(schema_to_payload(model), indent=2, ensure_ascii=False) + "\n"


def save_schema(model: USchemaModel, path: Union[str, Path]) -> None:
    Path(path).write_text(serialize_schema(model), encoding="utf-8", newline="\n")
