"""Schema extraction from line-delimited document samples.

Each collection becomes a root entity type. Nested objects become aggregate
entity types named after the field (capitalized); every distinct structural
signature of an object becomes one variation. Reference detection is purely
configuration-driven: a field becomes a Reference only when its name matches
a configured pattern and the target entity was discovered in the samples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Any, Iterable, Optional

from skiql.model import (
    Aggregate,
    ArrayType,
    Attribute,
    BOOLEAN,
    DataType,
    EntityType,
    Key,
    MANY,
    NUMBER,
    ONE,
    Reference,
    STRING,
    SkiqlError,
    StructuralVariation,
    UNKNOWN,
    USchemaModel,
    feature_sort_key,
    make_union,
)
from skiql.parser import ParseError, parse_name_spec
from skiql.query_ast import NameSpec
from skiql.tokens import LexError


class ExtractionError(SkiqlError):
    pass


@dataclass(frozen=True)
class DocumentSample:
    collection_name: str
    records: tuple[dict, ...]


@dataclass(frozen=True)
class ReferenceRule:
    field_pattern: NameSpec
    target_entity_name: str


@dataclass(frozen=True)
class ExtractionConfig:
    id_field_name: str = "_id"
    reference_rules: tuple[ReferenceRule, ...] = ()
    timestamp_field: Optional[str] = None

    @staticmethod
    def from_payload(payload: dict) -> "ExtractionConfig":
        if not isinstance(payload, dict):
            raise ExtractionError("extraction config must be an object")
        rules = []
        for entry in payload.get("referenceHeuristics", []):
            pattern = entry.get("fieldNamePattern")
            target = entry.get("targetEntityName")
            if not isinstance(pattern, str) or not isinstance(target, str):
                raise ExtractionError(
                    "each reference heuristic needs fieldNamePattern and targetEntityName"
                )
            try:
                spec = parse_name_spec(pattern)
            except (LexError, ParseError) as exc:
                raise ExtractionError(f"bad fieldNamePattern {pattern!r}: {exc}") from None
            rules.append(ReferenceRule(spec, target))
        return ExtractionConfig(
            id_field_name=payload.get("idFieldName", "_id"),
            reference_rules=tuple(rules),
            timestamp_field=payload.get("timestampField"),
        )

    @staticmethod
    def from_file(path: str | Path) -> "ExtractionConfig":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ExtractionError(f"{path}: {exc}") from None
        return ExtractionConfig.from_payload(payload)


def read_samples_dir(path: str | Path) -> list[DocumentSample]:
    """Load every .jsonl file in a directory; the file stem names the collection."""
    root = Path(path)
    files = sorted(root.glob("*.jsonl"))
    if not files:
        raise ExtractionError(f"no .jsonl sample files in {root}")
    samples = []
    for file_path in files:
        records = []
        with open(file_path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ExtractionError(f"{file_path}:{lineno}: {exc}") from None
                if not isinstance(record, dict):
                    raise ExtractionError(
                        f"{file_path}:{lineno}: records must be objects"
                    )
                records.append(record)
        samples.append(DocumentSample(file_path.stem, tuple(records)))
    return samples


def _aggregate_name(field_name: str) -> str:
    return field_name[:1].upper() + field_name[1:]


def _is_scalar(value: Any) -> bool:
    return value is None or isinstance(value, (bool, int, float, str))


def _scalar_type(value: Any) -> DataType:
    if value is None:
        return UNKNOWN
    if isinstance(value, bool):
        return BOOLEAN
    if isinstance(value, (int, float)):
        return NUMBER
    return STRING


def _infer_attribute_type(value: Any, where: str) -> DataType:
    """Type of a value in attribute position. Objects are not allowed here."""
    if isinstance(value, dict):
        raise ExtractionError(f"{where}: objects below an array of scalars are not supported")
    if isinstance(value, list):
        members = [_infer_attribute_type(item, where) for item in value]
        if not members:
            return ArrayType(UNKNOWN)
        return ArrayType(make_union(members))
    return _scalar_type(value)


@dataclass
class _Occurrence:
    """One object observed for an entity, with classified slots.

    Slots map field name to one of
      ("attr", DataType)
      ("ref", target, Cardinality)
      ("agg", target, Cardinality, list of child _Occurrence)
    """

    entity: str
    slots: dict = field(default_factory=dict)
    timestamp: Optional[date] = None
    variation_id: int = 0

    def signature(self) -> tuple:
        items = []
        for name in sorted(self.slots):
            slot = self.slots[name]
            if slot[0] == "attr":
                items.append((name, "a:" + slot[1].render()))
            elif slot[0] == "ref":
                items.append((name, f"r:{slot[1]}:{slot[2].render()}"))
            else:
                items.append((name, f"g:{slot[1]}:{slot[2].render()}"))
        return tuple(items)

    def presence_key(self) -> tuple:
        """Signature with attribute types erased, for the null-merge pass."""
        items = []
        for name in sorted(self.slots):
            slot = self.slots[name]
            if slot[0] == "attr":
                items.append((name, "a"))
            elif slot[0] == "ref":
                items.append((name, f"r:{slot[1]}:{slot[2].render()}"))
            else:
                items.append((name, f"g:{slot[1]}:{slot[2].render()}"))
        return tuple(items)


class _Extractor:
    def __init__(self, samples: list[DocumentSample], config: ExtractionConfig):
        self.samples = samples
        self.config = config
        self.root_names = [s.collection_name for s in samples]
        self.entity_names: set[str] = set(self.root_names)
        self.occurrences: dict[str, list[_Occurrence]] = {}

    # -- discovery ---------------------------------------------------------

    def discover(self) -> None:
        """Collect every entity name before classification, so reference
        heuristics can check their targets exist."""
        if len(set(self.root_names)) != len(self.root_names):
            raise ExtractionError("duplicate collection names in samples")
        for sample in self.samples:
            if not sample.records:
                raise ExtractionError(f"collection {sample.collection_name!r} has no records")
            for record in sample.records:
                self._discover_object(sample.collection_name, record)

    def _discover_object(self, owner: str, obj: dict) -> None:
        for name, value in obj.items():
            nested = None
            if isinstance(value, dict):
                nested = [value]
            elif isinstance(value, list) and any(isinstance(v, dict) for v in value):
                nested = [v for v in value if isinstance(v, dict)]
            if nested is None:
                continue
            agg_name = _aggregate_name(name)
            if agg_name in self.root_names:
                raise ExtractionError(
                    f"nested field {name!r} in {owner} collides with collection {agg_name!r}"
                )
            self.entity_names.add(agg_name)
            for child in nested:
                self._discover_object(agg_name, child)

    # -- classification ------------------------------------------------------

    def _reference_target(self, field_name: str) -> Optional[str]:
        for rule in self.config.reference_rules:
            if rule.field_pattern.matches(field_name):
                if rule.target_entity_name in self.entity_names:
                    return rule.target_entity_name
                return None
        return None

    def classify(self) -> None:
        for sample in self.samples:
            for record in sample.records:
                self._classify_object(sample.collection_name, record, None)

    def _classify_object(
        self, entity: str, obj: dict, timestamp: Optional[date]
    ) -> _Occurrence:
        occ = _Occurrence(entity=entity)
        ts_field = self.config.timestamp_field
        if ts_field and ts_field in obj:
            occ.timestamp = self._parse_timestamp(entity, obj[ts_field])
        else:
            occ.timestamp = timestamp
        for name, value in obj.items():
            if name == ts_field:
                continue
            where = f"{entity}.{name}"
            if isinstance(value, dict):
                child = self._classify_object(_aggregate_name(name), value, occ.timestamp)
                occ.slots[name] = ("agg", child.entity, ONE, [child])
                continue
            if isinstance(value, list) and any(isinstance(v, dict) for v in value):
                if not all(isinstance(v, dict) for v in value):
                    raise ExtractionError(
                        f"{where}: array mixes objects with scalar values"
                    )
                children = [
                    self._classify_object(_aggregate_name(name), v, occ.timestamp)
                    for v in value
                ]
                occ.slots[name] = ("agg", children[0].entity, MANY, children)
                continue
            target = None if value is None else self._reference_target(name)
            if target is not None and name != self.config.id_field_name:
                card = MANY if isinstance(value, list) else ONE
                occ.slots[name] = ("ref", target, card)
                continue
            occ.slots[name] = ("attr", _infer_attribute_type(value, where))
        self.occurrences.setdefault(entity, []).append(occ)
        return occ

    def _parse_timestamp(self, entity: str, value: Any) -> date:
        if isinstance(value, str):
            try:
                return date.fromisoformat(value[:10])
            except ValueError:
                pass
        raise ExtractionError(
            f"{entity}.{self.config.timestamp_field}: expected an ISO date, got {value!r}"
        )

    # -- grouping --------------------------------------------------------------

    def build_model(self, name: str) -> USchemaModel:
        grouped = {entity: self._group_entity(entity) for entity in sorted(self.occurrences)}
        entity_types = []
        for entity, groups in grouped.items():
            variations = tuple(
                self._build_variation(variation_id, members)
                for variation_id, members in enumerate(groups, start=1)
            )
            entity_types.append(
                EntityType(
                    name=entity,
                    root=entity in self.root_names,
                    variations=variations,
                )
            )
        return USchemaModel(name=name, kind="aggregate", entity_types=tuple(entity_types))

    def _group_entity(self, entity: str) -> list[list[_Occurrence]]:
        """Group occurrences by signature and assign variation ids.

        Ids must be settled for every entity before any features are built,
        since Aggregate features record their target variation ids.
        """
        groups: dict[tuple, list[_Occurrence]] = {}
        for occ in self.occurrences[entity]:
            groups.setdefault(occ.signature(), []).append(occ)
        self._merge_null_groups(groups)
        ordered = sorted(
            groups.items(),
            key=lambda item: (self._group_first_seen(item[1]) or date.max, item[0]),
        )
        for variation_id, (_, members) in enumerate(ordered, start=1):
            for occ in members:
                occ.variation_id = variation_id
        return [members for _, members in ordered]

    @staticmethod
    def _group_first_seen(members: list[_Occurrence]) -> Optional[date]:
        stamps = [occ.timestamp for occ in members if occ.timestamp is not None]
        return min(stamps) if stamps else None

    def _merge_null_groups(self, groups: dict[tuple, list[_Occurrence]]) -> None:
        """Fold groups that differ from a concrete group only by Unknown
        attribute types (null values split variations on presence, not type)."""

        def unknown_slots(members: list[_Occurrence]) -> set[str]:
            occ = members[0]
            return {
                name
                for name, slot in occ.slots.items()
                if slot[0] == "attr" and slot[1] is UNKNOWN
            }

        incomplete = [sig for sig, members in groups.items() if unknown_slots(members)]
        for sig in sorted(incomplete):
            members = groups[sig]
            holes = unknown_slots(members)
            candidates = []
            for other_sig, other_members in groups.items():
                if other_sig == sig or other_sig in incomplete:
                    continue
                if other_members[0].presence_key() != members[0].presence_key():
                    continue
                if all(
                    dict(other_sig)[name] == dict(sig)[name]
                    for name in members[0].slots
                    if name not in holes
                    and members[0].slots[name][0] == "attr"
                ):
                    candidates.append(other_sig)
            if not candidates:
                continue
            chosen = min(candidates)
            groups[chosen].extend(members)
            del groups[sig]

    def _build_variation(
        self, variation_id: int, members: list[_Occurrence]
    ) -> StructuralVariation:
        features = []
        sample = members[0]
        for name in sorted(sample.slots):
            slot = sample.slots[name]
            if slot[0] == "attr":
                merged = make_union([occ.slots[name][1] for occ in members])
                features.append(Attribute(name, merged))
                if name == self.config.id_field_name:
                    features.append(Key(name, (name,)))
            elif slot[0] == "ref":
                features.append(Reference(name, slot[1], slot[2]))
            else:
                target_ids = sorted(
                    {
                        child.variation_id
                        for occ in members
                        for child in occ.slots[name][3]
                    }
                )
                features.append(Aggregate(name, slot[1], tuple(target_ids), slot[2]))
        stamps = [occ.timestamp for occ in members if occ.timestamp is not None]
        return StructuralVariation(
            variation_id=variation_id,
            features=tuple(sorted(features, key=feature_sort_key)),
            instance_count=len(members),
            first_seen=min(stamps) if stamps else None,
            last_seen=max(stamps) if stamps else None,
        )


def extract_schema(
    samples: list[DocumentSample],
    config: ExtractionConfig | None = None,
    name: str = "extracted",
) -> USchemaModel:
    """Infer a U-Schema model from document samples."""
    if not samples:
        raise ExtractionError("at least one sample collection is required")
    extractor = _Extractor(samples, config or ExtractionConfig())
    extractor.discover()
    extractor.classify()
    return extractor.build_model(name)
