"""Unified schema model for aggregate, graph, and relational stores.

A schema is a set of entity types (plus relationship types on graph stores),
each holding one or more structural variations.  A variation is the feature
set shared by all data objects with the same shape: attributes, keys,
references to other entity types, and aggregates of embedded entity types.

The module also provides the derived views built on top of that model:
feature classification (shared / non-shared / specific), union folding of
variations, whole-schema union views, and structural validation.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import date
from enum import Enum
from typing import Iterable, Optional, Union


class SkiqlError(Exception):
    """Base class for all errors raised by this package."""


class FeatureNotFoundError(SkiqlError):
    """A feature name was looked up on a type that never declares it."""


class KindConflictError(SkiqlError):
    """Union folding hit same-name features that cannot be merged."""


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DataType:
    """Base class for attribute data types.  Instances are immutable."""

    def render(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class ScalarType(DataType):
    name: str  # "number" | "string" | "boolean" | "unknown"

    def render(self) -> str:
        if self.name == "unknown":
            return "?"
        return self.name.capitalize()


NUMBER = ScalarType("number")
STRING = ScalarType("string")
BOOLEAN = ScalarType("boolean")
UNKNOWN = ScalarType("unknown")

SCALARS = {s.name: s for s in (NUMBER, STRING, BOOLEAN, UNKNOWN)}


@dataclass(frozen=True)
class ArrayType(DataType):
    element: DataType

    def render(self) -> str:
        return f"{self.element.render()}[]"


@dataclass(frozen=True)
class SetType(DataType):
    element: DataType

    def render(self) -> str:
        return f"Set<{self.element.render()}>"


@dataclass(frozen=True)
class ListType(DataType):
    element: DataType

    def render(self) -> str:
        return f"List<{self.element.render()}>"


@dataclass(frozen=True)
class TupleType(DataType):
    elements: tuple[DataType, ...]

    def render(self) -> str:
        inner = ", ".join(e.render() for e in self.elements)
        return f"Tuple<{inner}>"


@dataclass(frozen=True)
class MapType(DataType):
    key: DataType
    value: DataType

    def render(self) -> str:
        return f"Map<{self.key.render()}, {self.value.render()}>"


@dataclass(frozen=True)
class UnionType(DataType):
    """Two or more alternative types observed for the same attribute."""

    members: tuple[DataType, ...]

    def render(self) -> str:
        return "|".join(m.render() for m in self.members)


def make_union(members: Iterable[DataType]) -> DataType:
    """Build the canonical union of ``members``.

    Nested unions are flattened, duplicates dropped, unknown absorbed by any
    concrete member, and the result is sorted by rendered form so that the
    union of a set of types is unique.  A single surviving member is returned
    bare, an empty input collapses to unknown.
    """
    flat: list[DataType] = []
    for m in members:
        if isinstance(m, UnionType):
            flat.extend(m.members)
        else:
            flat.append(m)
    concrete = [m for m in flat if m != UNKNOWN]
    if not concrete:
        return UNKNOWN
    uniq: dict[str, DataType] = {}
    for m in concrete:
        uniq.setdefault(m.render(), m)
    ordered = [uniq[k] for k in sorted(uniq)]
    if len(ordered) == 1:
        return ordered[0]
    return UnionType(tuple(ordered))


# ---------------------------------------------------------------------------
# Cardinality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cardinality:
    """One of the four multiplicities a relationship feature may carry."""

    lower: int  # 0 or 1
    upper: Optional[int]  # 1, or None for unbounded

    def __post_init__(self) -> None:
        if (self.lower, self.upper) not in {(0, 1), (1, 1), (0, None), (1, None)}:
            raise ValueError(f"illegal cardinality {self.lower}..{self.upper}")

    def render(self) -> str:
        upper = "*" if self.upper is None else str(self.upper)
        return f"{self.lower}..{upper}"

    @staticmethod
    def parse(text: str) -> "Cardinality":
        lower_s, _, upper_s = text.partition("..")
        if not _:
            raise ValueError(f"malformed cardinality {text!r}")
        return Cardinality(int(lower_s), None if upper_s == "*" else int(upper_s))

    @staticmethod
    def widen(a: "Cardinality", b: "Cardinality") -> "Cardinality":
        lower = min(a.lower, b.lower)
        upper = None if a.upper is None or b.upper is None else max(a.upper, b.upper)
        return Cardinality(lower, upper)


ONE = Cardinality(1, 1)
OPT = Cardinality(0, 1)
MANY = Cardinality(0, None)
SOME = Cardinality(1, None)


# ---------------------------------------------------------------------------
# Features
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Attribute:
    name: str
    data_type: DataType


@dataclass(frozen=True)
class Key:
    """Object identity formed by one or more attributes of the variation."""

    name: str
    attribute_names: tuple[str, ...]


@dataclass(frozen=True)
class Reference:
    """A feature pointing at instances of another entity type by identity.

    On graph stores a reference is materialised as arcs, and ``featured_by``
    names the relationship-type variations those arcs belong to.
    """

    name: str
    target: str
    cardinality: Cardinality
    featured_by: tuple[tuple[str, int], ...] = ()


@dataclass(frozen=True)
class Aggregate:
    """A feature embedding instances of an aggregate entity type."""

    name: str
    target: str
    target_variation_ids: tuple[int, ...]
    cardinality: Cardinality


Feature = Union[Attribute, Key, Reference, Aggregate]

# Sort rank used wherever a variation's features are put into canonical
# order; the attribute backing a key sorts just before the key itself.
_KIND_RANK = {Attribute: 0, Key: 1, Reference: 2, Aggregate: 3}


def feature_sort_key(feature: Feature) -> tuple[str, int]:
    return (feature.name, _KIND_RANK[type(feature)])


def is_relationship_feature(feature: Feature) -> bool:
    return isinstance(feature, (Reference, Aggregate))


# ---------------------------------------------------------------------------
# Variations and schema types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StructuralVariation:
    variation_id: int
    features: tuple[Feature, ...]
    instance_count: int = 0
    first_seen: Optional[date] = None
    last_seen: Optional[date] = None

    def feature_names(self) -> set[str]:
        return {f.name for f in self.features}

    def features_named(self, name: str) -> list[Feature]:
        return [f for f in self.features if f.name == name]

    def attribute(self, name: str) -> Optional[Attribute]:
        for f in self.features:
            if isinstance(f, Attribute) and f.name == name:
                return f
        return None

    def relationship_features(self) -> list[Feature]:
        return [f for f in self.features if is_relationship_feature(f)]


@dataclass(frozen=True)
class EntityType:
    name: str
    root: bool
    variations: tuple[StructuralVariation, ...]

    def variation(self, variation_id: int) -> Optional[StructuralVariation]:
        for v in self.variations:
            if v.variation_id == variation_id:
                return v
        return None


@dataclass(frozen=True)
class RelationshipType:
    """A named arc type of a graph store, with its own variations."""

    name: str
    variations: tuple[StructuralVariation, ...]

    def variation(self, variation_id: int) -> Optional[StructuralVariation]:
        for v in self.variations:
            if v.variation_id == variation_id:
                return v
        return None


SchemaType = Union[EntityType, RelationshipType]


@dataclass(frozen=True)
class USchemaModel:
    name: str
    kind: str  # "aggregate" | "graph" | "relational"
    entity_types: tuple[EntityType, ...]
    relationship_types: tuple[RelationshipType, ...] = ()

    def entity_type(self, name: str) -> Optional[EntityType]:
        for t in self.entity_types:
            if t.name == name:
                return t
        return None

    def relationship_type(self, name: str) -> Optional[RelationshipType]:
        for t in self.relationship_types:
            if t.name == name:
                return t
        return None


SCHEMA_KINDS = ("aggregate", "graph", "relational")


# ---------------------------------------------------------------------------
# Feature classification
# ---------------------------------------------------------------------------


class FeatureClass(Enum):
    SHARED = "shared"
    NON_SHARED = "non-shared"
    SPECIFIC = "specific"

    @property
    def prefix(self) -> str:
        return {"shared": "+", "non-shared": "?", "specific": "-"}[self.value]


def classify_feature(schema_type: SchemaType, feature_name: str) -> FeatureClass:
    """Classify a feature by how many of the type's variations declare it.

    Shared features appear in every variation (so a single-variation type has
    only shared features), specific features in exactly one of several, and
    anything in between is merely non-shared.
    """
    total = len(schema_type.variations)
    hits = sum(1 for v in schema_type.variations if feature_name in v.feature_names())
    if hits == 0:
        raise FeatureNotFoundError(
            f"{schema_type.name} has no feature named {feature_name!r}"
        )
    if hits == total:
        return FeatureClass.SHARED
    if hits == 1 and total > 1:
        return FeatureClass.SPECIFIC
    return FeatureClass.NON_SHARED


# ---------------------------------------------------------------------------
# Union folding
# ---------------------------------------------------------------------------


def _merge_attribute_types(a: DataType, b: DataType) -> DataType:
    if a == b:
        return a
    return make_union([a, b])


def _fold_features(
    type_name: str, variations: Iterable[StructuralVariation]
) -> tuple[Feature, ...]:
    # Keys fold in their own namespace: a key may legitimately share its
    # name with the attribute it is formed by.
    merged: dict[tuple[bool, str], Feature] = {}
    for variation in variations:
        for f in variation.features:
            slot = (isinstance(f, Key), f.name)
            prev = merged.get(slot)
            if prev is None:
                merged[slot] = f
                continue
            if type(prev) is not type(f):
                raise KindConflictError(
                    f"{type_name}.{f.name}: cannot fold "
                    f"{type(prev).__name__} with {type(f).__name__}"
                )
            if isinstance(f, Attribute):
                assert isinstance(prev, Attribute)
                merged[slot] = Attribute(
                    f.name, _merge_attribute_types(prev.data_type, f.data_type)
                )
            elif isinstance(f, Key):
                assert isinstance(prev, Key)
                names = sorted(set(prev.attribute_names) | set(f.attribute_names))
                merged[slot] = Key(f.name, tuple(names))
            elif isinstance(f, Reference):
                assert isinstance(prev, Reference)
                if prev.target != f.target:
                    raise KindConflictError(
                        f"{type_name}.{f.name}: reference targets differ "
                        f"({prev.target} vs {f.target})"
                    )
                featured = sorted(set(prev.featured_by) | set(f.featured_by))
                merged[slot] = Reference(
                    f.name,
                    f.target,
                    Cardinality.widen(prev.cardinality, f.cardinality),
                    tuple(featured),
                )
            else:
                assert isinstance(f, Aggregate) and isinstance(prev, Aggregate)
                if prev.target != f.target:
                    raise KindConflictError(
                        f"{type_name}.{f.name}: aggregate targets differ "
                        f"({prev.target} vs {f.target})"
                    )
                ids = sorted(set(prev.target_variation_ids) | set(f.target_variation_ids))
                merged[slot] = Aggregate(
                    f.name,
                    f.target,
                    tuple(ids),
                    Cardinality.widen(prev.cardinality, f.cardinality),
                )
    return tuple(sorted(merged.values(), key=feature_sort_key))


def union_type(
    schema_type: SchemaType,
    variations: Optional[Iterable[StructuralVariation]] = None,
) -> StructuralVariation:
    """Fold variations of one schema type into a single variation.

    By default all variations fold; passing ``variations`` restricts the fold
    to a selection of them (the engine folds exactly the variations a query
    kept).  Colliding attributes widen to union types, colliding references
    and aggregates merge their target lists and widen cardinality, and
    instance counts are summed.  Same-name features of different kinds
    cannot fold and raise :class:`KindConflictError`.
    """
    folded = tuple(schema_type.variations if variations is None else variations)
    if not folded:
        raise ValueError(f"{schema_type.name}: nothing to fold")
    features = _fold_features(schema_type.name, folded)
    firsts = [v.first_seen for v in folded if v.first_seen is not None]
    lasts = [v.last_seen for v in folded if v.last_seen is not None]
    return StructuralVariation(
        variation_id=1,
        features=features,
        instance_count=sum(v.instance_count for v in folded),
        first_seen=min(firsts) if firsts else None,
        last_seen=max(lasts) if lasts else None,
    )


def _strip_relationships(variation: StructuralVariation) -> StructuralVariation:
    kept = tuple(f for f in variation.features if not is_relationship_feature(f))
    return replace(variation, features=kept)


def _retarget_folded(variation: StructuralVariation) -> StructuralVariation:
    # After every type folds to a single variation, embedded targets and
    # featuring arcs can only point at variation 1.
    rewritten: list[Feature] = []
    for f in variation.features:
        if isinstance(f, Aggregate):
            rewritten.append(replace(f, target_variation_ids=(1,)))
        elif isinstance(f, Reference) and f.featured_by:
            names = sorted({rel for rel, _ in f.featured_by})
            rewritten.append(replace(f, featured_by=tuple((n, 1) for n in names)))
        else:
            rewritten.append(f)
    return replace(variation, features=tuple(rewritten))


def union_schema(model: USchemaModel, with_relationships: bool = True) -> USchemaModel:
    """Fold every type of the model into its union variation.

    With ``with_relationships`` false the folded variations additionally drop
    reference and aggregate features, leaving attribute-only union types; the
    formerly embedded entity types then stand alone as root types.
    """
    entity_types = []
    for t in model.entity_types:
        folded = union_type(t)
        if with_relationships:
            folded = _retarget_folded(folded)
            root = t.root
        else:
            folded = _strip_relationships(folded)
            root = True
        entity_types.append(EntityType(t.name, root, (folded,)))
    relationship_types = tuple(
        RelationshipType(t.name, (union_type(t),)) for t in model.relationship_types
    )
    if not with_relationships:
        relationship_types = ()
    return USchemaModel(
        name=model.name,
        kind=model.kind,
        entity_types=tuple(entity_types),
        relationship_types=relationship_types,
    )


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    path: str
    rule: str
    message: str


def _check_data_type(dt: DataType, path: str, out: list[Violation]) -> None:
    if isinstance(dt, UnionType):
        if len(dt.members) < 2:
            out.append(Violation(path, "DegenerateUnion", "union needs two members"))
        for m in dt.members:
            if m == UNKNOWN:
                out.append(
                    Violation(path, "UnknownInUnion", "union may not contain unknown")
                )
            if isinstance(m, UnionType):
                out.append(Violation(path, "NestedUnion", "union members must be flat"))
            else:
                _check_data_type(m, path, out)
    elif isinstance(dt, (ArrayType, SetType, ListType)):
        _check_data_type(dt.element, path, out)
    elif isinstance(dt, TupleType):
        for e in dt.elements:
            _check_data_type(e, path, out)
    elif isinstance(dt, MapType):
        _check_data_type(dt.key, path, out)
        _check_data_type(dt.value, path, out)


def _check_variations(
    owner: str,
    variations: tuple[StructuralVariation, ...],
    out: list[Violation],
) -> None:
    if not variations:
        out.append(Violation(owner, "NoVariations", "a type needs one variation"))
        return
    ids = sorted(v.variation_id for v in variations)
    if ids != list(range(1, len(variations) + 1)):
        out.append(
            Violation(
                owner,
                "BadVariationIds",
                f"variation ids must be 1..{len(variations)}, got {ids}",
            )
        )
    for v in variations:
        path = f"{owner}/{v.variation_id}"
        seen: set[tuple[bool, str]] = set()
        for f in v.features:
            slot = (isinstance(f, Key), f.name)
            if slot in seen:
                out.append(
                    Violation(
                        f"{path}/{f.name}",
                        "DuplicateFeatureName",
                        "feature names must be unique within a variation",
                    )
                )
            seen.add(slot)
            if isinstance(f, Attribute):
                _check_data_type(f.data_type, f"{path}/{f.name}", out)
            elif isinstance(f, Key):
                if not f.attribute_names:
                    out.append(
                        Violation(
                            f"{path}/{f.name}",
                            "EmptyKey",
                            "a key is formed by at least one attribute",
                        )
                    )
                for attr_name in f.attribute_names:
                    if v.attribute(attr_name) is None:
                        out.append(
                            Violation(
                                f"{path}/{f.name}",
                                "KeyAttributeMissing",
                                f"key names attribute {attr_name!r} "
                                "not present in this variation",
                            )
                        )
        if v.instance_count < 0:
            out.append(Violation(path, "NegativeCount", "instance count must be >= 0"))
        if v.first_seen and v.last_seen and v.first_seen > v.last_seen:
            out.append(
                Violation(path, "BadTimestamps", "firstSeen must not exceed lastSeen")
            )


def validate_model(model: USchemaModel) -> list[Violation]:
    """Check every structural rule; an empty list means the model is sound."""
    out: list[Violation] = []
    if model.kind not in SCHEMA_KINDS:
        out.append(
            Violation(model.name or "<model>", "BadKind", f"unknown kind {model.kind!r}")
        )

    seen_entities: set[str] = set()
    for t in model.entity_types:
        if t.name in seen_entities:
            out.append(Violation(t.name, "DuplicateTypeName", "entity type declared twice"))
        seen_entities.add(t.name)
    seen_rels: set[str] = set()
    for r in model.relationship_types:
        if r.name in seen_rels:
            out.append(
                Violation(r.name, "DuplicateTypeName", "relationship type declared twice")
            )
        seen_rels.add(r.name)

    if model.relationship_types and model.kind != "graph":
        out.append(
            Violation(
                model.name or "<model>",
                "RelationshipsRequireGraph",
                "only graph schemas declare relationship types",
            )
        )

    entities = {t.name: t for t in model.entity_types}
    rels = {r.name: r for r in model.relationship_types}
    aggregated: set[str] = set()

    for t in model.entity_types:
        if model.kind == "graph" and not t.root:
            out.append(
                Violation(
                    t.name,
                    "NonRootEntityInGraphSchema",
                    "graph schemas have root entity types only",
                )
            )
        _check_variations(t.name, t.variations, out)
        for v in t.variations:
            for f in v.features:
                path = f"{t.name}/{v.variation_id}/{f.name}"
                if isinstance(f, Reference):
                    if f.target not in entities:
                        out.append(
                            Violation(
                                path,
                                "DanglingReference",
                                f"reference targets unknown entity type {f.target!r}",
                            )
                        )
                    if f.featured_by and model.kind != "graph":
                        out.append(
                            Violation(
                                path,
                                "FeaturedByOutsideGraph",
                                "only graph references belong to relationship types",
                            )
                        )
                    for rel_name, rel_var in f.featured_by:
                        rel = rels.get(rel_name)
                        if rel is None:
                            out.append(
                                Violation(
                                    path,
                                    "DanglingFeaturedBy",
                                    f"unknown relationship type {rel_name!r}",
                                )
                            )
                        elif rel.variation(rel_var) is None:
                            out.append(
                                Violation(
                                    path,
                                    "DanglingFeaturedBy",
                                    f"relationship type {rel_name!r} has no "
                                    f"variation {rel_var}",
                                )
                            )
                elif isinstance(f, Aggregate):
                    if model.kind == "graph":
                        out.append(
                            Violation(
                                path,
                                "AggregateInGraphSchema",
                                "graph schemas cannot embed entity types",
                            )
                        )
                    target = entities.get(f.target)
                    if target is None:
                        out.append(
                            Violation(
                                path,
                                "DanglingAggregate",
                                f"aggregate targets unknown entity type {f.target!r}",
                            )
                        )
                        continue
                    aggregated.add(f.target)
                    if target.root:
                        out.append(
                            Violation(
                                path,
                                "AggregateTargetIsRoot",
                                f"{f.target} is a root entity type",
                            )
                        )
                    if not f.target_variation_ids:
                        out.append(
                            Violation(
                                path,
                                "EmptyAggregateTargets",
                                "aggregate lists no target variations",
                            )
                        )
                    for vid in f.target_variation_ids:
                        if target.variation(vid) is None:
                            out.append(
                                Violation(
                                    path,
                                    "MissingAggregateTargetVariation",
                                    f"{f.target} has no variation {vid}",
                                )
                            )

    for r in model.relationship_types:
        _check_variations(r.name, r.variations, out)
        for v in r.variations:
            for f in v.features:
                path = f"{r.name}/{v.variation_id}/{f.name}"
                if isinstance(f, Aggregate):
                    out.append(
                        Violation(
                            path,
                            "AggregateInRelationshipType",
                            "relationship types carry attributes, not embeddings",
                        )
                    )
                elif isinstance(f, Reference):
                    if f.target not in entities:
                        out.append(
                            Violation(
                                path,
                                "DanglingReference",
                                f"reference targets unknown entity type {f.target!r}",
                            )
                        )

    for t in model.entity_types:
        if not t.root and t.name not in aggregated:
            out.append(
                Violation(
                    t.name,
                    "OrphanAggregateEntity",
                    "no aggregate feature embeds this non-root entity type",
                )
            )

    return out
