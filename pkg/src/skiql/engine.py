"""Query evaluation over U-Schema models.

Both query forms produce a ResultSubschema: a set of variation nodes (plus
type-level nodes for unconstrained reference targets), relationship edges
between them, and per-node inline relationships for the relationship
features that the query did not traverse. Every edge endpoint is a node;
a relationship feature of an included variation is either an edge or an
inline entry, never both.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Union as TUnion

from skiql.model import (
    Aggregate,
    Attribute,
    Cardinality,
    EntityType,
    Key,
    Reference,
    RelationshipType,
    SkiqlError,
    StructuralVariation,
    UNKNOWN,
    USchemaModel,
    UnionType,
    classify_feature,
    union_type,
)
from skiql.query_ast import (
    AggregateTypeSpec,
    AllNames,
    AttributeTypeSpec,
    FeatureSpec,
    HistoryAfter,
    HistoryBefore,
    HistoryBetween,
    KeysOp,
    NameSpec,
    NoSource,
    NoTarget,
    Query,
    ReferenceTypeSpec,
    RegexName,
    RelKind,
    RelQuery,
    TargetSpec,
    TypeQuery,
    TypeTarget,
    VariationFilter,
)

SchemaType = TUnion[EntityType, RelationshipType]

TYPE_LEVEL = None
UNION_ID = 0


class HistoryUnavailable(SkiqlError):
    """`history` was requested but no selected variation carries timestamps."""


@dataclass(frozen=True)
class NodeKey:
    kind: str  # "entity" | "relationship"
    type_name: str
    variation_id: Optional[int]  # None type-level, 0 union, otherwise the id

    def sort_key(self) -> tuple:
        vid = -1 if self.variation_id is None else self.variation_id
        return (self.kind, self.type_name, vid)


@dataclass
class ResultNode:
    key: NodeKey
    schema_type: SchemaType
    variation: Optional[StructuralVariation]

    @property
    def is_union(self) -> bool:
        return self.key.variation_id == UNION_ID


@dataclass(frozen=True)
class AggregationEdge:
    source: NodeKey
    feature_name: str
    cardinality: Cardinality
    target: NodeKey


@dataclass(frozen=True)
class ReferenceEdge:
    source: NodeKey
    feature_name: str
    cardinality: Cardinality
    target: NodeKey


@dataclass(frozen=True)
class FeaturingEdge:
    """Connects the reference edge (source, feature_name) to a relationship
    type variation node."""

    source: NodeKey
    feature_name: str
    target: NodeKey


@dataclass(frozen=True)
class InlineRelationship:
    kind: str  # "reference" | "aggregate"
    name: str
    cardinality: Cardinality
    target_name: str


@dataclass
class ResultSubschema:
    model: USchemaModel
    nodes: tuple[ResultNode, ...] = ()
    aggregation_edges: tuple[AggregationEdge, ...] = ()
    reference_edges: tuple[ReferenceEdge, ...] = ()
    featuring_edges: tuple[FeaturingEdge, ...] = ()
    inline: dict = field(default_factory=dict)  # NodeKey -> tuple[InlineRelationship]
    message: Optional[str] = None
    chronological: bool = False

    def node(self, key: NodeKey) -> ResultNode:
        for node in self.nodes:
            if node.key == key:
                return node
        raise KeyError(key)


# -- predicate primitives ------------------------------------------------------


def match_name(spec: NameSpec, name: str) -> bool:
    return spec.matches(name)


def _type_spec_satisfied(spec, feature) -> bool:
    if spec is None:
        return True
    if isinstance(spec, AttributeTypeSpec):
        if spec.data_type is UNKNOWN:
            return True
        if not isinstance(feature, Attribute):
            return False
        if feature.data_type == spec.data_type:
            return True
        if isinstance(feature.data_type, UnionType):
            return any(m == spec.data_type for m in feature.data_type.members)
        return False
    if isinstance(spec, ReferenceTypeSpec):
        return isinstance(feature, Reference) and (
            spec.target is None or feature.target == spec.target
        )
    if isinstance(spec, AggregateTypeSpec):
        return isinstance(feature, Aggregate) and (
            spec.target is None or feature.target == spec.target
        )
    raise TypeError(f"unexpected type spec {spec!r}")


def _feature_spec_satisfied(
    fs: FeatureSpec, schema_type: SchemaType, variation: StructuralVariation
) -> bool:
    for feature in variation.features:
        if feature.name != fs.name:
            continue
        if not _type_spec_satisfied(fs.type_spec, feature):
            continue
        if fs.class_modifier is not None:
            if classify_feature(schema_type, fs.name) is not fs.class_modifier:
                return False
        return True
    return False


def match_variation(
    flt: Optional[VariationFilter],
    schema_type: SchemaType,
    variation: StructuralVariation,
) -> bool:
    if flt is None:
        return True
    return all(_feature_spec_satisfied(fs, schema_type, variation) for fs in flt.specs)


# -- result assembly -----------------------------------------------------------


class _Builder:
    """Accumulates nodes and edges with de-duplication, then emits the
    ResultSubschema in the canonical order."""

    def __init__(self, model: USchemaModel):
        self.model = model
        self.nodes: dict[NodeKey, ResultNode] = {}
        self.agg_edges: dict[AggregationEdge, None] = {}
        self.ref_edges: dict[ReferenceEdge, None] = {}
        self.feat_edges: dict[FeaturingEdge, None] = {}

    def entity_variation(self, type_name: str, variation_id: int) -> NodeKey:
        key = NodeKey("entity", type_name, variation_id)
        if key not in self.nodes:
            etype = self.model.entity_type(type_name)
            self.nodes[key] = ResultNode(key, etype, etype.variation(variation_id))
        return key

    def entity_type_level(self, type_name: str) -> NodeKey:
        key = NodeKey("entity", type_name, TYPE_LEVEL)
        if key not in self.nodes:
            self.nodes[key] = ResultNode(key, self.model.entity_type(type_name), None)
        return key

    def relationship_variation(self, type_name: str, variation_id: int) -> NodeKey:
        key = NodeKey("relationship", type_name, variation_id)
        if key not in self.nodes:
            rtype = self.model.relationship_type(type_name)
            self.nodes[key] = ResultNode(key, rtype, rtype.variation(variation_id))
        return key

    def add_aggregation(self, source: NodeKey, feature: Aggregate, target_ids: Iterable[int]):
        for vid in target_ids:
            target = self.entity_variation(feature.target, vid)
            self.agg_edges[
                AggregationEdge(source, feature.name, feature.cardinality, target)
            ] = None

    def add_reference(
        self,
        source: NodeKey,
        feature: Reference,
        featuring: Iterable[tuple[str, int]],
    ):
        target = self.entity_type_level(feature.target)
        self.ref_edges[
            ReferenceEdge(source, feature.name, feature.cardinality, target)
        ] = None
        for rel_name, vid in featuring:
            rel_node = self.relationship_variation(rel_name, vid)
            self.feat_edges[FeaturingEdge(source, feature.name, rel_node)] = None

    def edge_feature_names(self, key: NodeKey) -> set[str]:
        names = {e.feature_name for e in self.agg_edges if e.source == key}
        names |= {e.feature_name for e in self.ref_edges if e.source == key}
        return names

    def build(self, message: Optional[str] = None, chronological: bool = False) -> ResultSubschema:
        inline = {}
        for key, node in self.nodes.items():
            if node.variation is None:
                continue
            taken = self.edge_feature_names(key)
            entries = []
            for feature in node.variation.relationship_features():
                if feature.name in taken:
                    continue
                kind = "reference" if isinstance(feature, Reference) else "aggregate"
                entries.append(
                    InlineRelationship(kind, feature.name, feature.cardinality, feature.target)
                )
            if entries:
                inline[key] = tuple(entries)
        if chronological:
            def order(node: ResultNode):
                seen = node.variation.first_seen if node.variation else None
                return (node.key.kind, node.key.type_name, seen, node.key.variation_id)
        else:
            def order(node: ResultNode):
                return node.key.sort_key()
        nodes = tuple(sorted(self.nodes.values(), key=order))
        edge_order = lambda e: (e.source.sort_key(), e.feature_name, e.target.sort_key())
        return ResultSubschema(
            model=self.model,
            nodes=nodes,
            aggregation_edges=tuple(sorted(self.agg_edges, key=edge_order)),
            reference_edges=tuple(sorted(self.ref_edges, key=edge_order)),
            featuring_edges=tuple(sorted(self.feat_edges, key=edge_order)),
            inline=inline,
            message=message,
            chronological=chronological,
        )


def _empty_result(model: USchemaModel, message: str) -> ResultSubschema:
    return ResultSubschema(model=model, message=message)


# -- type queries ---------------------------------------------------------------


def _rel_types_for_spec(model: USchemaModel, spec: NameSpec) -> dict[str, set[int]]:
    """Relationship-type variations selected by a REL name spec: those whose
    own name matches, plus the featuring variations of references that target
    a matching entity type."""
    selected: dict[str, set[int]] = {}
    for rtype in model.relationship_types:
        if match_name(spec, rtype.name):
            selected.setdefault(rtype.name, set()).update(
                v.variation_id for v in rtype.variations
            )
    for etype in model.entity_types:
        for variation in etype.variations:
            for feature in variation.features:
                if not isinstance(feature, Reference):
                    continue
                if not match_name(spec, feature.target):
                    continue
                for rel_name, vid in feature.featured_by:
                    selected.setdefault(rel_name, set()).add(vid)
    return selected


def _execute_type_query(
    model: USchemaModel, query: TypeQuery
) -> ResultSubschema:
    selected: list[tuple[SchemaType, str, list[StructuralVariation]]] = []
    matched_any_name = False

    if query.target in (TypeTarget.ENTITY, TypeTarget.ANY):
        for etype in model.entity_types:
            if match_name(query.spec, etype.name):
                matched_any_name = True
                kept = [
                    v
                    for v in etype.variations
                    if match_variation(query.filter, etype, v)
                ]
                if kept:
                    selected.append((etype, "entity", kept))
    if query.target in (TypeTarget.REL, TypeTarget.ANY):
        rel_selection = _rel_types_for_spec(model, query.spec)
        if rel_selection:
            matched_any_name = True
        for rel_name in rel_selection:
            rtype = model.relationship_type(rel_name)
            kept = [
                rtype.variation(vid)
                for vid in sorted(rel_selection[rel_name])
                if match_variation(query.filter, rtype, rtype.variation(vid))
            ]
            if kept:
                selected.append((rtype, "relationship", kept))

    if not matched_any_name:
        return _empty_result(model, f"no schema type matches {query.spec.render()}")
    if not selected:
        return _empty_result(model, "no variations pass the filter")

    if query.union:
        selected = [
            (stype, kind, [union_type(stype, variations)])
            for stype, kind, variations in selected
        ]

    chronological = False
    for operation in query.operations:
        if isinstance(operation, KeysOp):
            selected, message = _apply_keys(selected)
            if not selected:
                return _empty_result(model, message)
        else:
            selected, message = _apply_history(selected, operation)
            chronological = True
            if not selected:
                return _empty_result(model, message)

    builder = _Builder(model)
    for stype, kind, variations in selected:
        for variation in variations:
            vid = UNION_ID if query.union else variation.variation_id
            key = NodeKey(kind, stype.name, vid)
            builder.nodes[key] = ResultNode(key, stype, variation)
    return builder.build(chronological=chronological)


def _apply_keys(selected):
    survivors = []
    notes = []
    for stype, kind, variations in selected:
        kept = []
        for variation in variations:
            keys = [f for f in variation.features if isinstance(f, Key)]
            if not keys:
                continue
            named = {name for key in keys for name in key.attribute_names}
            features = tuple(
                f
                for f in variation.features
                if isinstance(f, Key) or (isinstance(f, Attribute) and f.name in named)
            )
            kept.append(replace(variation, features=features))
        if kept:
            survivors.append((stype, kind, kept))
        else:
            notes.append(f"{stype.name} has no keys")
    return survivors, "; ".join(notes)


def _apply_history(selected, operation):
    if not any(
        variation.first_seen is not None
        for _, _, variations in selected
        for variation in variations
    ):
        raise HistoryUnavailable("no selected variation carries timestamps")
    if isinstance(operation, HistoryBefore):
        keep = lambda d: d is not None and d < operation.day
    elif isinstance(operation, HistoryAfter):
        keep = lambda d: d is not None and d > operation.day
    else:
        assert isinstance(operation, HistoryBetween)
        keep = lambda d: d is not None and operation.start <= d <= operation.end
    survivors = []
    for stype, kind, variations in selected:
        kept = [v for v in variations if keep(v.first_seen)]
        if kept:
            survivors.append((stype, kind, kept))
    return survivors, "no variations first seen in the interval"


# -- relationship queries ---------------------------------------------------------


@dataclass
class _Contribution:
    """Deferred result fragments for one satisfied RelSpec at one source."""

    aggregations: list = field(default_factory=list)  # (feature, [target vids])
    references: list = field(default_factory=list)  # (feature, [(rel, vid)])
    extra_entity_variations: list = field(default_factory=list)  # (type, vid)
    path_hops: list = field(default_factory=list)  # _Hop sequences flattened


@dataclass(frozen=True)
class _Hop:
    source_type: str
    source_vid: int
    feature_name: str

    def resolve(self, model: USchemaModel):
        variation = model.entity_type(self.source_type).variation(self.source_vid)
        for feature in variation.relationship_features():
            if feature.name == self.feature_name:
                return feature
        raise KeyError(self.feature_name)


def _normalize_spec(spec) -> TargetSpec:
    if isinstance(spec, NoTarget):
        return TargetSpec(spec=AllNames(), kind=RelKind.ANY)
    return spec


def _passing_variations(
    flt: Optional[VariationFilter], stype: SchemaType
) -> list[int]:
    return [
        v.variation_id
        for v in stype.variations
        if match_variation(flt, stype, v)
    ]


def _featuring_pairs(
    model: USchemaModel, feature: Reference, ref_filter: Optional[VariationFilter]
) -> Optional[list[tuple[str, int]]]:
    """Featuring pairs to draw for a reference; None when a ref filter is
    present and nothing passes it (the spec is then unsatisfied)."""
    pairs = list(feature.featured_by)
    if ref_filter is not None:
        pairs = [
            (rel, vid)
            for rel, vid in pairs
            if match_variation(
                ref_filter,
                model.relationship_type(rel),
                model.relationship_type(rel).variation(vid),
            )
        ]
        if not pairs:
            return None
    return pairs


def _direct_matches(
    model: USchemaModel,
    source_type: EntityType,
    variation: StructuralVariation,
    spec: TargetSpec,
) -> Optional[_Contribution]:
    contribution = _Contribution()
    satisfied = False
    for feature in variation.relationship_features():
        if isinstance(feature, Reference):
            if spec.kind is RelKind.AGGR:
                continue
            if spec.feature_name is not None and feature.name != spec.feature_name:
                continue
            if not match_name(spec.spec, feature.target):
                continue
            target_type = model.entity_type(feature.target)
            extra = []
            if spec.target_filter is not None:
                passing = _passing_variations(spec.target_filter, target_type)
                if not passing:
                    continue
                extra = [(feature.target, vid) for vid in passing]
            pairs = _featuring_pairs(model, feature, spec.ref_filter)
            if pairs is None:
                continue
            contribution.references.append((feature, pairs))
            contribution.extra_entity_variations.extend(extra)
            satisfied = True
        else:  # Aggregate
            if spec.kind is RelKind.REF:
                continue
            if spec.ref_filter is not None:
                continue
            if spec.feature_name is not None and feature.name != spec.feature_name:
                continue
            if not match_name(spec.spec, feature.target):
                continue
            target_type = model.entity_type(feature.target)
            target_ids = list(feature.target_variation_ids)
            if spec.target_filter is not None:
                passing = set(_passing_variations(spec.target_filter, target_type))
                target_ids = [vid for vid in target_ids if vid in passing]
                if not target_ids:
                    continue
            contribution.aggregations.append((feature, target_ids))
            satisfied = True
    return contribution if satisfied else None


def enumerate_paths(
    model: USchemaModel, source_type: str, source_vid: int
) -> list[list[_Hop]]:
    """Every simple path of relationship hops from one variation.

    A path enters any entity type at most once (the starting type may be
    re-entered once, which is what makes cycles back to the source visible).
    Aggregate hops continue from the aggregated target variations; reference
    hops continue from all variations of the referenced type.
    """
    paths: list[list[_Hop]] = []

    def walk(type_name: str, vid: int, visited: frozenset, trail: list[_Hop]):
        variation = model.entity_type(type_name).variation(vid)
        for feature in variation.relationship_features():
            if feature.target in visited:
                continue
            hop = _Hop(type_name, vid, feature.name)
            paths.append(trail + [hop])
            next_visited = visited | {feature.target}
            if isinstance(feature, Aggregate):
                continuations = feature.target_variation_ids
            else:
                continuations = [
                    v.variation_id
                    for v in model.entity_type(feature.target).variations
                ]
            for next_vid in continuations:
                walk(feature.target, next_vid, next_visited, trail + [hop])

    walk(source_type, source_vid, frozenset(), [])
    return paths


def _indirect_matches(
    model: USchemaModel,
    source_type: EntityType,
    variation: StructuralVariation,
    spec: TargetSpec,
    all_paths: bool,
) -> Optional[_Contribution]:
    completions: list[tuple[str, list[_Hop]]] = []
    for path in enumerate_paths(model, source_type.name, variation.variation_id):
        last = path[-1].resolve(model)
        if not match_name(spec.spec, last.target):
            continue
        if spec.feature_name is not None and last.name != spec.feature_name:
            continue
        if spec.kind is RelKind.REF and not isinstance(last, Reference):
            continue
        if spec.kind is RelKind.AGGR and not isinstance(last, Aggregate):
            continue
        if isinstance(last, Reference):
            if spec.ref_filter is not None and _featuring_pairs(model, last, spec.ref_filter) is None:
                continue
            if spec.target_filter is not None and not _passing_variations(
                spec.target_filter, model.entity_type(last.target)
            ):
                continue
        else:
            if spec.ref_filter is not None:
                continue
            if spec.target_filter is not None:
                passing = set(
                    _passing_variations(spec.target_filter, model.entity_type(last.target))
                )
                if not any(vid in passing for vid in last.target_variation_ids):
                    continue
        completions.append((last.target, path))
    if not completions:
        return None
    if not all_paths:
        shortest: dict[str, int] = {}
        for target, path in completions:
            length = len(path)
            if target not in shortest or length < shortest[target]:
                shortest[target] = length
        completions = [
            (target, path)
            for target, path in completions
            if len(path) == shortest[target]
        ]
    contribution = _Contribution()
    for target, path in completions:
        contribution.path_hops.append((path, target))
    return contribution


def _apply_contribution(
    builder: _Builder,
    model: USchemaModel,
    source_key: NodeKey,
    spec: TargetSpec,
    contribution: _Contribution,
):
    for feature, target_ids in contribution.aggregations:
        builder.add_aggregation(source_key, feature, target_ids)
    for feature, pairs in contribution.references:
        builder.add_reference(source_key, feature, pairs)
    for type_name, vid in contribution.extra_entity_variations:
        builder.entity_variation(type_name, vid)
    for path, _target in contribution.path_hops:
        for index, hop in enumerate(path):
            feature = hop.resolve(model)
            hop_source = builder.entity_variation(hop.source_type, hop.source_vid)
            final = index == len(path) - 1
            if isinstance(feature, Aggregate):
                target_ids = list(feature.target_variation_ids)
                if final and spec.target_filter is not None:
                    passing = set(
                        _passing_variations(
                            spec.target_filter, model.entity_type(feature.target)
                        )
                    )
                    target_ids = [vid for vid in target_ids if vid in passing]
                if not final:
                    # Only the variation the path actually continued through.
                    next_hop = path[index + 1]
                    target_ids = [next_hop.source_vid]
                builder.add_aggregation(hop_source, feature, target_ids)
            else:
                ref_filter = spec.ref_filter if final else None
                pairs = _featuring_pairs(model, feature, ref_filter)
                builder.add_reference(hop_source, feature, pairs or [])
                if final and spec.target_filter is not None:
                    for vid in _passing_variations(
                        spec.target_filter, model.entity_type(feature.target)
                    ):
                        builder.entity_variation(feature.target, vid)
                if not final:
                    next_hop = path[index + 1]
                    builder.entity_variation(feature.target, next_hop.source_vid)


def _execute_rel_query(
    model: USchemaModel, query: RelQuery, all_paths: bool
) -> ResultSubschema:
    if isinstance(query.source, NoSource):
        source_spec: Optional[NameSpec] = None
        source_filter = None
    else:
        source_spec = query.source.spec
        source_filter = query.source.filter

    specs = [_normalize_spec(s) for s in query.rel_specs]
    builder = _Builder(model)
    any_included = False

    for etype in model.entity_types:
        if source_spec is not None and not match_name(source_spec, etype.name):
            continue
        for variation in etype.variations:
            if not match_variation(source_filter, etype, variation):
                continue
            contributions = []
            for spec in specs:
                if spec.indirect:
                    contribution = _indirect_matches(
                        model, etype, variation, spec, all_paths
                    )
                else:
                    contribution = _direct_matches(model, etype, variation, spec)
                if contribution is None:
                    break
                contributions.append((spec, contribution))
            else:
                any_included = True
                source_key = builder.entity_variation(etype.name, variation.variation_id)
                for spec, contribution in contributions:
                    _apply_contribution(builder, model, source_key, spec, contribution)

    if not any_included:
        return _empty_result(model, _empty_rel_message(query))
    result = builder.build()
    if query.union:
        result = _fold_result(result)
    return result


def _empty_rel_message(query: RelQuery) -> str:
    if isinstance(query.source, NoSource):
        names = [
            s.spec.render() for s in query.rel_specs if isinstance(s, TargetSpec)
        ]
        if names:
            return f"{', '.join(names)} is not target type of any relationship"
        return "no relationships match the query"
    if any(isinstance(s, NoTarget) for s in query.rel_specs):
        return f"{query.source.spec.render()} is not source type of any relationship"
    return "no relationships match the query"


# -- union folding ------------------------------------------------------------


def _fold_result(result: ResultSubschema) -> ResultSubschema:
    model = result.model
    folded: dict[tuple[str, str], ResultNode] = {}
    included: dict[tuple[str, str], set] = {}
    types: dict[tuple[str, str], SchemaType] = {}
    for node in result.nodes:
        group = (node.key.kind, node.key.type_name)
        types[group] = node.schema_type
        ids = included.setdefault(group, set())
        if node.variation is None:
            ids.add(TYPE_LEVEL)
        else:
            ids.add(node.variation.variation_id)

    def union_key(key: NodeKey) -> NodeKey:
        return NodeKey(key.kind, key.type_name, UNION_ID)

    for group, ids in included.items():
        stype = types[group]
        if TYPE_LEVEL in ids:
            variations = list(stype.variations)
        else:
            variations = [stype.variation(vid) for vid in sorted(ids)]
        key = NodeKey(group[0], group[1], UNION_ID)
        folded[group] = ResultNode(key, stype, union_type(stype, variations))

    def folded_feature(key: NodeKey, name: str):
        node = folded[(key.kind, key.type_name)]
        for feature in node.variation.features:
            if feature.name == name and isinstance(feature, (Reference, Aggregate)):
                return feature
        raise KeyError(name)

    builder = _Builder(model)
    builder.nodes = {node.key: node for node in folded.values()}
    for edge in result.aggregation_edges:
        feature = folded_feature(edge.source, edge.feature_name)
        builder.agg_edges[
            AggregationEdge(
                union_key(edge.source),
                edge.feature_name,
                feature.cardinality,
                union_key(edge.target),
            )
        ] = None
    for edge in result.reference_edges:
        feature = folded_feature(edge.source, edge.feature_name)
        builder.ref_edges[
            ReferenceEdge(
                union_key(edge.source),
                edge.feature_name,
                feature.cardinality,
                union_key(edge.target),
            )
        ] = None
    for edge in result.featuring_edges:
        builder.feat_edges[
            FeaturingEdge(
                union_key(edge.source), edge.feature_name, union_key(edge.target)
            )
        ] = None
    return builder.build(chronological=result.chronological)


# -- entry points ---------------------------------------------------------------


def execute(model: USchemaModel, query: Query, all_paths: bool = False) -> ResultSubschema:
    """Evaluate one parsed query against a model."""
    if isinstance(query, TypeQuery):
        return _execute_type_query(model, query)
    assert isinstance(query, RelQuery)
    return _execute_rel_query(model, query, all_paths)


def complete_schema(model: USchemaModel, union: bool = False) -> ResultSubschema:
    """The whole model as a result: every variation, every relationship edge."""
    builder = _Builder(model)
    for etype in model.entity_types:
        for variation in etype.variations:
            source = builder.entity_variation(etype.name, variation.variation_id)
            for feature in variation.relationship_features():
                if isinstance(feature, Aggregate):
                    builder.add_aggregation(source, feature, feature.target_variation_ids)
                else:
                    builder.add_reference(source, feature, feature.featured_by)
    for rtype in model.relationship_types:
        for variation in rtype.variations:
            builder.relationship_variation(rtype.name, variation.variation_id)
    if not builder.nodes:
        return _empty_result(model, "the model has no types")
    result = builder.build()
    if union:
        result = _fold_result(result)
    return result
