"""Rendering of query results: render graph, DOT, plain-text tables, graph JSON.

The render graph is the single source for both DOT and the versioned JSON
wire format the web console consumes. Node kinds carry fixed colors: light
yellow for root entity types, light gray for aggregate entity types, light
blue for relationship types, white for variations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from skiql.model import (
    Aggregate,
    Attribute,
    Key,
    Reference,
    StructuralVariation,
    classify_feature,
)
from skiql.engine import NodeKey, ResultNode, ResultSubschema, UNION_ID

GRAPH_JSON_FORMAT_VERSION = 1

# kind -> (DOT color name, hex for the wire format)
KIND_COLORS = {
    "entityTypeRoot": ("lightyellow", "#FFFFE0"),
    "entityTypeAggregate": ("lightgray", "#D3D3D3"),
    "relationshipType": ("lightblue", "#ADD8E6"),
    "variation": ("white", "#FFFFFF"),
    "junction": ("black", "#000000"),
    "message": ("white", "#FFFFFF"),
}

ENTITY_STEREOTYPE = "«entity type»"
RELATIONSHIP_STEREOTYPE = "«relationship type»"


@dataclass
class RenderNode:
    id: str
    kind: str
    title: str
    lines: tuple[str, ...] = ()
    stereotype: str = ""


@dataclass
class RenderEdge:
    source: str
    target: str
    style: str  # typeToVariation | aggregation | reference | featuring
    label: str = ""


@dataclass
class RenderGraph:
    nodes: list[RenderNode] = field(default_factory=list)
    edges: list[RenderEdge] = field(default_factory=list)


# -- feature lines -----------------------------------------------------------


def _class_prefix(schema_type, name: str) -> str:
    return classify_feature(schema_type, name).prefix


def _key_type(variation: StructuralVariation, key: Key) -> str:
    parts = []
    for attr_name in key.attribute_names:
        attr = variation.attribute(attr_name)
        parts.append(attr.data_type.render() if attr else "?")
    return ", ".join(parts)


def feature_line(schema_type, variation: StructuralVariation, feature) -> str:
    prefix = _class_prefix(schema_type, feature.name)
    if isinstance(feature, Attribute):
        return f"{prefix}{feature.name}: {feature.data_type.render()}"
    if isinstance(feature, Key):
        return f"{prefix}Key {feature.name}: {_key_type(variation, feature)}"
    marker = "--" if isinstance(feature, Reference) else "<>-"
    return f"{prefix} {marker} [{feature.cardinality.render()}] {feature.name}"


def edge_label(schema_type, feature) -> str:
    prefix = _class_prefix(schema_type, feature.name)
    return f"{prefix} [{feature.cardinality.render()}] {feature.name}"


# -- render graph ---------------------------------------------------------------


def _type_node_id(key: NodeKey) -> str:
    return f"type:{key.kind}:{key.type_name}"


def _variation_node_id(key: NodeKey) -> str:
    vid = "union" if key.variation_id == UNION_ID else str(key.variation_id)
    return f"var:{key.kind}:{key.type_name}:{vid}"


def _type_kind(node: ResultNode) -> str:
    if node.key.kind == "relationship":
        return "relationshipType"
    return "entityTypeRoot" if node.schema_type.root else "entityTypeAggregate"


def _variation_title(node: ResultNode) -> str:
    if node.is_union:
        return f"{node.key.type_name}[union]"
    return f"{node.key.type_name}[{node.key.variation_id}]"


def to_render_graph(result: ResultSubschema) -> RenderGraph:
    graph = RenderGraph()
    if result.message is not None:
        graph.nodes.append(
            RenderNode(id="message", kind="message", title=result.message)
        )
        return graph

    seen_types: set[str] = set()
    node_ids: dict[NodeKey, str] = {}

    def ensure_type_node(node: ResultNode) -> str:
        type_id = _type_node_id(node.key)
        if type_id not in seen_types:
            seen_types.add(type_id)
            stereotype = (
                RELATIONSHIP_STEREOTYPE
                if node.key.kind == "relationship"
                else ENTITY_STEREOTYPE
            )
            graph.nodes.append(
                RenderNode(
                    id=type_id,
                    kind=_type_kind(node),
                    title=node.key.type_name,
                    stereotype=stereotype,
                )
            )
        return type_id

    for node in result.nodes:
        type_id = ensure_type_node(node)
        if node.variation is None:
            node_ids[node.key] = type_id
            continue
        var_id = _variation_node_id(node.key)
        node_ids[node.key] = var_id
        lines = [
            feature_line(node.schema_type, node.variation, feature)
            for feature in node.variation.features
            if isinstance(feature, (Attribute, Key))
        ]
        for entry in result.inline.get(node.key, ()):
            prefix = _class_prefix(node.schema_type, entry.name)
            marker = "--" if entry.kind == "reference" else "<>-"
            lines.append(f"{prefix} {marker} [{entry.cardinality.render()}] {entry.name}")
        if node.variation.first_seen is not None:
            lines.append(f"first seen: {node.variation.first_seen.isoformat()}")
        graph.nodes.append(
            RenderNode(id=var_id, kind="variation", title=_variation_title(node), lines=tuple(lines))
        )
        graph.edges.append(RenderEdge(type_id, var_id, "typeToVariation"))

    def original_feature(key: NodeKey, name: str):
        node = result.node(key)
        for feature in node.variation.features:
            if feature.name == name and isinstance(feature, (Reference, Aggregate)):
                return node.schema_type, feature
        raise KeyError(name)

    for agg_edge in result.aggregation_edges:
        schema_type, feature = original_feature(agg_edge.source, agg_edge.feature_name)
        graph.edges.append(
            RenderEdge(
                node_ids[agg_edge.source],
                node_ids[agg_edge.target],
                "aggregation",
                edge_label(schema_type, feature),
            )
        )

    featuring_by_ref: dict[tuple[NodeKey, str], list[NodeKey]] = {}
    for feat_edge in result.featuring_edges:
        featuring_by_ref.setdefault(
            (feat_edge.source, feat_edge.feature_name), []
        ).append(feat_edge.target)

    for ref_edge in result.reference_edges:
        schema_type, feature = original_feature(ref_edge.source, ref_edge.feature_name)
        label = edge_label(schema_type, feature)
        source_id = node_ids[ref_edge.source]
        target_id = node_ids[ref_edge.target]
        rel_targets = featuring_by_ref.get((ref_edge.source, ref_edge.feature_name), [])
        if not rel_targets:
            graph.edges.append(RenderEdge(source_id, target_id, "reference", label))
            continue
        # A dashed featuring arc leaves the middle of the reference arrow;
        # DOT has no edge-to-edge arcs, so split the reference at a junction.
        junction_id = f"junction:{source_id}:{ref_edge.feature_name}"
        graph.nodes.append(RenderNode(id=junction_id, kind="junction", title=""))
        graph.edges.append(RenderEdge(source_id, junction_id, "reference", label))
        graph.edges.append(RenderEdge(junction_id, target_id, "reference"))
        for rel_key in rel_targets:
            graph.edges.append(
                RenderEdge(junction_id, node_ids[rel_key], "featuring")
            )
    return graph


# -- DOT -----------------------------------------------------------------------


def _dot_escape(text: str) -> str:
    out = []
    for ch in text:
        if ch in '\\"{}|<>':
            out.append("\\" + ch)
        else:
            out.append(ch)
    return "".join(out)


def _dot_node(node: RenderNode) -> str:
    color = KIND_COLORS[node.kind][0]
    if node.kind == "junction":
        return f'  "{node.id}" [shape=point, width=0.02, label=""];'
    if node.kind == "message":
        return (
            f'  "{node.id}" [shape=plaintext, label="{_dot_escape(node.title)}"];'
        )
    if node.kind == "variation":
        body = "\\l".join(_dot_escape(line) for line in node.lines)
        if body:
            body += "\\l"
        label = f"{{{_dot_escape(node.title)}|{body}}}"
        return (
            f'  "{node.id}" [shape=record, style=filled, fillcolor={color}, '
            f'label="{label}"];'
        )
    label = f"{{{_dot_escape(node.stereotype)}\\n{_dot_escape(node.title)}}}"
    return (
        f'  "{node.id}" [shape=record, style=filled, fillcolor={color}, '
        f'label="{label}"];'
    )


_EDGE_ATTRS = {
    "typeToVariation": "style=dashed, arrowhead=vee",
    "aggregation": "color=red, dir=both, arrowtail=diamond, arrowhead=vee",
    "reference": "color=blue, arrowhead=vee",
    "featuring": "style=dashed, arrowhead=vee",
}


def _dot_edge(edge: RenderEdge, into_junction: set[str]) -> str:
    attrs = _EDGE_ATTRS[edge.style]
    if edge.style == "reference" and edge.target in into_junction:
        attrs = "color=blue, arrowhead=none"
    parts = [attrs]
    if edge.label:
        parts.append(f'label="{_dot_escape(edge.label)}"')
    return f'  "{edge.source}" -> "{edge.target}" [{", ".join(parts)}];'


def to_dot(graph: RenderGraph) -> str:
    junctions = {node.id for node in graph.nodes if node.kind == "junction"}
    out = ["digraph skiql {", "  rankdir=TB;", '  node [fontname="Helvetica"];']
    for node in graph.nodes:
        out.append(_dot_node(node))
    for edge in graph.edges:
        out.append(_dot_edge(edge, junctions))
    out.append("}")
    return "\n".join(out) + "\n"


# -- tables -------------------------------------------------------------------


@dataclass
class TableRow:
    type_name: str
    variation_id: str  # numeric text or "union"
    instance_count: int
    features: str


def to_table_rows(result: ResultSubschema) -> list[TableRow]:
    rows = []
    for node in result.nodes:
        if node.variation is None:
            continue
        listing = ", ".join(
            feature_line(node.schema_type, node.variation, feature)
            for feature in node.variation.features
        )
        vid = "union" if node.is_union else str(node.key.variation_id)
        rows.append(TableRow(node.key.type_name, vid, node.variation.instance_count, listing))
    return rows


def to_table(result: ResultSubschema) -> str:
    if result.message is not None:
        return result.message + "\n"
    rows = to_table_rows(result)
    blocks = []
    by_type: dict[str, list[TableRow]] = {}
    order: list[str] = []
    for row in rows:
        if row.type_name not in by_type:
            by_type[row.type_name] = []
            order.append(row.type_name)
        by_type[row.type_name].append(row)
    for type_name in order:
        group = by_type[type_name]
        header = ("variation", "instances", "features")
        body = [(r.variation_id, str(r.instance_count), r.features) for r in group]
        widths = [
            max(len(header[i]), *(len(line[i]) for line in body)) for i in range(2)
        ]
        lines = [type_name]
        lines.append(
            "  " + header[0].ljust(widths[0]) + "  " + header[1].ljust(widths[1]) + "  " + header[2]
        )
        for entry in body:
            lines.append(
                "  " + entry[0].ljust(widths[0]) + "  " + entry[1].ljust(widths[1]) + "  " + entry[2]
            )
        blocks.append("\n".join(lines))
    types_without_variations = [
        node.key.type_name
        for node in result.nodes
        if node.variation is None
        and not any(r.type_name == node.key.type_name for r in rows)
    ]
    for name in types_without_variations:
        blocks.append(f"{name}\n  (type only)")
    return "\n\n".join(blocks) + "\n"


# -- graph JSON ------------------------------------------------------------------


def to_graph_dict(graph: RenderGraph) -> dict:
    return {
        "formatVersion": GRAPH_JSON_FORMAT_VERSION,
        "nodes": [
            {
                "id": node.id,
                "kind": node.kind,
                "title": node.title,
                "lines": list(node.lines),
                "color": KIND_COLORS[node.kind][1],
            }
            for node in graph.nodes
        ],
        "edges": [
            {
                "from": edge.source,
                "to": edge.target,
                "style": edge.style,
                "label": edge.label,
            }
            for edge in graph.edges
        ],
    }


def to_graph_json(graph: RenderGraph) -> str:
    return json.dumps(to_graph_dict(graph), indent=2, ensure_ascii=False) + "\n"


OUTPUT_FORMATS = ("table", "dot", "graphjson")


def render_result(result: ResultSubschema, fmt: str) -> str:
    """One result in one of the three textual output formats."""
    if fmt == "table":
        return to_table(result)
    graph = to_render_graph(result)
    if fmt == "dot":
        return to_dot(graph)
    if fmt == "graphjson":
        return to_graph_json(graph)
    raise ValueError(f"unknown format {fmt!r}")
