"""Diagram, table, and wire-format rendering."""

import json

import pytest

from skiql.engine import execute
from skiql.model import (
    Attribute,
    EntityType,
    NUMBER,
    StructuralVariation,
    USchemaModel,
)
from skiql.parser import parse
from skiql.render import (
    GRAPH_JSON_FORMAT_VERSION,
    KIND_COLORS,
    OUTPUT_FORMATS,
    feature_line,
    render_result,
    to_dot,
    to_graph_dict,
    to_render_graph,
    to_table,
)


def run(model, text):
    return execute(model, parse(text))


class TestFeatureLines:
    def test_attribute_and_key(self, aggregate_model):
        movie = aggregate_model.entity_type("Movie")
        variation = movie.variation(1)
        lines = [feature_line(movie, variation, f) for f in variation.features]
        assert lines == [
            "+_id: Number",
            "+Key _id: Number",
            "+genre: String",
            "+name: String",
            "+year: Number",
        ]

    def test_relationship_markers_and_class_prefixes(self, aggregate_model):
        user = aggregate_model.entity_type("User")
        variation = user.variation(2)
        by_name = {f.name: f for f in variation.features}
        assert feature_line(user, variation, by_name["address"]) == "+ <>- [1..1] address"
        assert (
            feature_line(user, variation, by_name["favoriteMovies"])
            == "- -- [0..*] favoriteMovies"
        )
        assert feature_line(user, variation, by_name["surname"]) == "-surname: String"

    def test_non_shared_prefix(self):
        def variation(vid, names):
            return StructuralVariation(
                variation_id=vid,
                features=tuple(Attribute(n, NUMBER) for n in names),
            )

        etype = EntityType(
            "T",
            True,
            (variation(1, ["a", "b"]), variation(2, ["a", "b"]), variation(3, ["a"])),
        )
        USchemaModel("m", "aggregate", (etype,))
        line = feature_line(etype, etype.variation(1), etype.variation(1).features[1])
        assert line == "?b: Number"


class TestRenderGraph:
    def test_type_and_variation_nodes(self, aggregate_model):
        graph = to_render_graph(run(aggregate_model, "ENTITY User [name: string, favoriteMovies]"))
        assert [n.id for n in graph.nodes] == ["type:entity:User", "var:entity:User:2"]
        type_node, var_node = graph.nodes
        assert type_node.kind == "entityTypeRoot"
        assert type_node.stereotype == "«entity type»"
        assert var_node.title == "User[2]"
        assert var_node.lines == (
            "+_id: Number",
            "+Key _id: Number",
            "+email: String",
            "+name: String",
            "-surname: String",
            "+ <>- [1..1] address",
            "- -- [0..*] favoriteMovies",
            "+ <>- [0..*] watchedMovies",
        )
        assert [(e.source, e.target, e.style) for e in graph.edges] == [
            ("type:entity:User", "var:entity:User:2", "typeToVariation")
        ]

    def test_non_root_type_color_kind(self, aggregate_model):
        graph = to_render_graph(run(aggregate_model, "ENTITY Address"))
        type_node = graph.nodes[0]
        assert type_node.kind == "entityTypeAggregate"

    def test_message_graph(self, aggregate_model):
        graph = to_render_graph(run(aggregate_model, "FROM _ TO User"))
        assert len(graph.nodes) == 1
        assert graph.nodes[0].kind == "message"
        assert graph.nodes[0].title == "User is not target type of any relationship"
        assert graph.edges == []

    def test_aggregation_edge_with_label(self, aggregate_model):
        graph = to_render_graph(run(aggregate_model, "FROM User [surname: string] TO Address AGGR"))
        agg = next(e for e in graph.edges if e.style == "aggregation")
        assert agg.source == "var:entity:User:2"
        assert agg.target == "var:entity:Address:2"
        assert agg.label == "+ [1..1] address"

    def test_type_level_reference_target_collapses_to_type_node(self, aggregate_model):
        graph = to_render_graph(run(aggregate_model, "FROM User TO Movie REF, Address AGGR"))
        assert len(graph.nodes) == 5
        ref = next(e for e in graph.edges if e.style == "reference")
        assert ref.target == "type:entity:Movie"
        assert len(graph.edges) == 4

    def test_junctions_split_featured_references(self, graph_model):
        graph = to_render_graph(run(graph_model, "FROM User TO Movie REF [stars: number]"))
        junctions = [n for n in graph.nodes if n.kind == "junction"]
        assert len(junctions) == 2
        assert len(graph.nodes) == 8
        assert len(graph.edges) == 9
        junction_id = "junction:var:entity:User:1:watchedMovies"
        assert any(n.id == junction_id for n in junctions)
        segments = [(e.source, e.target, e.style, e.label) for e in graph.edges]
        assert ("var:entity:User:1", junction_id, "reference", "+ [0..*] watchedMovies") in segments
        assert (junction_id, "type:entity:Movie", "reference", "") in segments
        assert (junction_id, "var:relationship:watchedMovies:1", "featuring", "") in segments

    def test_union_node_identity(self, aggregate_model):
        graph = to_render_graph(run(aggregate_model, "UNION ENTITY Address"))
        assert [n.id for n in graph.nodes] == [
            "type:entity:Address",
            "var:entity:Address:union",
        ]
        assert graph.nodes[1].title == "Address[union]"

    def test_relationship_type_stereotype(self, graph_model):
        graph = to_render_graph(run(graph_model, "REL watchedMovies"))
        type_node = graph.nodes[0]
        assert type_node.kind == "relationshipType"
        assert type_node.stereotype == "«relationship type»"


class TestDot:
    def test_document_shape(self, aggregate_model):
        dot = to_dot(to_render_graph(run(aggregate_model, "ENTITY Movie")))
        assert dot.startswith("digraph skiql {\n")
        assert dot.endswith("}\n")
        assert "rankdir=TB;" in dot
        assert "fillcolor=lightyellow" in dot
        assert "shape=record" in dot

    def test_markers_are_escaped(self, aggregate_model):
        dot = to_dot(to_render_graph(run(aggregate_model, "ENTITY User")))
        assert r"+ \<\>- [1..1] address" in dot

    def test_junction_point_and_unheaded_segment(self, graph_model):
        dot = to_dot(to_render_graph(run(graph_model, "FROM User TO Address")))
        assert "shape=point" in dot
        assert "arrowhead=none" in dot
        assert "style=dashed, arrowhead=vee" in dot

    def test_aggregation_arrow_texture(self, aggregate_model):
        dot = to_dot(to_render_graph(run(aggregate_model, "FROM User TO Address AGGR")))
        assert "color=red, dir=both, arrowtail=diamond, arrowhead=vee" in dot

    def test_rendering_is_deterministic(self, aggregate_model):
        first = render_result(run(aggregate_model, "FROM User TO >> *"), "dot")
        second = render_result(run(aggregate_model, "FROM User TO >> *"), "dot")
        assert first == second


class TestTable:
    def test_blocks_and_alignment(self, aggregate_model):
        table = to_table(run(aggregate_model, "FROM User TO Movie REF, Address AGGR"))
        blocks = table.split("\n\n")
        assert blocks[0].startswith("Address\n  variation  instances  features\n")
        assert "  2          1          +city: String" in blocks[0]
        assert blocks[1].startswith("User\n")
        assert "- -- [0..*] favoriteMovies" in blocks[1]
        assert blocks[2] == "Movie\n  (type only)\n"

    def test_message_table(self, aggregate_model):
        assert to_table(run(aggregate_model, "FROM _ TO User")) == (
            "User is not target type of any relationship\n"
        )

    def test_union_row_label(self, aggregate_model):
        table = to_table(run(aggregate_model, "UNION ENTITY Address"))
        assert "\n  union" in table


class TestGraphJson:
    def test_wire_shape(self, aggregate_model):
        payload = to_graph_dict(to_render_graph(run(aggregate_model, "ENTITY Movie")))
        assert payload["formatVersion"] == GRAPH_JSON_FORMAT_VERSION == 1
        type_node, var_node = payload["nodes"]
        assert type_node == {
            "id": "type:entity:Movie",
            "kind": "entityTypeRoot",
            "title": "Movie",
            "lines": [],
            "color": "#FFFFE0",
        }
        assert var_node["color"] == "#FFFFFF"
        assert payload["edges"] == [
            {
                "from": "type:entity:Movie",
                "to": "var:entity:Movie:1",
                "style": "typeToVariation",
                "label": "",
            }
        ]

    def test_string_form_is_json_with_trailing_newline(self, aggregate_model):
        text = render_result(run(aggregate_model, "ENTITY Movie"), "graphjson")
        assert text.endswith("\n")
        assert json.loads(text)["formatVersion"] == 1

    def test_colors_cover_every_kind(self):
        assert set(KIND_COLORS) == {
            "entityTypeRoot",
            "entityTypeAggregate",
            "relationshipType",
            "variation",
            "junction",
            "message",
        }
        for dot_color, hex_color in KIND_COLORS.values():
            assert hex_color.startswith("#") and len(hex_color) == 7


def test_output_format_registry(aggregate_model):
    assert OUTPUT_FORMATS == ("table", "dot", "graphjson")
    result = run(aggregate_model, "ENTITY Movie")
    for fmt in OUTPUT_FORMATS:
        assert render_result(result, fmt)
    with pytest.raises(ValueError, match="unknown format"):
        render_result(result, "svg")
