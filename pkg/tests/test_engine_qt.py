"""Type-query evaluation against the two workbench fixtures."""

from datetime import date

import pytest

from skiql.engine import HistoryUnavailable, execute
from skiql.model import (
    Attribute,
    EntityType,
    Key,
    NUMBER,
    STRING,
    StructuralVariation,
    USchemaModel,
    make_union,
)
from skiql.parser import parse


def run(model, text):
    return execute(model, parse(text))


def node_set(result):
    return {(n.key.kind, n.key.type_name, n.key.variation_id) for n in result.nodes}


def inline_map(result):
    return {
        (key.type_name, key.variation_id): {
            (i.kind, i.name, i.cardinality.render(), i.target_name) for i in entries
        }
        for key, entries in result.inline.items()
    }


def test_filter_selects_the_one_variation_carrying_both_features(aggregate_model):
    result = run(aggregate_model, "ENTITY User [name: string, favoriteMovies]")
    assert node_set(result) == {("entity", "User", 2)}
    assert result.message is None
    assert not result.aggregation_edges and not result.reference_edges
    assert inline_map(result) == {
        ("User", 2): {
            ("aggregate", "address", "1..1", "Address"),
            ("reference", "favoriteMovies", "0..*", "Movie"),
            ("aggregate", "watchedMovies", "0..*", "WatchedMovies"),
        }
    }


def test_bare_entity_query_returns_every_variation(aggregate_model):
    result = run(aggregate_model, "ENTITY User")
    assert node_set(result) == {("entity", "User", 1), ("entity", "User", 2)}
    assert inline_map(result)[("User", 1)] == {
        ("aggregate", "address", "1..1", "Address"),
        ("aggregate", "watchedMovies", "0..*", "WatchedMovies"),
    }


def test_star_covers_the_whole_schema(aggregate_model):
    result = run(aggregate_model, "ENTITY *")
    assert len(result.nodes) == 6
    assert node_set(result) >= {("entity", "Address", 1), ("entity", "WatchedMovies", 1)}


def test_unmatched_name_and_failed_filter_give_different_messages(aggregate_model):
    assert run(aggregate_model, "ENTITY Banana").message == "no schema type matches Banana"
    assert (
        run(aggregate_model, "ENTITY User [banana]").message
        == "no variations pass the filter"
    )


def test_name_pattern_forms(aggregate_model):
    assert node_set(run(aggregate_model, "ENTITY Use*")) == {
        ("entity", "User", 1),
        ("entity", "User", 2),
    }
    assert node_set(run(aggregate_model, "ENTITY *ovie")) == {("entity", "Movie", 1)}
    assert node_set(run(aggregate_model, "ENTITY *ovie*")) == {
        ("entity", "Movie", 1),
        ("entity", "WatchedMovies", 1),
    }
    assert node_set(run(aggregate_model, 'ENTITY r"Address|Movie"')) == {
        ("entity", "Address", 1),
        ("entity", "Address", 2),
        ("entity", "Movie", 1),
    }


class TestClassModifiers:
    def test_shared_feature_passes_everywhere(self, aggregate_model):
        result = run(aggregate_model, "ENTITY User [shared name]")
        assert node_set(result) == {("entity", "User", 1), ("entity", "User", 2)}

    def test_specific_feature_selects_its_carrier(self, aggregate_model):
        result = run(aggregate_model, "ENTITY User [specific surname]")
        assert node_set(result) == {("entity", "User", 2)}

    def test_wrong_class_fails_the_filter(self, aggregate_model):
        result = run(aggregate_model, "ENTITY Address [shared postCode]")
        assert result.message == "no variations pass the filter"


class TestTypeSpecs:
    def test_aggregate_spec_with_target(self, aggregate_model):
        result = run(aggregate_model, "ENTITY User [address: AGGR<Address>]")
        assert node_set(result) == {("entity", "User", 1), ("entity", "User", 2)}

    def test_kind_mismatch(self, aggregate_model, graph_model):
        assert (
            run(aggregate_model, "ENTITY User [address: REF]").message
            == "no variations pass the filter"
        )
        assert node_set(run(graph_model, "ENTITY User [address: REF<Address>]")) == {
            ("entity", "User", 1),
            ("entity", "User", 2),
        }

    def test_unknown_matches_any_typed_feature(self, aggregate_model):
        result = run(aggregate_model, "ENTITY User [watchedMovies: ?]")
        assert node_set(result) == {("entity", "User", 1), ("entity", "User", 2)}

    def test_union_members_satisfy_an_exact_type(self):
        model = USchemaModel(
            "m",
            "aggregate",
            (
                EntityType(
                    "T",
                    True,
                    (
                        StructuralVariation(
                            variation_id=1,
                            features=(
                                Attribute("a", make_union([NUMBER, STRING])),
                            ),
                        ),
                    ),
                ),
            ),
        )
        assert node_set(run(model, "ENTITY T [a: number]")) == {("entity", "T", 1)}
        assert run(model, "ENTITY T [a: boolean]").message == "no variations pass the filter"


class TestRelTarget:
    def test_rel_star_on_aggregate_finds_nothing(self, aggregate_model):
        assert run(aggregate_model, "REL *").message == "no schema type matches *"

    def test_rel_by_name(self, graph_model):
        result = run(graph_model, "REL watchedMovies")
        assert node_set(result) == {("relationship", "watchedMovies", 1)}

    def test_rel_by_reference_target(self, graph_model):
        # references out of User feature these two relationship types
        result = run(graph_model, "REL Movie")
        assert node_set(result) == {
            ("relationship", "favoriteMovies", 1),
            ("relationship", "watchedMovies", 1),
        }

    def test_rel_filter_applies_to_relationship_variations(self, graph_model):
        result = run(graph_model, "REL * [stars: number]")
        assert node_set(result) == {("relationship", "watchedMovies", 1)}

    def test_any_spans_both_namespaces(self, graph_model):
        result = run(graph_model, "ANY *")
        kinds = {k for k, _, _ in node_set(result)}
        assert kinds == {"entity", "relationship"}
        assert len(result.nodes) == 8


class TestKeys:
    def test_keys_strips_everything_but_key_attributes(self, aggregate_model):
        result = run(aggregate_model, "ENTITY User keys")
        assert node_set(result) == {("entity", "User", 1), ("entity", "User", 2)}
        for node in result.nodes:
            assert [type(f) for f in node.variation.features] == [Attribute, Key]
            assert all(f.name == "_id" for f in node.variation.features)
        assert result.inline == {}

    def test_keyless_type_reports(self, aggregate_model):
        assert run(aggregate_model, "ENTITY Address keys").message == "Address has no keys"

    def test_keyless_types_drop_out_of_a_wider_selection(self, aggregate_model):
        result = run(aggregate_model, "ENTITY * keys")
        assert node_set(result) == {
            ("entity", "Movie", 1),
            ("entity", "User", 1),
            ("entity", "User", 2),
        }


class TestHistory:
    @pytest.fixture()
    def dated(self):
        def variation(vid, first):
            return StructuralVariation(
                variation_id=vid,
                features=(Attribute("a", NUMBER),),
                first_seen=first,
                last_seen=first,
            )

        return USchemaModel(
            "dated",
            "aggregate",
            (
                EntityType(
                    "T",
                    True,
                    (
                        variation(1, date(2020, 1, 10)),
                        variation(2, date(2020, 6, 1)),
                        variation(3, None),
                    ),
                ),
            ),
        )

    def test_before_is_strict(self, dated):
        result = run(dated, "ENTITY T history before 2020-06-01")
        assert node_set(result) == {("entity", "T", 1)}
        assert result.chronological is True

    def test_after_is_strict(self, dated):
        result = run(dated, "ENTITY T history after 2020-01-10")
        assert node_set(result) == {("entity", "T", 2)}

    def test_between_includes_both_endpoints(self, dated):
        result = run(dated, "ENTITY T history between (2020-01-10, 2020-06-01)")
        assert node_set(result) == {("entity", "T", 1), ("entity", "T", 2)}

    def test_empty_interval_reports(self, dated):
        result = run(dated, "ENTITY T history before 2019-01-01")
        assert result.message == "no variations first seen in the interval"

    def test_undated_selection_raises(self, aggregate_model):
        with pytest.raises(HistoryUnavailable, match="carries timestamps"):
            run(aggregate_model, "ENTITY User history before 2020-01-01")


class TestUnionPrefix:
    def test_union_folds_to_one_node_per_type(self, aggregate_model):
        result = run(aggregate_model, "UNION ENTITY Address")
        assert node_set(result) == {("entity", "Address", 0)}
        (node,) = result.nodes
        attrs = [f.name for f in node.variation.features if isinstance(f, Attribute)]
        assert attrs == ["city", "number", "postCode", "street"]
        assert node.variation.instance_count == 2

    def test_union_happens_before_operations(self, aggregate_model):
        result = run(aggregate_model, "UNION ENTITY User keys")
        assert node_set(result) == {("entity", "User", 0)}

    def test_union_respects_the_filter(self, aggregate_model):
        # only the surname variation is folded, so the union equals it
        result = run(aggregate_model, "UNION ENTITY User [surname: string]")
        (node,) = result.nodes
        assert node.variation.instance_count == 1
