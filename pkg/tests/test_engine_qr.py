"""Relationship-query evaluation: direct, indirect, filters, folding."""

from skiql.engine import execute
from skiql.model import Aggregate, Attribute, Reference
from skiql.parser import parse


def run(model, text, all_paths=False):
    return execute(model, parse(text), all_paths=all_paths)


def node_set(result):
    return {(n.key.kind, n.key.type_name, n.key.variation_id) for n in result.nodes}


def agg_set(result):
    return {
        (e.source.type_name, e.source.variation_id, e.feature_name,
         e.cardinality.render(), e.target.type_name, e.target.variation_id)
        for e in result.aggregation_edges
    }


def ref_set(result):
    return {
        (e.source.type_name, e.source.variation_id, e.feature_name,
         e.cardinality.render(), e.target.type_name, e.target.variation_id)
        for e in result.reference_edges
    }


def feat_set(result):
    return {
        (e.source.type_name, e.source.variation_id, e.feature_name,
         e.target.type_name, e.target.variation_id)
        for e in result.featuring_edges
    }


def inline_map(result):
    return {
        (key.type_name, key.variation_id): {
            (i.kind, i.name, i.cardinality.render(), i.target_name) for i in entries
        }
        for key, entries in result.inline.items()
    }


class TestDirect:
    def test_aggregation_with_source_filter(self, aggregate_model):
        result = run(aggregate_model, "FROM User [surname: string] TO Address AGGR")
        assert node_set(result) == {("entity", "User", 2), ("entity", "Address", 2)}
        assert agg_set(result) == {("User", 2, "address", "1..1", "Address", 2)}
        assert ref_set(result) == set()
        assert inline_map(result) == {
            ("User", 2): {
                ("reference", "favoriteMovies", "0..*", "Movie"),
                ("aggregate", "watchedMovies", "0..*", "WatchedMovies"),
            }
        }

    def test_conjunction_of_two_specs(self, aggregate_model):
        result = run(aggregate_model, "FROM User TO Movie REF, Address AGGR")
        # only the variation satisfying BOTH specs is included
        assert node_set(result) == {
            ("entity", "User", 2),
            ("entity", "Address", 2),
            ("entity", "Movie", None),
        }
        assert agg_set(result) == {("User", 2, "address", "1..1", "Address", 2)}
        assert ref_set(result) == {("User", 2, "favoriteMovies", "0..*", "Movie", None)}
        assert inline_map(result) == {
            ("User", 2): {("aggregate", "watchedMovies", "0..*", "WatchedMovies")}
        }

    def test_target_filter_narrows_aggregation_targets(self, aggregate_model):
        result = run(
            aggregate_model, "FROM User [favoriteMovies] TO Address [postCode] AGGR"
        )
        # same subschema as the surname query: one variation, one aggregation
        twin = run(aggregate_model, "FROM User [surname: string] TO Address AGGR")
        assert node_set(result) == node_set(twin)
        assert agg_set(result) == agg_set(twin)
        assert inline_map(result) == inline_map(twin)

    def test_star_target_takes_every_outgoing_relationship(self, aggregate_model):
        result = run(aggregate_model, "FROM User TO *")
        assert node_set(result) == {
            ("entity", "User", 1),
            ("entity", "User", 2),
            ("entity", "Address", 1),
            ("entity", "Address", 2),
            ("entity", "WatchedMovies", 1),
            ("entity", "Movie", None),
        }
        assert agg_set(result) == {
            ("User", 1, "address", "1..1", "Address", 1),
            ("User", 1, "watchedMovies", "0..*", "WatchedMovies", 1),
            ("User", 2, "address", "1..1", "Address", 2),
            ("User", 2, "watchedMovies", "0..*", "WatchedMovies", 1),
        }
        assert ref_set(result) == {("User", 2, "favoriteMovies", "0..*", "Movie", None)}
        # the only untraversed relationship feature left in the picture
        assert inline_map(result) == {
            ("WatchedMovies", 1): {("reference", "movie_id", "1..1", "Movie")}
        }

    def test_underscore_target_means_any(self, aggregate_model):
        star = run(aggregate_model, "FROM User TO *")
        underscore = run(aggregate_model, "FROM User TO _")
        assert node_set(star) == node_set(underscore)
        assert agg_set(star) == agg_set(underscore)
        assert ref_set(star) == ref_set(underscore)

    def test_empty_source_collects_incoming(self, aggregate_model):
        result = run(aggregate_model, "FROM _ TO Movie")
        assert node_set(result) == {
            ("entity", "User", 2),
            ("entity", "WatchedMovies", 1),
            ("entity", "Movie", None),
        }
        assert ref_set(result) == {
            ("User", 2, "favoriteMovies", "0..*", "Movie", None),
            ("WatchedMovies", 1, "movie_id", "1..1", "Movie", None),
        }

    def test_feature_name_restricts_the_edge(self, graph_model):
        result = run(graph_model, "FROM User TO Movie ANY watchedMovies")
        assert ref_set(result) == {
            ("User", 1, "watchedMovies", "0..*", "Movie", None),
            ("User", 2, "watchedMovies", "0..*", "Movie", None),
        }
        # favoriteMovies stays inline on the second variation
        assert ("reference", "favoriteMovies", "0..*", "Movie") in inline_map(result)[
            ("User", 2)
        ]


class TestMessages:
    def test_no_incoming_relationships(self, aggregate_model):
        result = run(aggregate_model, "FROM _ TO User")
        assert result.message == "User is not target type of any relationship"
        assert result.nodes == ()

    def test_star_source_without_matches_is_generic(self, aggregate_model):
        assert run(aggregate_model, "FROM * TO User").message == (
            "no relationships match the query"
        )
        assert run(aggregate_model, "FROM * TO >> User").message == (
            "no relationships match the query"
        )

    def test_source_without_outgoing_relationships(self, aggregate_model):
        result = run(aggregate_model, "FROM Address TO _")
        assert result.message == "Address is not source type of any relationship"

    def test_filtered_out_source(self, aggregate_model):
        assert run(aggregate_model, "FROM User [banana] TO *").message == (
            "no relationships match the query"
        )

    def test_empty_source_and_only_underscores(self, aggregate_model):
        result = run(aggregate_model, "FROM Banana TO _")
        assert result.message == "Banana is not source type of any relationship"


class TestIndirect:
    def test_shortest_route_per_target_type(self, aggregate_model):
        result = run(aggregate_model, "FROM User TO >> Movie")
        assert node_set(result) == {
            ("entity", "User", 1),
            ("entity", "User", 2),
            ("entity", "WatchedMovies", 1),
            ("entity", "Movie", None),
        }
        # first variation goes through the aggregate, second has a direct
        # reference, and its two-hop route is pruned as longer
        assert agg_set(result) == {
            ("User", 1, "watchedMovies", "0..*", "WatchedMovies", 1)
        }
        assert ref_set(result) == {
            ("WatchedMovies", 1, "movie_id", "1..1", "Movie", None),
            ("User", 2, "favoriteMovies", "0..*", "Movie", None),
        }
        assert inline_map(result) == {
            ("User", 1): {("aggregate", "address", "1..1", "Address")},
            ("User", 2): {
                ("aggregate", "address", "1..1", "Address"),
                ("aggregate", "watchedMovies", "0..*", "WatchedMovies"),
            },
        }

    def test_all_paths_keeps_the_longer_route_too(self, aggregate_model):
        result = run(aggregate_model, "FROM User TO >> Movie", all_paths=True)
        assert agg_set(result) == {
            ("User", 1, "watchedMovies", "0..*", "WatchedMovies", 1),
            ("User", 2, "watchedMovies", "0..*", "WatchedMovies", 1),
        }

    def test_indirect_star_reaches_everything(self, aggregate_model):
        result = run(aggregate_model, "FROM User TO >> *")
        assert node_set(result) == {
            ("entity", "User", 1),
            ("entity", "User", 2),
            ("entity", "Address", 1),
            ("entity", "Address", 2),
            ("entity", "WatchedMovies", 1),
            ("entity", "Movie", None),
        }
        assert agg_set(result) == {
            ("User", 1, "address", "1..1", "Address", 1),
            ("User", 1, "watchedMovies", "0..*", "WatchedMovies", 1),
            ("User", 2, "address", "1..1", "Address", 2),
            ("User", 2, "watchedMovies", "0..*", "WatchedMovies", 1),
        }
        assert ref_set(result) == {
            ("WatchedMovies", 1, "movie_id", "1..1", "Movie", None),
            ("User", 2, "favoriteMovies", "0..*", "Movie", None),
        }
        assert inline_map(result) == {}

    def test_indirect_kind_constraint_applies_to_the_last_hop(self, aggregate_model):
        refs_only = run(aggregate_model, "FROM User TO >> Movie REF")
        assert ref_set(refs_only) == {
            ("WatchedMovies", 1, "movie_id", "1..1", "Movie", None),
            ("User", 2, "favoriteMovies", "0..*", "Movie", None),
        }
        aggr_only = run(aggregate_model, "FROM User TO >> WatchedMovies AGGR")
        assert agg_set(aggr_only) == {
            ("User", 1, "watchedMovies", "0..*", "WatchedMovies", 1),
            ("User", 2, "watchedMovies", "0..*", "WatchedMovies", 1),
        }

    def test_target_filter_pins_final_reference_variations(self, aggregate_model):
        result = run(aggregate_model, "FROM User TO >> Movie [genre: string]")
        assert ("entity", "Movie", 1) in node_set(result)
        assert ("entity", "Movie", None) in node_set(result)


class TestGraphReferences:
    def test_ref_filter_selects_the_starred_relationship(self, graph_model):
        result = run(graph_model, "FROM User TO Movie REF [stars: number]")
        assert node_set(result) == {
            ("entity", "User", 1),
            ("entity", "User", 2),
            ("entity", "Movie", None),
            ("relationship", "watchedMovies", 1),
        }
        assert ref_set(result) == {
            ("User", 1, "watchedMovies", "0..*", "Movie", None),
            ("User", 2, "watchedMovies", "0..*", "Movie", None),
        }
        assert feat_set(result) == {
            ("User", 1, "watchedMovies", "watchedMovies", 1),
            ("User", 2, "watchedMovies", "watchedMovies", 1),
        }
        assert inline_map(result) == {
            ("User", 1): {("reference", "address", "1..1", "Address")},
            ("User", 2): {
                ("reference", "address", "1..1", "Address"),
                ("reference", "favoriteMovies", "0..*", "Movie"),
            },
        }

    def test_ref_filter_nobody_passes(self, graph_model):
        result = run(graph_model, "FROM User TO Movie REF favoriteMovies [stars: number]")
        assert result.message == "no relationships match the query"

    def test_two_specs_with_target_filter_and_feature_name(self, graph_model):
        result = run(
            graph_model,
            "FROM User [surname: string] TO Address [postCode], Movie REF favoriteMovies",
        )
        assert node_set(result) == {
            ("entity", "User", 2),
            ("entity", "Address", None),
            ("entity", "Address", 2),
            ("entity", "Movie", None),
            ("relationship", "address", 1),
            ("relationship", "favoriteMovies", 1),
        }
        assert ref_set(result) == {
            ("User", 2, "address", "1..1", "Address", None),
            ("User", 2, "favoriteMovies", "0..*", "Movie", None),
        }
        assert feat_set(result) == {
            ("User", 2, "address", "address", 1),
            ("User", 2, "favoriteMovies", "favoriteMovies", 1),
        }
        assert inline_map(result) == {
            ("User", 2): {("reference", "watchedMovies", "0..*", "Movie")}
        }

    def test_featuring_edges_always_accompany_reference_edges(self, graph_model):
        result = run(graph_model, "FROM User TO Address")
        assert feat_set(result) == {
            ("User", 1, "address", "address", 1),
            ("User", 2, "address", "address", 1),
        }


class TestUnionFolding:
    def test_union_from_star_to_star(self, aggregate_model):
        result = run(aggregate_model, "UNION FROM * TO *")
        assert node_set(result) == {
            ("entity", "User", 0),
            ("entity", "Address", 0),
            ("entity", "WatchedMovies", 0),
            ("entity", "Movie", 0),
        }
        user = result.node(
            next(n.key for n in result.nodes if n.key.type_name == "User")
        )
        rel_features = {
            f.name: type(f) for f in user.variation.features
            if isinstance(f, (Reference, Aggregate))
        }
        assert rel_features == {
            "address": Aggregate,
            "watchedMovies": Aggregate,
            "favoriteMovies": Reference,
        }
        address = next(n for n in result.nodes if n.key.type_name == "Address")
        attrs = [f.name for f in address.variation.features if isinstance(f, Attribute)]
        assert attrs == ["city", "number", "postCode", "street"]
        assert agg_set(result) == {
            ("User", 0, "address", "1..1", "Address", 0),
            ("User", 0, "watchedMovies", "0..*", "WatchedMovies", 0),
        }
        assert ref_set(result) == {
            ("User", 0, "favoriteMovies", "0..*", "Movie", 0),
            ("WatchedMovies", 0, "movie_id", "1..1", "Movie", 0),
        }
        assert inline_map(result) == {}

    def test_type_level_targets_fold_over_all_variations(self, aggregate_model):
        result = run(aggregate_model, "UNION FROM User TO Movie REF")
        movie = next(n for n in result.nodes if n.key.type_name == "Movie")
        assert movie.key.variation_id == 0
        assert movie.variation.instance_count == 1

    def test_folded_featuring_edges_rehome_both_ends(self, graph_model):
        result = run(graph_model, "UNION FROM User TO Movie REF [stars: number]")
        assert node_set(result) == {
            ("entity", "User", 0),
            ("entity", "Movie", 0),
            ("relationship", "watchedMovies", 0),
        }
        assert feat_set(result) == {("User", 0, "watchedMovies", "watchedMovies", 0)}
        assert ref_set(result) == {("User", 0, "watchedMovies", "0..*", "Movie", 0)}
