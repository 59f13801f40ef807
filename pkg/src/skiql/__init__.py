"""SkiQL: a query workbench for unified logical schemas.

The package bundles a structural-variation schema model, readers and writers
for the ``.uschema.json`` document format, a desk-scale schema extractor for
JSON document samples, the SkiQL query language (lexer, parser, engine),
diagram renderers, an HTTP service, and a command-line interface.
"""

from skiql.model import (
    Aggregate,
    Attribute,
    Cardinality,
    EntityType,
    FeatureClass,
    Key,
    KindConflictError,
    Reference,
    RelationshipType,
    SkiqlError,
    StructuralVariation,
    USchemaModel,
    Violation,
    classify_feature,
    union_schema,
    union_type,
    validate_model,
)

__version__ = "0.1.0"

__all__ = [
    "Aggregate",
    "Attribute",
    "Cardinality",
    "EntityType",
    "FeatureClass",
    "Key",
    "KindConflictError",
    "Reference",
    "RelationshipType",
    "SkiqlError",
    "StructuralVariation",
    "USchemaModel",
    "Violation",
    "classify_feature",
    "union_schema",
    "union_type",
    "validate_model",
    "__version__",
]
