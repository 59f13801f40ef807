"""Abstract syntax of SkiQL queries, plus the canonical unparser.

Two query forms exist.  A type query selects schema types by name and shows
their variations; a relationship query walks reference and aggregation
features from source entity types towards target specifications.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import date
from enum import Enum
from functools import lru_cache
from typing import Optional, Union

from skiql.model import (
    ArrayType,
    DataType,
    FeatureClass,
    ListType,
    MapType,
    ScalarType,
    SetType,
    TupleType,
    UNKNOWN,
)


# ---------------------------------------------------------------------------
# Name specifications
# ---------------------------------------------------------------------------


class NameSpec:
    """How a query designates schema type names."""

    def matches(self, name: str) -> bool:
        raise NotImplementedError

    def render(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class ExactName(NameSpec):
    name: str

    def matches(self, name: str) -> bool:
        return name == self.name

    def render(self) -> str:
        return self.name


@dataclass(frozen=True)
class PrefixName(NameSpec):
    stem: str

    def matches(self, name: str) -> bool:
        return name.startswith(self.stem)

    def render(self) -> str:
        return f"{self.stem}*"


@dataclass(frozen=True)
class SuffixName(NameSpec):
    stem: str

    def matches(self, name: str) -> bool:
        return name.endswith(self.stem)

    def render(self) -> str:
        return f"*{self.stem}"


@dataclass(frozen=True)
class ContainsName(NameSpec):
    stem: str

    def matches(self, name: str) -> bool:
        return self.stem in name

    def render(self) -> str:
        return f"*{self.stem}*"


@dataclass(frozen=True)
class AllNames(NameSpec):
    def matches(self, name: str) -> bool:
        return True

    def render(self) -> str:
        return "*"


@lru_cache(maxsize=256)
def _compiled(pattern: str) -> re.Pattern[str]:
    return re.compile(pattern)


@dataclass(frozen=True)
class RegexName(NameSpec):
    """A regular expression matched against the whole type name."""

    pattern: str

    def matches(self, name: str) -> bool:
        return _compiled(self.pattern).fullmatch(name) is not None

    def render(self) -> str:
        return 'r"' + self.pattern.replace('"', '\\"') + '"'


# ---------------------------------------------------------------------------
# Variation filters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AttributeTypeSpec:
    """Requires an attribute with this exact (or unknown) data type."""

    data_type: DataType


@dataclass(frozen=True)
class ReferenceTypeSpec:
    """Requires a reference feature, optionally to a named target."""

    target: Optional[str] = None


@dataclass(frozen=True)
class AggregateTypeSpec:
    """Requires an aggregate feature, optionally of a named target."""

    target: Optional[str] = None


TypeSpec = Union[AttributeTypeSpec, ReferenceTypeSpec, AggregateTypeSpec]


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    class_modifier: Optional[FeatureClass] = None
    type_spec: Optional[TypeSpec] = None


@dataclass(frozen=True)
class VariationFilter:
    specs: tuple[FeatureSpec, ...]


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KeysOp:
    pass


@dataclass(frozen=True)
class HistoryBefore:
    day: date


@dataclass(frozen=True)
class HistoryAfter:
    day: date


@dataclass(frozen=True)
class HistoryBetween:
    start: date
    end: date


Operation = Union[KeysOp, HistoryBefore, HistoryAfter, HistoryBetween]


# ---------------------------------------------------------------------------
# Queries
# ---------------------------------------------------------------------------


class TypeTarget(Enum):
    ENTITY = "ENTITY"
    REL = "REL"
    ANY = "ANY"


@dataclass(frozen=True)
class TypeQuery:
    target: TypeTarget
    spec: NameSpec
    union: bool = False
    filter: Optional[VariationFilter] = None
    operations: tuple[Operation, ...] = ()


class RelKind(Enum):
    REF = "REF"
    AGGR = "AGGR"
    ANY = "ANY"


@dataclass(frozen=True)
class SourceSpec:
    spec: NameSpec
    filter: Optional[VariationFilter] = None


@dataclass(frozen=True)
class NoSource:
    """The FROM clause written ``_``: assert nothing points at the targets."""


FromClause = Union[SourceSpec, NoSource]


@dataclass(frozen=True)
class TargetSpec:
    spec: NameSpec
    kind: RelKind = RelKind.ANY
    indirect: bool = False
    target_filter: Optional[VariationFilter] = None
    feature_name: Optional[str] = None
    ref_filter: Optional[VariationFilter] = None


@dataclass(frozen=True)
class NoTarget:
    """A target written ``_``: assert the source points at nothing."""


RelSpec = Union[TargetSpec, NoTarget]


@dataclass(frozen=True)
class RelQuery:
    source: FromClause
    rel_specs: tuple[RelSpec, ...]
    union: bool = False


Query = Union[TypeQuery, RelQuery]


# ---------------------------------------------------------------------------
# Unparsing
# ---------------------------------------------------------------------------


def render_query_type(dt: DataType) -> str:
    """Render a data type the way queries spell it (lower-case basics)."""
    if isinstance(dt, ScalarType):
        return "?" if dt == UNKNOWN else dt.name
    if isinstance(dt, ArrayType):
        return f"{render_query_type(dt.element)}[]"
    if isinstance(dt, SetType):
        return f"Set<{render_query_type(dt.element)}>"
    if isinstance(dt, ListType):
        return f"List<{render_query_type(dt.element)}>"
    if isinstance(dt, TupleType):
        return "Tuple<" + ", ".join(render_query_type(e) for e in dt.elements) + ">"
    if isinstance(dt, MapType):
        return f"Map<{render_query_type(dt.key)}, {render_query_type(dt.value)}>"
    raise ValueError(f"queries cannot spell {dt!r}")


def _render_type_spec(spec: TypeSpec) -> str:
    if isinstance(spec, AttributeTypeSpec):
        return render_query_type(spec.data_type)
    keyword = "REF" if isinstance(spec, ReferenceTypeSpec) else "AGGR"
    if spec.target is None:
        return keyword
    return f"{keyword}<{spec.target}>"


def _render_feature_spec(spec: FeatureSpec) -> str:
    parts = []
    if spec.class_modifier is not None:
        parts.append(spec.class_modifier.value)
    name = spec.name
    if spec.type_spec is not None:
        name += f": {_render_type_spec(spec.type_spec)}"
    parts.append(name)
    return " ".join(parts)


def _render_filter(flt: Optional[VariationFilter]) -> str:
    if flt is None:
        return ""
    return " [" + ", ".join(_render_feature_spec(s) for s in flt.specs) + "]"


def _render_operation(op: Operation) -> str:
    if isinstance(op, KeysOp):
        return "keys"
    if isinstance(op, HistoryBefore):
        return f"history before {op.day.isoformat()}"
    if isinstance(op, HistoryAfter):
        return f"history after {op.day.isoformat()}"
    return f"history between ({op.start.isoformat()}, {op.end.isoformat()})"


def _render_rel_spec(spec: RelSpec) -> str:
    if isinstance(spec, NoTarget):
        return "_"
    head = ">> " if spec.indirect else ""
    head += spec.spec.render() + _render_filter(spec.target_filter)
    needs_kind = spec.kind is not RelKind.ANY or spec.feature_name is not None
    if needs_kind:
        head += f" {spec.kind.value}"
        if spec.feature_name is not None:
            head += f" {spec.feature_name}"
    if spec.ref_filter is not None:
        head += _render_filter(spec.ref_filter)
    return head


def unparse(query: Query) -> str:
    """Render a query back to its canonical textual form."""
    prefix = "UNION " if query.union else ""
    if isinstance(query, TypeQuery):
        text = f"{prefix}{query.target.value} {query.spec.render()}"
        text += _render_filter(query.filter)
        if query.operations:
            text += " " + ", ".join(_render_operation(op) for op in query.operations)
        return text
    source = (
        "_"
        if isinstance(query.source, NoSource)
        else query.source.spec.render() + _render_filter(query.source.filter)
    )
    targets = ", ".join(_render_rel_spec(s) for s in query.rel_specs)
    return f"{prefix}FROM {source} TO {targets}"
