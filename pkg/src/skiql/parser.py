"""Recursive-descent parser for SkiQL.

Grammar sketch (keywords are literal, [] optional, {} repeated):

    query        = [UNION] (typeQuery | relQuery)
    typeQuery    = (ENTITY | REL | ANY) nameSpec [filter] [operations]
    relQuery     = FROM (_ | nameSpec [filter]) TO relSpec {"," relSpec}
    relSpec      = _ | [">>"] nameSpec [filter] [kind [featureName] [filter]]
    kind         = REF | AGGR | ANY          (missing kind means ANY)
    nameSpec     = "*" [ident ["*"]] | ident ["*"] | regex
    filter       = "[" featureSpec {"," featureSpec} "]"
    featureSpec  = [shared | non-shared | specific] ident [":" [featureType]]
    featureType  = basic | basic "[" "]" | Set "<" basic ">" | List "<" basic ">"
                 | Tuple "<" basic {"," basic} ">" | Map "<" basic "," basic ">"
                 | AGGR ["<" ident ">"] | REF ["<" ident ">"] | "?"
    operations   = operation {"," operation}
    operation    = keys | history (before date | after date
                 | between "(" date "," date ")")

A second filter is only meaningful after REF, where it selects featuring
relationship-type variations.
"""

from __future__ import annotations

import re
from datetime import date
from typing import Optional

from skiql.model import (
    ArrayType,
    BOOLEAN,
    ListType,
    MapType,
    NUMBER,
    STRING,
    SetType,
    SkiqlError,
    TupleType,
    UNKNOWN,
)
from skiql.query_ast import (
    AggregateTypeSpec,
    AllNames,
    AttributeTypeSpec,
    ContainsName,
    ExactName,
    FeatureClass,
    FeatureSpec,
    HistoryAfter,
    HistoryBefore,
    HistoryBetween,
    KeysOp,
    NameSpec,
    NoSource,
    NoTarget,
    Operation,
    PrefixName,
    Query,
    ReferenceTypeSpec,
    RegexName,
    RelKind,
    RelQuery,
    RelSpec,
    SourceSpec,
    SuffixName,
    TargetSpec,
    TypeQuery,
    TypeSpec,
    TypeTarget,
    VariationFilter,
)
from skiql.tokens import Token, TokenKind, tokenize


class ParseError(SkiqlError):
    def __init__(self, token: Token, message: str):
        super().__init__(f"[{token.line}:{token.column}] {message}")
        self.line = token.line
        self.column = token.column
        self.reason = message


_BASIC_TYPES = {"number": NUMBER, "string": STRING, "boolean": BOOLEAN}
_CLASS_TOKENS = {
    TokenKind.SHARED: FeatureClass.SHARED,
    TokenKind.NON_SHARED: FeatureClass.NON_SHARED,
    TokenKind.SPECIFIC: FeatureClass.SPECIFIC,
}


class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        idx = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[idx]

    def at(self, kind: TokenKind) -> bool:
        return self.peek().kind is kind

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind is not TokenKind.EOF:
            self.pos += 1
        return token

    def expect(self, kind: TokenKind, what: str) -> Token:
        if not self.at(kind):
            raise ParseError(self.peek(), f"expected {what}, found {self.peek().describe()}")
        return self.advance()

    def fail(self, message: str) -> ParseError:
        return ParseError(self.peek(), f"{message}, found {self.peek().describe()}")

    # -- entry point --------------------------------------------------------

    def parse_query(self) -> Query:
        union = False
        if self.at(TokenKind.UNION):
            self.advance()
            union = True
        token = self.peek()
        if token.kind in (TokenKind.ENTITY, TokenKind.REL, TokenKind.ANY):
            query = self._type_query(union)
        elif token.kind is TokenKind.FROM:
            query = self._rel_query(union)
        else:
            raise self.fail("expected ENTITY, REL, ANY, or FROM")
        self.expect(TokenKind.EOF, "end of query")
        return query

    # -- type queries -------------------------------------------------------

    def _type_query(self, union: bool) -> TypeQuery:
        target = TypeTarget[self.advance().value]
        spec = self._name_spec()
        flt = self._filter_if_present()
        operations = self._operations()
        return TypeQuery(
            target=target, spec=spec, union=union, filter=flt, operations=operations
        )

    def _operations(self) -> tuple[Operation, ...]:
        if self.peek().kind not in (TokenKind.KEYS, TokenKind.HISTORY):
            return ()
        ops = [self._operation()]
        while self.at(TokenKind.COMMA):
            self.advance()
            ops.append(self._operation())
        return tuple(ops)

    def _operation(self) -> Operation:
        if self.at(TokenKind.KEYS):
            self.advance()
            return KeysOp()
        if self.at(TokenKind.HISTORY):
            self.advance()
            if self.at(TokenKind.BEFORE):
                self.advance()
                return HistoryBefore(self._date())
            if self.at(TokenKind.AFTER):
                self.advance()
                return HistoryAfter(self._date())
            if self.at(TokenKind.BETWEEN):
                self.advance()
                self.expect(TokenKind.LPAREN, "'('")
                start = self._date()
                self.expect(TokenKind.COMMA, "','")
                end_token = self.peek()
                end = self._date()
                self.expect(TokenKind.RPAREN, "')'")
                if start > end:
                    raise ParseError(end_token, "interval end precedes its start")
                return HistoryBetween(start, end)
            raise self.fail("expected before, after, or between")
        raise self.fail("expected keys or history")

    def _date(self) -> date:
        token = self.expect(TokenKind.DATE, "a date (YYYY-MM-DD)")
        try:
            return date.fromisoformat(token.value)
        except ValueError:
            raise ParseError(token, f"impossible calendar date {token.value!r}") from None

    # -- relationship queries -------------------------------------------------

    def _rel_query(self, union: bool) -> RelQuery:
        self.expect(TokenKind.FROM, "FROM")
        if self.at(TokenKind.UNDERSCORE):
            self.advance()
            source: NoSource | SourceSpec = NoSource()
        else:
            source = SourceSpec(self._name_spec(), self._filter_if_present())
        self.expect(TokenKind.TO, "TO")
        specs = [self._rel_spec()]
        while self.at(TokenKind.COMMA):
            self.advance()
            specs.append(self._rel_spec())
        return RelQuery(source=source, rel_specs=tuple(specs), union=union)

    def _rel_spec(self) -> RelSpec:
        if self.at(TokenKind.UNDERSCORE):
            self.advance()
            return NoTarget()
        indirect = False
        if self.at(TokenKind.INDIRECT):
            indirect_token = self.advance()
            if self.at(TokenKind.UNDERSCORE):
                raise ParseError(indirect_token, "'>>' cannot precede '_'")
            indirect = True
        spec = self._name_spec()
        target_filter = self._filter_if_present()
        kind = RelKind.ANY
        feature_name: Optional[str] = None
        ref_filter: Optional[VariationFilter] = None
        if self.peek().kind in (TokenKind.REF, TokenKind.AGGR, TokenKind.ANY):
            kind = RelKind[self.advance().value]
            if self.at(TokenKind.IDENT):
                feature_name = self.advance().value
            if self.at(TokenKind.LBRACKET):
                if kind is not RelKind.REF:
                    raise self.fail(
                        "a second filter is only allowed after REF "
                        "(it selects featuring relationship variations)"
                    )
                ref_filter = self._variation_filter()
        return TargetSpec(
            spec=spec,
            kind=kind,
            indirect=indirect,
            target_filter=target_filter,
            feature_name=feature_name,
            ref_filter=ref_filter,
        )

    # -- shared pieces -------------------------------------------------------

    def _name_spec(self) -> NameSpec:
        token = self.peek()
        if token.kind is TokenKind.STAR:
            self.advance()
            if self.at(TokenKind.IDENT):
                stem = self.advance().value
                if self.at(TokenKind.STAR):
                    self.advance()
                    return ContainsName(stem)
                return SuffixName(stem)
            return AllNames()
        if token.kind is TokenKind.IDENT:
            self.advance()
            if self.at(TokenKind.STAR):
                self.advance()
                return PrefixName(token.value)
            return ExactName(token.value)
        if token.kind is TokenKind.REGEX:
            self.advance()
            try:
                re.compile(token.value)
            except re.error as exc:
                raise ParseError(token, f"bad regex: {exc}") from None
            return RegexName(token.value)
        raise self.fail("expected a type name, '*', or a regex")

    def _filter_if_present(self) -> Optional[VariationFilter]:
        if self.at(TokenKind.LBRACKET):
            return self._variation_filter()
        return None

    def _variation_filter(self) -> VariationFilter:
        self.expect(TokenKind.LBRACKET, "'['")
        if self.at(TokenKind.RBRACKET):
            raise self.fail("a variation filter needs at least one feature")
        specs = [self._feature_spec()]
        seen = {specs[0].name}
        while self.at(TokenKind.COMMA):
            self.advance()
            name_token = self.peek()
            spec = self._feature_spec()
            if spec.name in seen:
                raise ParseError(
                    name_token, f"duplicate feature {spec.name!r} in filter"
                )
            seen.add(spec.name)
            specs.append(spec)
        self.expect(TokenKind.RBRACKET, "']'")
        return VariationFilter(tuple(specs))

    def _feature_spec(self) -> FeatureSpec:
        modifier: Optional[FeatureClass] = None
        if self.peek().kind in _CLASS_TOKENS:
            modifier = _CLASS_TOKENS[self.advance().kind]
        name = self.expect(TokenKind.IDENT, "a feature name").value
        type_spec: Optional[TypeSpec] = None
        if self.at(TokenKind.COLON):
            self.advance()
            type_spec = self._feature_type()
        return FeatureSpec(name=name, class_modifier=modifier, type_spec=type_spec)

    def _feature_type(self) -> TypeSpec:
        token = self.peek()
        if token.kind is TokenKind.QUESTION:
            self.advance()
            return AttributeTypeSpec(UNKNOWN)
        if token.kind in (TokenKind.AGGR, TokenKind.REF):
            self.advance()
            target: Optional[str] = None
            if self.at(TokenKind.LT):
                self.advance()
                target = self.expect(TokenKind.IDENT, "a target type name").value
                self.expect(TokenKind.GT, "'>'")
            if token.kind is TokenKind.AGGR:
                return AggregateTypeSpec(target)
            return ReferenceTypeSpec(target)
        if token.kind is TokenKind.IDENT:
            return AttributeTypeSpec(self._data_type())
        raise self.fail("expected a type")

    def _data_type(self):
        token = self.expect(TokenKind.IDENT, "a type name")
        head = token.value.lower()
        if head in _BASIC_TYPES:
            base = _BASIC_TYPES[head]
            if self.at(TokenKind.LBRACKET):
                self.advance()
                self.expect(TokenKind.RBRACKET, "']' closing the array suffix")
                return ArrayType(base)
            return base
        if head in ("set", "list"):
            self.expect(TokenKind.LT, "'<'")
            element = self._basic_type()
            self.expect(TokenKind.GT, "'>'")
            return SetType(element) if head == "set" else ListType(element)
        if head == "tuple":
            self.expect(TokenKind.LT, "'<'")
            elements = [self._basic_type()]
            while self.at(TokenKind.COMMA):
                self.advance()
                elements.append(self._basic_type())
            self.expect(TokenKind.GT, "'>'")
            return TupleType(tuple(elements))
        if head == "map":
            self.expect(TokenKind.LT, "'<'")
            key = self._basic_type()
            self.expect(TokenKind.COMMA, "','")
            value = self._basic_type()
            self.expect(TokenKind.GT, "'>'")
            return MapType(key, value)
        raise ParseError(token, f"unknown type {token.value!r}")

    def _basic_type(self):
        token = self.expect(TokenKind.IDENT, "a basic type (number, string, boolean)")
        basic = _BASIC_TYPES.get(token.value.lower())
        if basic is None:
            raise ParseError(
                token, f"collections hold basic types only, got {token.value!r}"
            )
        return basic


def parse(source: str) -> Query:
    """Tokenize and parse one query."""
    return Parser(tokenize(source)).parse_query()


def parse_name_spec(source: str) -> NameSpec:
    """Parse a bare name specification (used by extractor heuristics)."""
    parser = Parser(tokenize(source))
    spec = parser._name_spec()
    parser.expect(TokenKind.EOF, "end of name pattern")
    return spec
