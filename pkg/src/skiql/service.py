"""HTTP facade: schema registry plus parse-execute-render per request.

Query responses are byte-identical for identical (schema, query, format)
inputs; the elapsed time therefore travels in the X-Elapsed-Ms response
header, never in the body.
"""

from __future__ import annotations

import re
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from skiql.engine import execute
from skiql.extract import (
    DocumentSample,
    ExtractionConfig,
    ExtractionError,
    extract_schema,
)
from skiql.model import SkiqlError, USchemaModel, validate_model
from skiql.parser import ParseError, parse
from skiql.render import (
    OUTPUT_FORMATS,
    render_result,
    to_graph_dict,
    to_render_graph,
)
from skiql.schema_io import (
    SchemaSyntaxError,
    SchemaValidationError,
    load_schema,
    schema_from_payload,
    schema_to_payload,
)
from skiql.tokens import LexError


def slugify(name: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")
    return slug or "schema"


@dataclass
class RegistryEntry:
    schema_id: str
    model: USchemaModel
    loaded_at: str
    source: str  # file | extraction | upload


class DuplicateSchemaError(SkiqlError):
    pass


class SchemaRegistry:
    """In-memory schema store; reads are lock-free over immutable entries,
    registration is exclusive so no request sees a partial entry."""

    def __init__(self) -> None:
        self._entries: dict[str, RegistryEntry] = {}
        self._lock = threading.Lock()

    def register(self, model: USchemaModel, source: str) -> RegistryEntry:
        entry = RegistryEntry(
            schema_id=slugify(model.name),
            model=model,
            loaded_at=datetime.now(timezone.utc).isoformat(),
            source=source,
        )
        with self._lock:
            if entry.schema_id in self._entries:
                raise DuplicateSchemaError(
                    f"schema id {entry.schema_id!r} is already registered"
                )
            self._entries[entry.schema_id] = entry
        return entry

    def get(self, schema_id: str) -> Optional[RegistryEntry]:
        return self._entries.get(schema_id)

    def list(self) -> list[RegistryEntry]:
        return [self._entries[key] for key in sorted(self._entries)]


class RegisterRequest(BaseModel):
    document: Optional[dict] = None
    samples: Optional[dict[str, list[dict]]] = None
    config: Optional[dict] = None
    name: Optional[str] = None


class QueryRequest(BaseModel):
    query: str
    format: str = "graphjson"


def _error(status: int, detail: str, **extra: Any) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": detail, **extra})


def _query_error(kind: str, line: int, column: int, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=422,
        content={"kind": kind, "line": line, "column": column, "message": message},
    )


def create_app(
    schemas_dir: Optional[str] = None, web_dir: Optional[str] = None
) -> FastAPI:
    app = FastAPI(title="skiql", docs_url=None, redoc_url=None)
    registry = SchemaRegistry()
    app.state.registry = registry

    if schemas_dir:
        for path in sorted(Path(schemas_dir).glob("*.uschema.json")):
            registry.register(load_schema(path), source="file")

    @app.get("/schemas")
    def list_schemas() -> list[dict]:
        return [
            {
                "schemaId": entry.schema_id,
                "name": entry.model.name,
                "kind": entry.model.kind,
                "typeCounts": {
                    "entityTypes": len(entry.model.entity_types),
                    "relationshipTypes": len(entry.model.relationship_types),
                },
            }
            for entry in registry.list()
        ]

    @app.post("/schemas", status_code=201)
    def register_schema(request: RegisterRequest):
        if (request.document is None) == (request.samples is None):
            return _error(400, "provide exactly one of document, samples")
        try:
            if request.document is not None:
                model = schema_from_payload(request.document)
                source = "upload"
            else:
                samples = [
                    DocumentSample(name, tuple(records))
                    for name, records in sorted(request.samples.items())
                ]
                config = (
                    ExtractionConfig.from_payload(request.config)
                    if request.config is not None
                    else ExtractionConfig()
                )
                model = extract_schema(samples, config, name=request.name or "extracted")
                violations = validate_model(model)
                if violations:
                    raise SchemaValidationError(violations)
                source = "extraction"
        except SchemaSyntaxError as exc:
            return _error(400, str(exc))
        except SchemaValidationError as exc:
            return _error(
                400,
                "schema does not validate",
                violations=[
                    {"path": v.path, "rule": v.rule, "message": v.message}
                    for v in exc.violations
                ],
            )
        except ExtractionError as exc:
            return _error(400, str(exc))
        try:
            entry = registry.register(model, source=source)
        except DuplicateSchemaError as exc:
            return _error(409, str(exc))
        return {"schemaId": entry.schema_id}

    @app.get("/schemas/{schema_id}")
    def get_schema(schema_id: str):
        entry = registry.get(schema_id)
        if entry is None:
            return _error(404, f"no schema {schema_id!r}")
        return {
            "schemaId": entry.schema_id,
            "loadedAt": entry.loaded_at,
            "source": entry.source,
            "document": schema_to_payload(entry.model),
        }

    @app.post("/schemas/{schema_id}/query")
    def run_query(schema_id: str, request: QueryRequest):
        entry = registry.get(schema_id)
        if entry is None:
            return _error(404, f"no schema {schema_id!r}")
        if request.format not in OUTPUT_FORMATS:
            return _error(
                400, f"format must be one of {', '.join(OUTPUT_FORMATS)}"
            )
        started = time.perf_counter()
        try:
            query = parse(request.query)
            result = execute(entry.model, query)
            if request.format == "graphjson":
                rendered: Any = to_graph_dict(to_render_graph(result))
            else:
                rendered = render_result(result, request.format)
        except LexError as exc:
            return _query_error("lex", exc.line, exc.column, exc.reason)
        except ParseError as exc:
            return _query_error("parse", exc.line, exc.column, exc.reason)
        except SkiqlError as exc:
            return _query_error("semantic", 0, 0, str(exc))
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        body = {
            "schemaId": schema_id,
            "query": request.query,
            "format": request.format,
            "result": rendered,
        }
        return JSONResponse(
            content=body, headers={"X-Elapsed-Ms": f"{elapsed_ms:.3f}"}
        )

    if web_dir and Path(web_dir).is_dir():
        app.mount("/", StaticFiles(directory=web_dir, html=True), name="console")
    else:

        @app.get("/")
        def index():
            return {
                "service": "skiql",
                "endpoints": [
                    "GET /schemas",
                    "POST /schemas",
                    "GET /schemas/{id}",
                    "POST /schemas/{id}/query",
                ],
            }

    return app
