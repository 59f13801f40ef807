"""Command-line entry point.

Exit codes: 0 success, 1 I/O or schema problems, 2 query errors.
"""

from __future__ import annotations

import dataclasses
import os
import sys
from pathlib import Path
from typing import Optional

import click

from skiql.engine import complete_schema, execute
from skiql.extract import ExtractionConfig, ExtractionError, read_samples_dir, extract_schema
from skiql.model import SkiqlError, USchemaModel
from skiql.parser import ParseError, parse
from skiql.render import OUTPUT_FORMATS, render_result
from skiql.schema_io import (
    SchemaSyntaxError,
    SchemaValidationError,
    load_schema,
    save_schema,
    serialize_schema,
)
from skiql.tokens import LexError

try:
    import readline
except ImportError:  # pragma: no cover - POSIX builds ship it
    readline = None  # type: ignore[assignment]

_FORMAT = click.Choice(OUTPUT_FORMATS)


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_model(path: str) -> USchemaModel:
    try:
        return load_schema(path)
    except OSError as exc:
        _fail(f"cannot read {path}: {exc.strerror or exc}", 1)
    except (SchemaSyntaxError, SchemaValidationError) as exc:
        _fail(f"{path}: {exc}", 1)
    raise AssertionError("unreachable")


def _annotate(source: str, line: int, column: int, reason: str) -> str:
    """Error text with the offending line and a caret under the column."""
    rows = source.splitlines() or [""]
    row = rows[line - 1] if 1 <= line <= len(rows) else rows[-1]
    caret = " " * max(column - 1, 0) + "^"
    return f"error: [{line}:{column}] {reason}\n  {row}\n  {caret}"


def _run_query(model: USchemaModel, text: str, union: bool, all_paths: bool):
    """Parse and execute; raises the engine's errors unchanged."""
    query = parse(text)
    if union and not query.union:
        query = dataclasses.replace(query, union=True)
    return execute(model, query, all_paths=all_paths)


def _write_output(text: str, out: Optional[str]) -> None:
    if out is None:
        click.echo(text, nl=False)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    except OSError as exc:
        _fail(f"cannot write {out}: {exc.strerror or exc}", 1)


@click.group()
@click.version_option(package_name="skiql")
def main() -> None:
    """Schema workbench: query, extract, validate, render, and serve."""


@main.command()
@click.argument("schema_path")
@click.argument("query_text")
@click.option("--format", "fmt", type=_FORMAT, default="table", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write to a file instead of stdout.")
@click.option("--all-paths", is_flag=True, help="Report every reachable route for >> targets, not just the shortest.")
def query(schema_path: str, query_text: str, fmt: str, out: Optional[str], all_paths: bool) -> None:
    """Run one query against a schema file."""
    model = _load_model(schema_path)
    try:
        result = _run_query(model, query_text, union=False, all_paths=all_paths)
    except (LexError, ParseError) as exc:
        click.echo(_annotate(query_text, exc.line, exc.column, exc.reason), err=True)
        sys.exit(2)
    except SkiqlError as exc:
        _fail(str(exc), 2)
    _write_output(render_result(result, fmt), out)


def _history_path() -> Path:
    override = os.environ.get("SKIQL_HISTORY_FILE")
    if override:
        return Path(override)
    return Path.home() / ".skiql_history"


def _read_history(path: Path) -> None:
    if readline is None:
        return
    try:
        readline.read_history_file(path)
    except OSError:
        pass


def _save_history(path: Path) -> None:
    if readline is None:
        return
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        readline.write_history_file(path)
    except OSError:
        pass


@main.command()
@click.argument("schema_path")
@click.option("--all-paths", is_flag=True, help="Report every reachable route for >> targets, not just the shortest.")
def repl(schema_path: str, all_paths: bool) -> None:
    """Interactive query session against one schema file.

    Lines starting with ':' switch modes (:table, :dot, :graphjson,
    :union on|off) or leave (:quit). Anything else runs as a query.
    """
    model = _load_model(schema_path)
    history = _history_path()
    _read_history(history)
    fmt = "table"
    union = False
    interactive = sys.stdin.isatty()
    click.echo(f"{model.name} loaded; :quit leaves, :dot/:table/:graphjson switch output")
    try:
        while True:
            try:
                line = input("skiql> ").strip()
            except EOFError:
                if interactive:
                    click.echo()
                break
            except KeyboardInterrupt:
                click.echo()
                continue
            if not line:
                continue
            if readline is not None and not interactive:
                readline.add_history(line)
            if line.startswith(":"):
                if line == ":quit":
                    break
                if line in (":table", ":dot", ":graphjson"):
                    fmt = line[1:]
                    click.echo(f"output format: {fmt}")
                elif line in (":union on", ":union off"):
                    union = line.endswith("on")
                    click.echo(f"union folding: {'on' if union else 'off'}")
                else:
                    click.echo(f"unknown command {line!r}", err=True)
                continue
            try:
                result = _run_query(model, line, union=union, all_paths=all_paths)
            except (LexError, ParseError) as exc:
                click.echo(_annotate(line, exc.line, exc.column, exc.reason), err=True)
                continue
            except SkiqlError as exc:
                click.echo(f"error: {exc}", err=True)
                continue
            click.echo(render_result(result, fmt), nl=False)
    finally:
        _save_history(history)


@main.command()
@click.argument("samples_dir")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="Extraction settings (id field, reference heuristics, timestamp field).")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the schema document here instead of stdout.")
@click.option("--name", default=None, help="Schema name; defaults to the samples directory name.")
def extract(samples_dir: str, config_path: Optional[str], out: Optional[str], name: Optional[str]) -> None:
    """Infer a schema from a directory of .jsonl sample collections."""
    try:
        config = ExtractionConfig.from_file(config_path) if config_path else ExtractionConfig()
        samples = read_samples_dir(samples_dir)
        model = extract_schema(samples, config, name=name or Path(samples_dir).name)
    except OSError as exc:
        _fail(f"{exc.strerror or exc}", 1)
    except ExtractionError as exc:
        _fail(str(exc), 1)
    if out is None:
        click.echo(serialize_schema(model), nl=False)
        return
    try:
        save_schema(model, out)
    except OSError as exc:
        _fail(f"cannot write {out}: {exc.strerror or exc}", 1)


@main.command()
@click.argument("schema_path")
def validate(schema_path: str) -> None:
    """Check a schema file; list violations and exit 1 if any."""
    try:
        model = load_schema(schema_path)
    except OSError as exc:
        _fail(f"cannot read {schema_path}: {exc.strerror or exc}", 1)
        return
    except SchemaSyntaxError as exc:
        _fail(f"{schema_path}: {exc}", 1)
        return
    except SchemaValidationError as exc:
        for violation in exc.violations:
            click.echo(f"{violation.path}: {violation.rule}: {violation.message}", err=True)
        sys.exit(1)
    click.echo(
        f"ok: {len(model.entity_types)} entity types, "
        f"{len(model.relationship_types)} relationship types"
    )


@main.command()
@click.argument("schema_path")
@click.option("--format", "fmt", type=_FORMAT, default="dot", show_default=True)
@click.option("--union", is_flag=True, help="Fold every type to its union variation first.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write to a file instead of stdout.")
def render(schema_path: str, fmt: str, union: bool, out: Optional[str]) -> None:
    """Render the whole schema (no query)."""
    model = _load_model(schema_path)
    result = complete_schema(model, union=union)
    _write_output(render_result(result, fmt), out)


@main.command()
@click.option("--listen", default="127.0.0.1:7474", show_default=True, help="host:port to bind.")
@click.option("--schemas", "schemas_dir", envvar="SKIQL_SCHEMAS_DIR", type=click.Path(file_okay=False), default=None, help="Directory of .uschema.json files to preload [env: SKIQL_SCHEMAS_DIR].")
@click.option("--web", "web_dir", type=click.Path(file_okay=False), default=None, help="Static console bundle to serve at /.")
def serve(listen: str, schemas_dir: Optional[str], web_dir: Optional[str]) -> None:
    """Start the HTTP service."""
    import uvicorn

    from skiql.service import create_app

    host, _, port_text = listen.rpartition(":")
    if not host or not port_text.isdigit():
        _fail(f"bad --listen value {listen!r}, expected host:port", 1)
    try:
        app = create_app(schemas_dir=schemas_dir, web_dir=web_dir)
    except (OSError, SchemaSyntaxError, SchemaValidationError) as exc:
        _fail(str(exc), 1)
        return
    try:
        uvicorn.run(app, host=host, port=int(port_text), log_level="warning")
    except (OSError, SystemExit):
        _fail(f"cannot bind {listen}", 1)


if __name__ == "__main__":
    main()
