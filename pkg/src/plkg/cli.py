"""Operator command line.

Exit codes: 0 success, 1 the checked input has error-severity findings,
2 usage or IO failure. ``--json`` switches machine output on; machine
output always has sorted keys so it is byte-stable.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .agreement import cohen_kappa, union_node_set
from .annotation import (
    normalize_annotation,
    parse_annotation,
    to_training_records,
    records_to_jsonl,
    validate_annotation,
)
from .errors import InvalidAnnotation, PlkgError
from .features import extract_all
from .schema import load_schema_file, parse_schema, validate_schema

EXIT_FINDINGS = 1
EXIT_USAGE = 2


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_USAGE)


def _resolve_schema_arg(args: tuple[str, ...], trailing: int) -> tuple[str, tuple[str, ...]]:
    """Split positional args into (schema path, trailing args).

    The schema positional may be omitted when $PLKG_SCHEMA is set, so the
    argument list holds either ``trailing`` or ``trailing + 1`` entries.
    """
    if len(args) == trailing + 1:
        return args[0], args[1:]
    if len(args) == trailing:
        env = os.environ.get("PLKG_SCHEMA")
        if not env:
            _fail("no schema given and PLKG_SCHEMA is not set")
        return env, args
    _fail(f"expected {trailing + 1} arguments (or {trailing} with PLKG_SCHEMA set)")


def _load_schema_arg(path: str) -> "object":
    try:
        return load_schema_file(path)
    except (OSError, PlkgError) as exc:
        _fail(f"cannot load schema {path!r}: {exc}")


def _read_annotation(path: str):
    try:
        return parse_annotation(Path(path).read_bytes())
    except OSError as exc:
        _fail(str(exc))
    except PlkgError as exc:
        _fail(f"{path}: {exc}")


def _emit_report(report, as_json: bool) -> None:
    click.echo(report.to_json() if as_json else report.to_text())


@click.group()
def main() -> None:
    """Painting-language knowledge-graph annotation toolkit."""


@main.group()
def schema() -> None:
    """Schema file operations."""


@schema.command("validate")
@click.argument("schema_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Machine-readable report.")
def schema_validate(schema_file: str, as_json: bool) -> None:
    """Check a schema file against every structural invariant."""
    try:
        parsed = parse_schema(Path(schema_file).read_bytes())
    except (OSError, PlkgError) as exc:
        _fail(str(exc))
    report = validate_schema(parsed)
    _emit_report(report, as_json)
    sys.exit(EXIT_FINDINGS if report.has_errors() else 0)


@main.group()
def annotate() -> None:
    """Annotation file operations."""


@annotate.command("validate")
@click.argument("args", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Machine-readable report.")
def annotate_validate(args: tuple[str, ...], as_json: bool) -> None:
    """Validate SCHEMA ANNOTATION, then re-check the normalized form.

    The schema argument may be dropped when $PLKG_SCHEMA is set.
    """
    schema_path, (annotation_file,) = _resolve_schema_arg(args, 1)
    schema_obj = _load_schema_arg(schema_path)
    ann = _read_annotation(annotation_file)
    try:
        report = validate_annotation(schema_obj, ann)
        if not report.has_errors():
            normalized = normalize_annotation(schema_obj, ann)
            report = report.merged_with(validate_annotation(schema_obj, normalized))
    except PlkgError as exc:
        _fail(str(exc))
    _emit_report(report, as_json)
    sys.exit(EXIT_FINDINGS if report.has_errors() else 0)


@main.group()
def features() -> None:
    """Image feature extraction."""


@features.command("extract")
@click.argument("image_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--path", "path_file", type=click.Path(exists=True, dir_okay=False),
              help="JSON polyline [[x, y], ...] for S-curve coverage.")
@click.option("--lines", "lines_file", type=click.Path(exists=True, dir_okay=False),
              help="JSON line list [[[x1, y1], [x2, y2]], ...] for the vanishing point.")
@click.option("--json", "json_out", type=click.Path(dir_okay=False),
              help="Write the feature vector to this file instead of stdout.")
def features_extract(image_file: str, path_file: str | None, lines_file: str | None,
                     json_out: str | None) -> None:
    """Compute the full feature vector of a PNG image."""
    import numpy as np
    from PIL import Image

    try:
        with Image.open(image_file) as im:
            raster = np.asarray(im.convert("RGB"), dtype=np.float64)
        path = json.loads(Path(path_file).read_text()) if path_file else None
        lines = json.loads(Path(lines_file).read_text()) if lines_file else None
    except (OSError, json.JSONDecodeError) as exc:
        _fail(str(exc))
    try:
        fv = extract_all(raster, path=path, lines=lines)
    except PlkgError as exc:
        _fail(str(exc))
    payload = json.dumps(fv, ensure_ascii=False, sort_keys=True)
    if json_out:
        Path(json_out).write_text(payload + "\n", encoding="utf-8")
    else:
        click.echo(payload)


def _read_annotation_dir(directory: str) -> list:
    anns = []
    for path in sorted(Path(directory).glob("*.json")):
        anns.append(_read_annotation(str(path)))
    return anns


@main.command("export")
@click.argument("args", nargs=-1, type=click.Path(exists=True))
@click.option("--out", "out_file", required=True, type=click.Path(dir_okay=False),
              help="Destination JSONL file.")
def export(args: tuple[str, ...], out_file: str) -> None:
    """Export SCHEMA ANNOTATION_DIR as training-record JSONL.

    All-or-nothing: a single invalid annotation aborts the run before any
    byte is written. The schema argument may be dropped when $PLKG_SCHEMA
    is set.
    """
    schema_path, (annotation_dir,) = _resolve_schema_arg(args, 1)
    schema_obj = _load_schema_arg(schema_path)
    anns = _read_annotation_dir(annotation_dir)
    try:
        records = to_training_records(schema_obj, anns)
    except InvalidAnnotation as exc:
        click.echo(exc.report.to_text(), err=True)
        sys.exit(EXIT_FINDINGS)
    except PlkgError as exc:
        _fail(str(exc))
    Path(out_file).write_text(records_to_jsonl(records), encoding="utf-8")
    click.echo(f"wrote {len(records)} records to {out_file}")


@main.command("agreement")
@click.argument("args", nargs=-1, type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True, help="Machine-readable report.")
@click.option("--report-dir", type=click.Path(file_okay=False),
              help="Also render a kappa bar chart (PNG) and TSV table here.")
def agreement(args: tuple[str, ...], as_json: bool, report_dir: str | None) -> None:
    """Inter-annotator agreement between SCHEMA DIR_A DIR_B.

    The schema argument may be dropped when $PLKG_SCHEMA is set.
    """
    schema_path, (dir_a, dir_b) = _resolve_schema_arg(args, 2)
    _load_schema_arg(schema_path)  # fail fast on a broken schema argument
    corpus_a = _read_annotation_dir(dir_a)
    corpus_b = _read_annotation_dir(dir_b)
    try:
        result = cohen_kappa(corpus_a, corpus_b, union_node_set(corpus_a + corpus_b))
    except PlkgError as exc:
        _fail(str(exc))
    if report_dir:
        from .report import write_agreement_artifacts

        written = write_agreement_artifacts(result, report_dir)
        for p in written:
            click.echo(f"wrote {p}", err=True)
    if as_json:
        click.echo(json.dumps(result.to_dict(), ensure_ascii=False, sort_keys=True))
    else:
        click.echo(result.to_text())


@main.command("serve")
@click.argument("workspace_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--bind", default="127.0.0.1:8423", show_default=True,
              help="host:port to listen on.")
def serve_cmd(workspace_dir: str, bind: str) -> None:
    """Serve a workspace over the HTTP API."""
    from .service import serve
    from .store import open_workspace

    try:
        ws = open_workspace(workspace_dir)
    except PlkgError as exc:
        _fail(str(exc))
    for finding in ws.quarantined:
        click.echo(f"warning: {finding.subject}: {finding.message}", err=True)
    try:
        serve(ws, bind)
    except PlkgError as exc:
        _fail(str(exc))


if __name__ == "__main__":
    main()
