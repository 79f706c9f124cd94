"""HTTP API over a workspace.

Thin JSON layer: every route delegates to the library and returns either
the canonical serialization of a domain value or a ValidationReport body.
The 422 body for a rejected annotation is the exact canonical report JSON
that the command line prints, byte for byte.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request, Response

from .agreement import cohen_kappa, union_node_set
from .annotation import parse_annotation, validate_annotation
from .errors import (
    MisalignedCorpora,
    ParseError,
    RevisionConflict,
    SchemaMismatch,
    ValidationFailed,
)
from .features import suggest_labels
from .store import SCHEMA_FILENAME, Workspace


def _json_response(payload, status_code: int = 200) -> Response:
    return Response(
        content=json.dumps(payload, ensure_ascii=False, sort_keys=True),
        status_code=status_code,
        media_type="application/json",
    )


def _report_response(report, status_code: int) -> Response:
    return Response(
        content=report.to_json(),
        status_code=status_code,
        media_type="application/json",
    )


def _error(status_code: int, message: str) -> Response:
    return _json_response({"error": message}, status_code)


def create_app(ws: Workspace) -> FastAPI:
    app = FastAPI(title="plkg", docs_url=None, redoc_url=None)

    @app.get("/schema")
    def get_schema() -> Response:
        data = (ws.root / SCHEMA_FILENAME).read_bytes()
        return Response(content=data, media_type="application/json")

    @app.get("/annotations")
    def list_annotations() -> Response:
        return _json_response({"annotations": ws.list_annotation_ids()})

    @app.get("/annotations/{ann_id}")
    def get_annotation(ann_id: str) -> Response:
        ann = ws.get_annotation(ann_id)
        if ann is None:
            return _error(404, f"no annotation {ann_id!r}")
        return _json_response(ann.to_dict())

    @app.post("/annotations")
    async def post_annotation(request: Request) -> Response:
        body = await request.body()
        try:
            ann = parse_annotation(body)
        except ParseError as exc:
            return _error(422, str(exc))
        existing = ws.get_annotation(ann.id)
        try:
            ws.put_annotation(ann, expected_revision=ann.revision)
        except ValidationFailed as exc:
            return _report_response(exc.report, 422)
        except SchemaMismatch as exc:
            return _error(422, str(exc))
        except RevisionConflict as exc:
            return _error(409, str(exc))
        stored = ws.get_annotation(ann.id)
        return _json_response(stored.to_dict(), 200 if existing is not None else 201)

    @app.post("/annotations/{ann_id}/validate")
    async def validate_stored_or_sent(ann_id: str, request: Request) -> Response:
        """Validate a request body if given, else the stored annotation."""
        body = await request.body()
        if body:
            try:
                ann = parse_annotation(body)
            except ParseError as exc:
                return _error(422, str(exc))
        else:
            ann = ws.get_annotation(ann_id)
            if ann is None:
                return _error(404, f"no annotation {ann_id!r}")
        try:
            report = validate_annotation(ws.schema, ann)
        except SchemaMismatch as exc:
            return _error(422, str(exc))
        return _report_response(report, 200)

    @app.get("/images")
    def list_images() -> Response:
        return _json_response({"images": ws.list_images()})

    @app.get("/images/{name}")
    def get_image(name: str) -> Response:
        path = ws.image_path(name)
        if path is None:
            return _error(404, f"no image {name!r}")
        return Response(content=path.read_bytes(), media_type="image/png")

    @app.get("/features/{name}")
    def get_features(name: str) -> Response:
        fv = ws.features_for_image(name)
        if fv is None:
            return _error(404, f"no image {name!r}")
        return _json_response(fv)

    @app.get("/agreement")
    def get_agreement(a: str, b: str) -> Response:
        anns_a = [ws.get_annotation(x) for x in ws.list_annotation_ids()]
        corpus_a = [x for x in anns_a if x is not None and x.annotator_id == a]
        corpus_b = [x for x in anns_a if x is not None and x.annotator_id == b]
        if not corpus_a or not corpus_b:
            return _error(404, "annotator corpus empty")
        try:
            report = cohen_kappa(corpus_a, corpus_b, union_node_set(corpus_a + corpus_b))
        except MisalignedCorpora as exc:
            return _error(422, str(exc))
        return _json_response(report.to_dict())

    @app.post("/suggest")
    async def post_suggest(request: Request) -> Response:
        try:
            fv = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            return _error(422, f"malformed feature vector: {exc}")
        if not isinstance(fv, dict):
            return _error(422, "feature vector must be a JSON object")
        suggestions = suggest_labels(ws.schema, fv)
        return _json_response({"suggestions": [s.to_dict() for s in suggestions]})

    return app


def serve(ws: Workspace, bind: str = "127.0.0.1:8423") -> None:
    """Run the API until interrupted. Raises BindError for a bad address."""
    import uvicorn

    from .errors import BindError

    host, _, port = bind.rpartition(":")
    if not host or not port.isdigit():
        raise BindError(f"bind address must be host:port, got {bind!r}")
    try:
        uvicorn.run(create_app(ws), host=host, port=int(port), log_level="warning")
    except (OSError, SystemExit) as exc:
        raise BindError(f"could not bind {bind!r}: {exc}") from exc
