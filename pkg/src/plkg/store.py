"""File-backed annotation workspace.

Layout under the workspace root:

    schema.json          canonical schema for this workspace
    images/              PNG files addressed by bare filename
    annotations/         one JSON file per annotation, filename = id
    features/            cached feature vectors keyed by image content

Writes go to a temp file in the target directory followed by an atomic
rename, so a crash mid-write never corrupts a previously stored file.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
from pathlib import Path

from . import features as feature_engine
from .annotation import (
    Annotation,
    parse_annotation,
    serialize_annotation,
    validate_annotation,
)
from .errors import CorruptIndex, NoSchema, RevisionConflict, ValidationFailed
from .reporting import Finding
from .schema import Schema, load_schema_file

log = logging.getLogger(__name__)

SCHEMA_FILENAME = "schema.json"


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(f".{path.name}.tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


class Workspace:
    """One directory holding a schema, images, annotations and a feature cache.

    Reads are unrestricted; writes are serialized through a single lock,
    which also enforces the revision check-and-bump atomically.
    """

    def __init__(self, root: Path, schema: Schema, quarantined: list[Finding]):
        self.root = root
        self.schema = schema
        self.quarantined = quarantined
        self._lock = threading.Lock()

    # -- paths -------------------------------------------------------------

    @property
    def images_dir(self) -> Path:
        return self.root / "images"

    @property
    def annotations_dir(self) -> Path:
        return self.root / "annotations"

    @property
    def features_dir(self) -> Path:
        return self.root / "features"

    def _annotation_path(self, ann_id: str) -> Path:
        if not ann_id or "/" in ann_id or "\\" in ann_id or ann_id.startswith("."):
            raise CorruptIndex(f"unusable annotation id {ann_id!r}")
        return self.annotations_dir / f"{ann_id}.json"

    # -- annotations -------------------------------------------------------

    def list_annotation_ids(self) -> list[str]:
        return sorted(p.stem for p in self.annotations_dir.glob("*.json"))

    def get_annotation(self, ann_id: str) -> Annotation | None:
        path = self._annotation_path(ann_id)
        if not path.exists():
            return None
        return parse_annotation(path.read_bytes())

    def put_annotation(self, ann: Annotation, expected_revision: int | None = None) -> str:
        """Validate, bump the revision past the stored copy, write atomically.

        With ``expected_revision`` given, the write is refused unless the
        stored revision still matches (optimistic concurrency).
        """
        report = validate_annotation(self.schema, ann)
        if report.has_errors():
            raise ValidationFailed(report)
        with self._lock:
            current = self.get_annotation(ann.id)
            if current is not None:
                if expected_revision is not None and current.revision != expected_revision:
                    raise RevisionConflict(
                        f"annotation {ann.id!r} is at revision {current.revision}, "
                        f"expected {expected_revision}"
                    )
                next_revision = current.revision + 1
            else:
                if expected_revision not in (None, 0):
                    raise RevisionConflict(
                        f"annotation {ann.id!r} does not exist yet, expected revision "
                        f"{expected_revision}"
                    )
                next_revision = 0
            from dataclasses import replace

            stored = replace(ann, revision=next_revision)
            _atomic_write(self._annotation_path(ann.id), serialize_annotation(stored))
        return ann.id

    # -- images and features -----------------------------------------------

    def list_images(self) -> list[str]:
        return sorted(p.name for p in self.images_dir.glob("*.png"))

    def image_path(self, name: str) -> Path | None:
        if "/" in name or "\\" in name or name.startswith("."):
            return None
        path = self.images_dir / name
        return path if path.exists() else None

    def features_for_image(self, name: str) -> dict | None:
        """Feature vector for a stored image, cached by content hash.

        The cache key covers the image bytes and the extractor constants
        version, so stale entries are never served after a retune.
        """
        path = self.image_path(name)
        if path is None:
            return None
        data = path.read_bytes()
        digest = hashlib.sha256(data).hexdigest()
        cache_path = self.features_dir / f"{digest}-v{feature_engine.CONSTANTS_VERSION}.json"
        if cache_path.exists():
            return json.loads(cache_path.read_text(encoding="utf-8"))

        from io import BytesIO

        import numpy as np
        from PIL import Image

        with Image.open(BytesIO(data)) as im:
            raster = np.asarray(im.convert("RGB"), dtype=np.float64)
        fv = feature_engine.extract_all(raster)
        with self._lock:
            self.features_dir.mkdir(exist_ok=True)
            _atomic_write(
                cache_path,
                json.dumps(fv, ensure_ascii=False, sort_keys=True).encode("utf-8"),
            )
        return fv


def open_workspace(path) -> Workspace:
    """Open an existing workspace directory, quarantining unreadable files.

    A malformed annotation file is renamed aside (``<name>.quarantined``)
    and reported as a warning finding rather than failing the whole open.
    """
    root = Path(path)
    if not root.is_dir():
        raise NoSchema(f"workspace directory {str(root)!r} does not exist")
    schema_path = root / SCHEMA_FILENAME
    if not schema_path.exists():
        raise NoSchema(f"workspace has no {SCHEMA_FILENAME}")
    schema = load_schema_file(schema_path)

    for sub in ("images", "annotations", "features"):
        (root / sub).mkdir(exist_ok=True)

    quarantined: list[Finding] = []
    for ann_path in sorted((root / "annotations").glob("*.json")):
        try:
            ann = parse_annotation(ann_path.read_bytes())
            if ann.id != ann_path.stem:
                raise CorruptIndex(
                    f"file {ann_path.name} holds annotation id {ann.id!r}"
                )
        except Exception as exc:
            target = ann_path.with_suffix(".json.quarantined")
            os.replace(ann_path, target)
            finding = Finding(
                "warning", "QUARANTINED", ann_path.name, f"unreadable annotation: {exc}"
            )
            quarantined.append(finding)
            log.warning("quarantined %s: %s", ann_path.name, exc)

    return Workspace(root=root, schema=schema, quarantined=quarantined)


def init_workspace(path, schema_document: bytes) -> Workspace:
    """Create the directory layout and seed the schema file, then open it."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    _atomic_write(root / SCHEMA_FILENAME, schema_document)
    return open_workspace(root)
