import json
from importlib import resources

import pytest

import plkg


@pytest.fixture(scope="session")
def schema():
    return plkg.load_bundled_schema()


@pytest.fixture(scope="session")
def schema_document() -> bytes:
    return resources.files("plkg.data").joinpath("plkg-schema.json").read_bytes()


@pytest.fixture(scope="session")
def examples():
    return plkg.load_bundled_examples()


@pytest.fixture(scope="session")
def last_supper(examples):
    return next(a for a in examples if a.id == "last-supper-demo")


@pytest.fixture(scope="session")
def travelers(examples):
    return next(a for a in examples if a.id == "travelers-demo")


@pytest.fixture()
def workspace(tmp_path, schema_document, examples):
    ws = plkg.init_workspace(tmp_path / "ws", schema_document)
    for ann in examples:
        ws.put_annotation(ann)
    return ws


def make_annotation(schema, node_ids, ann_id="t-1", image_ref="img.png", **kwargs):
    """Quick annotation with one assignment per node id and no regions."""
    return plkg.Annotation(
        id=ann_id,
        image_ref=image_ref,
        annotator_id=kwargs.pop("annotator_id", "tester"),
        created_at="2026-01-01T00:00:00Z",
        schema_version=schema.version,
        assignments=tuple(plkg.LabelAssignment(node_id=n) for n in node_ids),
        **kwargs,
    )


def dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)
