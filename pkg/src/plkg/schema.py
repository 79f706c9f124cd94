"""Typed hierarchical schema: loading, structural validation and queries.

The schema file is UTF-8 JSON with a top-level ``{version, nodes, rules}``
object. A loaded :class:`Schema` is immutable; build a new one to mutate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Iterable

from .errors import ParseError, StructureError, UnknownNode
from .reporting import Finding, ValidationReport

MAX_LEVEL = 6
DIMENSION_COUNT = 7

NODE_KINDS = ("dimension", "category", "label")
CULTURAL_ORIGINS = ("western", "chinese", "fused", "universal")
CHILD_SELECTIONS = ("exclusive", "multiple")
COMPARATORS = ("ge", "le", "in_range")

# Keys a MeasurableCriterion may reference, with the value range each key
# is allowed to occupy.
FEATURE_KEY_RANGES: dict[str, tuple[float, float]] = {
    "mean_luminance": (0.0, 1.0),
    "luminance_std": (0.0, 1.0),
    "tonal_key_class": (0.0, 2.0),
    "symmetry_h": (0.0, 1.0),
    "symmetry_v": (0.0, 1.0),
    "negative_space_ratio": (0.0, 1.0),
    "fill_ratio": (0.0, 1.0),
    "mean_saturation": (0.0, 1.0),
    "warm_cold_gradient": (-1.0, 1.0),
    "hard_edge_fraction": (0.0, 1.0),
    "s_curve_coverage": (0.0, 1.0),
    "vanishing_convergence": (0.0, 10.0),
    "golden_point_min_distance": (0.0, 1.0),
}


@dataclass(frozen=True)
class MeasurableCriterion:
    feature_key: str
    comparator: str
    threshold: float | tuple[float, float]
    note: str = ""

    def is_satisfied(self, value: float) -> bool:
        if self.comparator == "ge":
            return value >= self.threshold
        if self.comparator == "le":
            return value <= self.threshold
        lo, hi = self.threshold
        return lo <= value <= hi

    def to_dict(self) -> dict:
        threshold = list(self.threshold) if isinstance(self.threshold, tuple) else self.threshold
        return {
            "feature_key": self.feature_key,
            "comparator": self.comparator,
            "threshold": threshold,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "MeasurableCriterion":
        threshold = raw["threshold"]
        if isinstance(threshold, list):
            threshold = tuple(float(t) for t in threshold)
        else:
            threshold = float(threshold)
        return cls(
            feature_key=raw["feature_key"],
            comparator=raw["comparator"],
            threshold=threshold,
            note=raw.get("note", ""),
        )


@dataclass(frozen=True)
class SchemaNode:
    id: str
    name_zh: str
    name_en: str
    level: int
    kind: str
    parent_id: str | None = None
    definition: str = ""
    scenarios: tuple[str, ...] = ()
    criteria: tuple[MeasurableCriterion, ...] = ()
    cultural_origin: str = "universal"
    child_selection: str = "multiple"

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "name_zh": self.name_zh,
            "name_en": self.name_en,
            "level": self.level,
            "kind": self.kind,
            "definition": self.definition,
            "scenarios": list(self.scenarios),
            "criteria": [c.to_dict() for c in self.criteria],
            "cultural_origin": self.cultural_origin,
            "child_selection": self.child_selection,
        }
        if self.parent_id is not None:
            out["parent_id"] = self.parent_id
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "SchemaNode":
        return cls(
            id=raw["id"],
            name_zh=raw["name_zh"],
            name_en=raw["name_en"],
            level=int(raw["level"]),
            kind=raw["kind"],
            parent_id=raw.get("parent_id"),
            definition=raw.get("definition", ""),
            scenarios=tuple(raw.get("scenarios", [])),
            criteria=tuple(MeasurableCriterion.from_dict(c) for c in raw.get("criteria", [])),
            cultural_origin=raw.get("cultural_origin", "universal"),
            child_selection=raw.get("child_selection", "multiple"),
        )


@dataclass(frozen=True)
class ConsistencyRule:
    """Declarative constraint between schema nodes.

    ``suppressed_by`` lists node ids whose presence in an annotation disables
    the rule (used for the fused-tradition labels, where a work may
    legitimately carry traits from both sides of an exclusion).
    """

    id: str
    kind: str  # mutually_exclusive | implies | requires_any
    nodes: tuple[str, ...]
    severity: str = "error"
    provenance: str = ""
    suppressed_by: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "kind": self.kind,
            "nodes": list(self.nodes),
            "severity": self.severity,
            "provenance": self.provenance,
        }
        if self.suppressed_by:
            out["suppressed_by"] = list(self.suppressed_by)
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "ConsistencyRule":
        return cls(
            id=raw["id"],
            kind=raw["kind"],
            nodes=tuple(raw["nodes"]),
            severity=raw.get("severity", "error"),
            provenance=raw.get("provenance", ""),
            suppressed_by=tuple(raw.get("suppressed_by", [])),
        )


@dataclass(frozen=True)
class Schema:
    version: str
    nodes: dict[str, SchemaNode] = field(default_factory=dict)
    rules: tuple[ConsistencyRule, ...] = ()

    def __post_init__(self):
        children: dict[str, list[str]] = {}
        for node in self.nodes.values():
            if node.parent_id is not None:
                children.setdefault(node.parent_id, []).append(node.id)
        object.__setattr__(self, "_children", children)

    def node(self, node_id: str) -> SchemaNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None

    def children_of(self, node_id: str) -> list[SchemaNode]:
        if node_id not in self.nodes:
            raise UnknownNode(node_id)
        return [self.nodes[cid] for cid in self._children.get(node_id, [])]

    def dimensions(self) -> list[SchemaNode]:
        return [n for n in self.nodes.values() if n.level == 1]

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "nodes": [n.to_dict() for n in self.nodes.values()],
            "rules": [r.to_dict() for r in self.rules],
        }


def serialize_schema(schema: Schema) -> bytes:
    return json.dumps(schema.to_dict(), ensure_ascii=False, indent=2).encode("utf-8")


def parse_schema(document: bytes | str) -> Schema:
    """Parse a schema document without enforcing structural invariants."""
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        raw = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"schema document is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict) or "version" not in raw or "nodes" not in raw:
        raise ParseError("schema document must be an object with 'version' and 'nodes'")
    nodes: dict[str, SchemaNode] = {}
    duplicate_guard: list[SchemaNode] = []
    try:
        for entry in raw["nodes"]:
            node = SchemaNode.from_dict(entry)
            duplicate_guard.append(node)
            nodes.setdefault(node.id, node)
        rules = tuple(ConsistencyRule.from_dict(r) for r in raw.get("rules", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed schema entry: {exc}") from exc
    schema = Schema(version=str(raw["version"]), nodes=nodes, rules=rules)
    # Duplicate ids would silently collapse in the dict; remember them so
    # validate_schema can report DUPLICATE_ID.
    object.__setattr__(schema, "_raw_nodes", duplicate_guard)
    return schema


def load_schema(document: bytes | str) -> Schema:
    """Parse and structurally validate a schema document.

    Raises ParseError for malformed documents and StructureError (carrying
    the first finding's code and subject) when any invariant is violated.
    """
    schema = parse_schema(document)
    report = validate_schema(schema)
    if report.findings:
        first = report.findings[0]
        raise StructureError(first.code, first.message, first.subject)
    return schema


def load_schema_file(path) -> Schema:
    with open(path, "rb") as fh:
        return load_schema(fh.read())


def load_bundled_schema() -> Schema:
    """Load the canonical schema file shipped with the package."""
    data = resources.files("plkg.data").joinpath("plkg-schema.json").read_bytes()
    return load_schema(data)


def validate_schema(schema: Schema) -> ValidationReport:
    """Check every structural invariant; findings are data, never raised."""
    findings: list[Finding] = []

    def err(code: str, subject: str, message: str) -> None:
        findings.append(Finding("error", code, subject, message))

    raw_nodes: list[SchemaNode] = getattr(schema, "_raw_nodes", list(schema.nodes.values()))
    seen: set[str] = set()
    for node in raw_nodes:
        if node.id in seen:
            err("DUPLICATE_ID", node.id, "node id appears more than once")
        seen.add(node.id)

    dims = schema.dimensions()
    if not dims:
        err("MISSING_DIMENSIONS", "", "schema has no level-1 dimension nodes")
    elif len(dims) != DIMENSION_COUNT:
        err(
            "DIMENSION_COUNT",
            "",
            f"schema has {len(dims)} level-1 dimensions, expected {DIMENSION_COUNT}",
        )

    for node in schema.nodes.values():
        if node.kind not in NODE_KINDS:
            err("BAD_KIND", node.id, f"unknown kind {node.kind!r}")
        if node.cultural_origin not in CULTURAL_ORIGINS:
            err("BAD_ORIGIN", node.id, f"unknown cultural_origin {node.cultural_origin!r}")
        if node.child_selection not in CHILD_SELECTIONS:
            err("BAD_SELECTION", node.id, f"unknown child_selection {node.child_selection!r}")
        if not 1 <= node.level <= MAX_LEVEL:
            err("BAD_LEVEL", node.id, f"level {node.level} outside 1..{MAX_LEVEL}")
        if (node.level == 1) != (node.parent_id is None):
            err("ORPHAN_LEVEL", node.id, "parent_id must be absent iff level == 1")
        if (node.kind == "dimension") != (node.level == 1):
            err("KIND_LEVEL_MISMATCH", node.id, "kind 'dimension' iff level == 1")
        if node.parent_id is not None:
            parent = schema.nodes.get(node.parent_id)
            if parent is None:
                err("UNKNOWN_PARENT", node.id, f"parent {node.parent_id!r} does not exist")
            elif node.level != parent.level + 1:
                err(
                    "LEVEL_GAP",
                    node.id,
                    f"level {node.level} under level-{parent.level} parent",
                )
        for crit in node.criteria:
            findings.extend(_check_criterion(node.id, crit))
        if node.child_selection == "exclusive" and len(schema.children_of(node.id)) < 2:
            err("EXCLUSIVE_UNDERPOPULATED", node.id, "exclusive group needs at least 2 children")

    findings.extend(_check_forest(schema))
    findings.extend(check_ruleset(schema, schema.rules).findings)
    return ValidationReport.from_findings(findings)


def _check_criterion(node_id: str, crit: MeasurableCriterion) -> list[Finding]:
    findings = []
    if crit.feature_key not in FEATURE_KEY_RANGES:
        findings.append(
            Finding("error", "UNKNOWN_FEATURE_KEY", node_id, f"no extractor for {crit.feature_key!r}")
        )
        return findings
    lo, hi = FEATURE_KEY_RANGES[crit.feature_key]
    if crit.comparator not in COMPARATORS:
        findings.append(
            Finding("error", "BAD_COMPARATOR", node_id, f"unknown comparator {crit.comparator!r}")
        )
        return findings
    if crit.comparator == "in_range":
        if not isinstance(crit.threshold, tuple) or len(crit.threshold) != 2:
            findings.append(Finding("error", "BAD_THRESHOLD", node_id, "in_range needs [lo, hi]"))
            return findings
        tlo, thi = crit.threshold
        if tlo > thi:
            findings.append(Finding("error", "BAD_THRESHOLD", node_id, "in_range has lo > hi"))
        bounds = (tlo, thi)
    else:
        if not isinstance(crit.threshold, (int, float)):
            findings.append(Finding("error", "BAD_THRESHOLD", node_id, "threshold must be scalar"))
            return findings
        bounds = (crit.threshold, crit.threshold)
    if bounds[0] < lo or bounds[1] > hi:
        findings.append(
            Finding(
                "error",
                "THRESHOLD_RANGE",
                node_id,
                f"threshold outside [{lo}, {hi}] for {crit.feature_key}",
            )
        )
    return findings


def _check_forest(schema: Schema) -> list[Finding]:
    findings = []
    for node in schema.nodes.values():
        seen = {node.id}
        cur = node
        while cur.parent_id is not None:
            if cur.parent_id in seen or cur.parent_id not in schema.nodes:
                if cur.parent_id in seen:
                    findings.append(
                        Finding("error", "CYCLE", node.id, "ancestry contains a cycle")
                    )
                break
            seen.add(cur.parent_id)
            cur = schema.nodes[cur.parent_id]
    return findings


def check_ruleset(schema: Schema, ruleset: Iterable[ConsistencyRule]) -> ValidationReport:
    """Detect dangling node references and implication cycles in a ruleset."""
    findings: list[Finding] = []
    implies_edges: dict[str, set[str]] = {}
    for rule in ruleset:
        for node_id in tuple(rule.nodes) + tuple(rule.suppressed_by):
            if node_id not in schema.nodes:
                findings.append(
                    Finding("error", "DANGLING", rule.id, f"rule references unknown node {node_id!r}")
                )
        if rule.kind == "implies" and len(rule.nodes) == 2:
            implies_edges.setdefault(rule.nodes[0], set()).add(rule.nodes[1])

    # Cycle detection over the implication graph.
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n: WHITE for n in implies_edges}

    def visit(n: str) -> bool:
        color[n] = GRAY
        for m in implies_edges.get(n, ()):
            state = color.get(m, WHITE)
            if state == GRAY:
                return True
            if state == WHITE and visit(m):
                return True
        color[n] = BLACK
        return False

    for n in list(implies_edges):
        if color.get(n, WHITE) == WHITE and visit(n):
            findings.append(
                Finding("error", "CYCLE", n, "implication rules form a cycle")
            )
    return ValidationReport.from_findings(findings)


def descendants(schema: Schema, node_id: str) -> list[SchemaNode]:
    """Pre-order traversal of the subtree below node_id, node itself excluded."""
    schema.node(node_id)
    out: list[SchemaNode] = []

    def walk(nid: str) -> None:
        for child in schema.children_of(nid):
            out.append(child)
            walk(child.id)

    walk(node_id)
    return out


def path_to_root(schema: Schema, node_id: str) -> list[SchemaNode]:
    """[node, parent, ..., dimension]; last element is always level 1."""
    node = schema.node(node_id)
    path = [node]
    while node.parent_id is not None:
        node = schema.node(node.parent_id)
        path.append(node)
    return path


def find_nodes(schema: Schema, predicate: Callable[[SchemaNode], bool]) -> list[SchemaNode]:
    """All and only matching nodes, in stable id order."""
    return sorted((n for n in schema.nodes.values() if predicate(n)), key=lambda n: n.id)


@dataclass(frozen=True)
class SchemaDiff:
    added: tuple[str, ...]
    removed: tuple[str, ...]
    modified: dict[str, tuple[str, ...]]  # node id -> changed field names

    def is_empty(self) -> bool:
        return not (self.added or self.removed or self.modified)


_DIFF_FIELDS = (
    "name_zh",
    "name_en",
    "level",
    "kind",
    "parent_id",
    "definition",
    "scenarios",
    "criteria",
    "cultural_origin",
    "child_selection",
)


def diff_schemas(old: Schema, new: Schema) -> SchemaDiff:
    old_ids = set(old.nodes)
    new_ids = set(new.nodes)
    added = tuple(sorted(new_ids - old_ids))
    removed = tuple(sorted(old_ids - new_ids))
    modified: dict[str, tuple[str, ...]] = {}
    for nid in sorted(old_ids & new_ids):
        a, b = old.nodes[nid], new.nodes[nid]
        changed = tuple(f for f in _DIFF_FIELDS if getattr(a, f) != getattr(b, f))
        if changed:
            modified[nid] = changed
    return SchemaDiff(added=added, removed=removed, modified=modified)
