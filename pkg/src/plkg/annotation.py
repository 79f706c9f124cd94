"""Annotation records and their validation against a schema.

An annotation is one annotator's labeling of one image: regions, label
assignments, spatial propositions and an ordered narrative. All operations
here are pure value transformations.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field, replace

from .errors import (
    InvalidAnnotation,
    MixedImages,
    MixedSchemaVersions,
    ParseError,
    SchemaMismatch,
)
from .reporting import Finding, ValidationReport
from .schema import Schema, path_to_root

SPATIAL_RELATIONS = (
    "above",
    "below",
    "left_of",
    "right_of",
    "inside",
    "contains",
    "in_front_of",
    "behind",
    "near",
    "far",
)


@dataclass(frozen=True)
class Region:
    id: str
    shape: dict  # {"type": "bbox", x, y, w, h} or {"type": "polygon", "points": [[x, y], ...]}

    def invariant_findings(self) -> list[Finding]:
        findings = []
        kind = self.shape.get("type")
        if kind == "bbox":
            x, y, w, h = (self.shape.get(k) for k in ("x", "y", "w", "h"))
            if None in (x, y, w, h) or w <= 0 or h <= 0:
                findings.append(Finding("error", "INVALID_REGION", self.id, "bbox needs w, h > 0"))
            else:
                coords = [x, y, x + w, y + h]
                if any(c < 0 or c > 1 for c in coords):
                    findings.append(
                        Finding("error", "INVALID_REGION", self.id, "bbox outside unit square")
                    )
        elif kind == "polygon":
            points = self.shape.get("points", [])
            if len(points) < 3:
                findings.append(
                    Finding("error", "INVALID_REGION", self.id, "polygon needs >= 3 points")
                )
            elif any(c < 0 or c > 1 for p in points for c in p):
                findings.append(
                    Finding("error", "INVALID_REGION", self.id, "polygon outside unit square")
                )
        else:
            findings.append(
                Finding("error", "INVALID_REGION", self.id, f"unknown shape type {kind!r}")
            )
        return findings

    def to_dict(self) -> dict:
        return {"id": self.id, "shape": self.shape}

    @classmethod
    def from_dict(cls, raw: dict) -> "Region":
        return cls(id=raw["id"], shape=raw["shape"])


@dataclass(frozen=True)
class LabelAssignment:
    node_id: str
    region_id: str | None = None
    confidence: float = 1.0
    id: str | None = None  # referenceable from spatial propositions

    def to_dict(self) -> dict:
        out = {"node_id": self.node_id, "confidence": self.confidence}
        if self.region_id is not None:
            out["region_id"] = self.region_id
        if self.id is not None:
            out["id"] = self.id
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "LabelAssignment":
        return cls(
            node_id=raw["node_id"],
            region_id=raw.get("region_id"),
            confidence=float(raw.get("confidence", 1.0)),
            id=raw.get("id"),
        )


@dataclass(frozen=True)
class SpatialRelation:
    subject: str  # assignment or region id
    relation: str
    object: str

    def to_dict(self) -> dict:
        return {"subject": self.subject, "relation": self.relation, "object": self.object}

    @classmethod
    def from_dict(cls, raw: dict) -> "SpatialRelation":
        return cls(subject=raw["subject"], relation=raw["relation"], object=raw["object"])


@dataclass(frozen=True)
class NarrativeSegment:
    order: int
    region_id: str
    assignment_ids: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "region_id": self.region_id,
            "assignment_ids": list(self.assignment_ids),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "NarrativeSegment":
        return cls(
            order=int(raw["order"]),
            region_id=raw["region_id"],
            assignment_ids=tuple(raw["assignment_ids"]),
        )


@dataclass(frozen=True)
class Annotation:
    id: str
    image_ref: str
    annotator_id: str
    created_at: str
    schema_version: str
    regions: tuple[Region, ...] = ()
    assignments: tuple[LabelAssignment, ...] = ()
    propositions: tuple[SpatialRelation, ...] = ()
    narrative: tuple[NarrativeSegment, ...] = ()
    notes: str = ""
    revision: int = 0

    def assigned_node_ids(self) -> set[str]:
        return {a.node_id for a in self.assignments}

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "image_ref": self.image_ref,
            "annotator_id": self.annotator_id,
            "created_at": self.created_at,
            "schema_version": self.schema_version,
            "regions": [r.to_dict() for r in self.regions],
            "assignments": [a.to_dict() for a in self.assignments],
            "propositions": [p.to_dict() for p in self.propositions],
            "narrative": [s.to_dict() for s in self.narrative],
            "notes": self.notes,
            "revision": self.revision,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "Annotation":
        return cls(
            id=raw["id"],
            image_ref=raw["image_ref"],
            annotator_id=raw["annotator_id"],
            created_at=raw["created_at"],
            schema_version=raw["schema_version"],
            regions=tuple(Region.from_dict(r) for r in raw.get("regions", [])),
            assignments=tuple(LabelAssignment.from_dict(a) for a in raw.get("assignments", [])),
            propositions=tuple(SpatialRelation.from_dict(p) for p in raw.get("propositions", [])),
            narrative=tuple(NarrativeSegment.from_dict(s) for s in raw.get("narrative", [])),
            notes=raw.get("notes", ""),
            revision=int(raw.get("revision", 0)),
        )


def serialize_annotation(ann: Annotation) -> bytes:
    return json.dumps(ann.to_dict(), ensure_ascii=False, indent=2).encode("utf-8")


def parse_annotation(document: bytes | str) -> Annotation:
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        raw = json.loads(document)
        return Annotation.from_dict(raw)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed annotation document: {exc}") from exc


def load_bundled_examples() -> list[Annotation]:
    """The exemplar annotations shipped with the package, sorted by id."""
    from importlib import resources

    root = resources.files("plkg.data").joinpath("examples")
    anns = [parse_annotation(p.read_bytes()) for p in root.iterdir() if p.name.endswith(".json")]
    return sorted(anns, key=lambda a: a.id)


def validate_annotation(schema: Schema, ann: Annotation) -> ValidationReport:
    """Full structural + rule validation; an empty report means accepted."""
    # Imported here to avoid a module cycle (rules needs Annotation).
    from .rules import evaluate_rules, exclusive_conflicts

    if ann.schema_version != schema.version:
        raise SchemaMismatch(
            f"annotation targets schema {ann.schema_version!r}, have {schema.version!r}"
        )

    findings: list[Finding] = []
    region_ids = {r.id for r in ann.regions}
    assignment_ids = {a.id for a in ann.assignments if a.id is not None}

    for region in ann.regions:
        findings.extend(region.invariant_findings())

    for a in ann.assignments:
        if a.node_id not in schema.nodes:
            findings.append(
                Finding("error", "UNKNOWN_NODE", a.node_id, "assignment references unknown node")
            )
        if a.region_id is not None and a.region_id not in region_ids:
            findings.append(
                Finding("error", "DANGLING_REF", a.node_id, f"region {a.region_id!r} not found")
            )
        if not 0.0 <= a.confidence <= 1.0:
            findings.append(
                Finding("error", "INVALID_CONFIDENCE", a.node_id, "confidence outside [0, 1]")
            )

    referenceable = region_ids | assignment_ids
    for p in ann.propositions:
        subject = f"{p.subject}->{p.object}"
        if p.relation not in SPATIAL_RELATIONS:
            findings.append(
                Finding("error", "UNKNOWN_RELATION", subject, f"unknown relation {p.relation!r}")
            )
        if p.subject == p.object:
            findings.append(
                Finding("error", "SELF_RELATION", subject, "subject equals object")
            )
        for end in (p.subject, p.object):
            if end not in referenceable:
                findings.append(
                    Finding("error", "DANGLING_REF", subject, f"{end!r} is not a region or assignment id")
                )

    orders = sorted(s.order for s in ann.narrative)
    if orders and orders != list(range(len(orders))):
        findings.append(
            Finding("error", "NARRATIVE_GAP", ann.id, "segment orders not contiguous from 0")
        )
    for seg in ann.narrative:
        if seg.region_id not in region_ids:
            findings.append(
                Finding("error", "DANGLING_REF", f"segment:{seg.order}", f"region {seg.region_id!r} not found")
            )
        if not seg.assignment_ids:
            findings.append(
                Finding("error", "EMPTY_SEGMENT", f"segment:{seg.order}", "segment has no assignments")
            )
        for aid in seg.assignment_ids:
            if aid not in assignment_ids:
                findings.append(
                    Finding("error", "DANGLING_REF", f"segment:{seg.order}", f"assignment {aid!r} not found")
                )

    conflict_pairs = exclusive_conflicts(schema, ann)
    for parent_id, first, second in conflict_pairs:
        findings.append(
            Finding(
                "error",
                "EXCLUSIVE_CONFLICT",
                f"{first}|{second}",
                f"both chosen under exclusive group {parent_id!r}",
            )
        )

    rule_report = evaluate_rules(
        schema, schema.rules, ann, skip_pairs={(a, b) for _, a, b in conflict_pairs}
    )
    return ValidationReport.from_findings(findings).merged_with(rule_report)


def normalize_annotation(schema: Schema, ann: Annotation) -> Annotation:
    """Add every ancestor of each assigned node, up to its dimension.

    Added ancestors inherit the region when all contributing children agree
    on one, and take the maximum confidence of their contributors.
    Idempotent and monotone: assignments are never removed.
    """
    report = validate_annotation(schema, ann)
    if report.has_errors():
        raise InvalidAnnotation(report)

    by_node: dict[str, LabelAssignment] = {}
    order: list[str] = []
    for a in ann.assignments:
        if a.node_id not in by_node:
            by_node[a.node_id] = a
            order.append(a.node_id)

    # contributions: ancestor id -> (confidences, region ids) from descendants
    contributions: dict[str, tuple[list[float], set[str | None]]] = {}
    for a in ann.assignments:
        for ancestor in path_to_root(schema, a.node_id)[1:]:
            confs, regions = contributions.setdefault(ancestor.id, ([], set()))
            confs.append(a.confidence)
            regions.add(a.region_id)

    for nid, (confs, regions) in contributions.items():
        inherited_region = regions.pop() if len(regions) == 1 else None
        if nid in by_node:
            existing = by_node[nid]
            new_conf = max([existing.confidence] + confs)
            if new_conf != existing.confidence:
                by_node[nid] = replace(existing, confidence=new_conf)
        else:
            by_node[nid] = LabelAssignment(
                node_id=nid, region_id=inherited_region, confidence=max(confs)
            )
            order.append(nid)

    return replace(ann, assignments=tuple(by_node[nid] for nid in order))


def _maximal_assignments(schema: Schema, ann: Annotation) -> list[LabelAssignment]:
    """Assignments with no assigned strict descendant: the annotator's most
    specific choices."""
    assigned = ann.assigned_node_ids()
    ancestors_of_assigned: set[str] = set()
    for nid in assigned:
        if nid in schema.nodes:
            for anc in path_to_root(schema, nid)[1:]:
                ancestors_of_assigned.add(anc.id)
    seen: set[str] = set()
    out = []
    for a in ann.assignments:
        if a.node_id in ancestors_of_assigned or a.node_id in seen:
            continue
        seen.add(a.node_id)
        out.append(a)
    return out


def _caption(schema: Schema, ann: Annotation, leaves: list[LabelAssignment]) -> str:
    names = sorted(schema.nodes[a.node_id].name_en.lower() for a in leaves)
    label_part = ", ".join(names)
    assignment_nodes = {a.id: a.node_id for a in ann.assignments if a.id is not None}

    def endpoint(ref: str) -> str:
        if ref in assignment_nodes:
            return schema.nodes[assignment_nodes[ref]].name_en.lower()
        return ref

    relations = [
        f"{endpoint(p.subject)} {p.relation.replace('_', ' ')} {endpoint(p.object)}"
        for p in ann.propositions
    ]
    caption = f"painting with {label_part}"
    if relations:
        caption += ", " + ", ".join(relations)
    return caption


def to_training_records(schema: Schema, anns: list[Annotation]) -> list[dict]:
    """One flat record per annotation, for JSONL export. Deterministic."""
    records = []
    for ann in anns:
        report = validate_annotation(schema, ann)
        if report.has_errors():
            raise InvalidAnnotation(report, f"annotation {ann.id!r} has validation errors")
        leaves = _maximal_assignments(schema, ann)
        records.append(
            {
                "image_ref": ann.image_ref,
                "labels": sorted(a.node_id for a in leaves),
                "caption": _caption(schema, ann, leaves),
            }
        )
    return records


def records_to_jsonl(records: list[dict]) -> str:
    return "".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in records)


def merge_annotations(schema: Schema, anns: list[Annotation]) -> Annotation:
    """Strict-majority consensus across annotators of one image.

    An assignment (by node id) or proposition survives iff chosen by more
    than half of the annotators; consensus confidence is the mean over its
    supporters. Regions survive by id majority, geometry from the first
    contributor. The narrative is kept only when identical in every input.
    """
    if not anns:
        raise MixedImages("nothing to merge")
    image_refs = {a.image_ref for a in anns}
    if len(image_refs) > 1:
        raise MixedImages(f"annotations reference multiple images: {sorted(image_refs)}")
    versions = {a.schema_version for a in anns}
    if len(versions) > 1:
        raise MixedSchemaVersions(f"multiple schema versions: {sorted(versions)}")

    n = len(anns)
    node_votes: Counter[str] = Counter()
    confidences: dict[str, list[float]] = {}
    regions_for: dict[str, set[str | None]] = {}
    for ann in anns:
        for nid in sorted({a.node_id for a in ann.assignments}):
            node_votes[nid] += 1
        for a in ann.assignments:
            confidences.setdefault(a.node_id, []).append(a.confidence)
            regions_for.setdefault(a.node_id, set()).add(a.region_id)

    kept_nodes = sorted(nid for nid, votes in node_votes.items() if votes * 2 > n)

    region_votes: Counter[str] = Counter()
    region_geometry: dict[str, Region] = {}
    for ann in anns:
        for r in ann.regions:
            region_votes[r.id] += 1
            region_geometry.setdefault(r.id, r)
    kept_regions = sorted(rid for rid, votes in region_votes.items() if votes * 2 > n)

    prop_votes: Counter[tuple[str, str, str]] = Counter()
    for ann in anns:
        for p in sorted(set((p.subject, p.relation, p.object) for p in ann.propositions)):
            prop_votes[p] += 1
    kept_props = sorted(p for p, votes in prop_votes.items() if votes * 2 > n)

    narratives = {
        json.dumps([s.to_dict() for s in ann.narrative], sort_keys=True) for ann in anns
    }
    narrative = anns[0].narrative if len(narratives) == 1 else ()

    assignments = []
    for nid in kept_nodes:
        regions = regions_for.get(nid, set())
        region = None
        if len(regions) == 1:
            candidate = next(iter(regions))
            if candidate is None or candidate in kept_regions:
                region = candidate
        assignments.append(
            LabelAssignment(
                node_id=nid,
                region_id=region,
                confidence=sum(confidences[nid]) / len(confidences[nid]),
            )
        )

    base = anns[0]
    return Annotation(
        id=f"consensus-{base.image_ref.rsplit('/', 1)[-1].rsplit('.', 1)[0]}",
        image_ref=base.image_ref,
        annotator_id="consensus",
        created_at=max(a.created_at for a in anns),
        schema_version=base.schema_version,
        regions=tuple(region_geometry[rid] for rid in kept_regions),
        assignments=tuple(assignments),
        propositions=tuple(SpatialRelation(*p) for p in kept_props),
        narrative=narrative,
        notes=f"consensus of {n} annotations",
    )
