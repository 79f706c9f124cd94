"""Consistency-rule evaluation against annotations.

Rules live inside the schema file under ``rules``. Three kinds are
supported: ``mutually_exclusive`` (no two of the listed peers together),
``implies`` (antecedent demands consequent) and ``requires_any``
(antecedent demands at least one of the listed options).
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, TYPE_CHECKING

from .errors import UnknownRuleNode
from .reporting import Finding, ValidationReport
from .schema import ConsistencyRule, Schema, path_to_root

if TYPE_CHECKING:
    from .annotation import Annotation


def exclusive_conflicts(schema: Schema, ann: "Annotation") -> list[tuple[str, str, str]]:
    """Sibling pairs chosen together under an exclusive parent.

    Returns (parent_id, first, second) triples, pair ids sorted. A pair is
    skipped when a mutually-exclusive rule covering it is suppressed by a
    fused-tradition label present in the annotation.
    """
    assigned = {a.node_id for a in ann.assignments if a.node_id in schema.nodes}
    conflicts = []
    for parent_id in sorted({schema.nodes[nid].parent_id for nid in assigned if schema.nodes[nid].parent_id}):
        parent = schema.nodes.get(parent_id)
        if parent is None or parent.child_selection != "exclusive":
            continue
        chosen = sorted(c.id for c in schema.children_of(parent_id) if c.id in assigned)
        for first, second in combinations(chosen, 2):
            if _pair_suppressed(schema.rules, assigned, first, second):
                continue
            conflicts.append((parent_id, first, second))
    return conflicts


def _pair_suppressed(
    ruleset: Iterable[ConsistencyRule], assigned: set[str], first: str, second: str
) -> bool:
    for rule in ruleset:
        if rule.kind != "mutually_exclusive" or not rule.suppressed_by:
            continue
        if first in rule.nodes and second in rule.nodes:
            if assigned & set(rule.suppressed_by):
                return True
    return False


def evaluate_rules(
    schema: Schema,
    ruleset: Iterable[ConsistencyRule],
    ann: "Annotation",
    skip_pairs: set[tuple[str, str]] | None = None,
) -> ValidationReport:
    """One finding per violated rule per offending node pair, deterministic.

    ``skip_pairs`` suppresses mutual-exclusion findings already reported as
    EXCLUSIVE_CONFLICT by the schema-level sibling check, so one conflict
    never produces two findings in a merged report.
    """
    skip_pairs = skip_pairs or set()
    assigned = {a.node_id for a in ann.assignments}
    # Implication checks are ancestor-aware: assigning a node implicitly
    # asserts every ancestor, so normalized and leaf-only annotations get
    # identical verdicts.
    implied = set(assigned)
    for nid in assigned:
        if nid in schema.nodes:
            implied.update(n.id for n in path_to_root(schema, nid))
    findings: list[Finding] = []
    for rule in ruleset:
        for nid in tuple(rule.nodes) + tuple(rule.suppressed_by):
            if nid not in schema.nodes:
                raise UnknownRuleNode(f"rule {rule.id!r} references unknown node {nid!r}")
        if rule.suppressed_by and assigned & set(rule.suppressed_by):
            continue
        if rule.kind == "mutually_exclusive":
            chosen = sorted(set(rule.nodes) & assigned)
            for first, second in combinations(chosen, 2):
                if (first, second) in skip_pairs:
                    continue
                findings.append(
                    Finding(
                        rule.severity,
                        "EXCLUSIVE",
                        f"{first}|{second}",
                        f"rule {rule.id}: labels are mutually exclusive",
                    )
                )
        elif rule.kind == "implies":
            antecedent, consequent = rule.nodes[0], rule.nodes[1]
            if antecedent in implied and consequent not in implied:
                findings.append(
                    Finding(
                        rule.severity,
                        "IMPLIES",
                        antecedent,
                        f"rule {rule.id}: {antecedent!r} requires {consequent!r}",
                    )
                )
        elif rule.kind == "requires_any":
            antecedent, options = rule.nodes[0], rule.nodes[1:]
            if antecedent in implied and not (set(options) & implied):
                findings.append(
                    Finding(
                        rule.severity,
                        "REQUIRES_ANY",
                        antecedent,
                        f"rule {rule.id}: {antecedent!r} requires one of {sorted(options)}",
                    )
                )
    return ValidationReport.from_findings(findings)
