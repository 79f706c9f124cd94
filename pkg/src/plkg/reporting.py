"""Structured validation findings shared by schema, annotation and rule checks."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class Finding:
    severity: str  # error | warning
    code: str
    subject: str
    message: str

    def to_dict(self) -> dict:
        return {
            "severity": self.severity,
            "code": self.code,
            "subject": self.subject,
            "message": self.message,
        }


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = ()

    @classmethod
    def from_findings(cls, findings: Iterable[Finding]) -> "ValidationReport":
        # Deterministic ordering: by code, then subject, then message.
        ordered = sorted(set(findings), key=lambda f: (f.code, f.subject, f.message))
        return cls(findings=tuple(ordered))

    def is_clean(self) -> bool:
        return not self.findings

    def has_errors(self) -> bool:
        return any(f.severity == "error" for f in self.findings)

    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    def merged_with(self, other: "ValidationReport") -> "ValidationReport":
        return ValidationReport.from_findings(self.findings + other.findings)

    def to_dict(self) -> dict:
        return {"findings": [f.to_dict() for f in self.findings]}

    def to_json(self) -> str:
        """Canonical JSON used verbatim by both the CLI and the HTTP API."""
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True)

    def to_text(self) -> str:
        if not self.findings:
            return "OK: no findings"
        lines = []
        for f in self.findings:
            subject = f" [{f.subject}]" if f.subject else ""
            lines.append(f"{f.severity.upper():7s} {f.code}{subject}: {f.message}")
        return "\n".join(lines)
