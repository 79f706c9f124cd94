"""Inter-annotator agreement: per-node percent agreement and Cohen's kappa.

Agreement is computed over binary per-node presence, with two corpora
aligned by image reference. Kappa uses the standard chance correction from
the two annotators' marginal presence rates and is omitted for a node when
expected agreement is 1 (both marginals degenerate the same way).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .annotation import Annotation
from .errors import MisalignedCorpora


@dataclass(frozen=True)
class NodeAgreement:
    observed_po: float
    chance_pe: float
    kappa: float | None  # None when pe == 1

    def to_dict(self) -> dict:
        out = {"observed_po": self.observed_po, "chance_pe": self.chance_pe}
        if self.kappa is not None:
            out["kappa"] = self.kappa
        return out


@dataclass(frozen=True)
class AgreementReport:
    per_node: dict[str, NodeAgreement]
    macro_kappa: float | None
    n_items: int

    def to_dict(self) -> dict:
        return {
            "per_node": {nid: agr.to_dict() for nid, agr in sorted(self.per_node.items())},
            "macro_kappa": self.macro_kappa,
            "n_items": self.n_items,
        }

    def to_text(self) -> str:
        """Aligned plain-text table."""
        rows = [("node", "po", "pe", "kappa")]
        for nid, agr in sorted(self.per_node.items()):
            kappa = f"{agr.kappa:.4f}" if agr.kappa is not None else "-"
            rows.append((nid, f"{agr.observed_po:.4f}", f"{agr.chance_pe:.4f}", kappa))
        macro = f"{self.macro_kappa:.4f}" if self.macro_kappa is not None else "-"
        rows.append(("macro", "", "", macro))
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        return "\n".join(
            "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
            for row in rows
        )


def _presence_by_image(anns: Iterable[Annotation]) -> dict[str, set[str]]:
    by_image: dict[str, set[str]] = {}
    for ann in anns:
        if ann.image_ref in by_image:
            raise MisalignedCorpora(f"duplicate annotation for image {ann.image_ref!r}")
        by_image[ann.image_ref] = ann.assigned_node_ids()
    return by_image


def _align(a: list[Annotation], b: list[Annotation]) -> tuple[list[str], dict, dict]:
    pa, pb = _presence_by_image(a), _presence_by_image(b)
    if set(pa) != set(pb):
        only_a = sorted(set(pa) - set(pb))
        only_b = sorted(set(pb) - set(pa))
        raise MisalignedCorpora(f"image sets differ (only in a: {only_a}, only in b: {only_b})")
    return sorted(pa), pa, pb


def percent_agreement(
    a: list[Annotation], b: list[Annotation], node_set: Iterable[str]
) -> dict[str, float]:
    """Per-node fraction of images where presence/absence matches."""
    images, pa, pb = _align(a, b)
    if not images:
        raise MisalignedCorpora("corpora are empty")
    out = {}
    for nid in sorted(node_set):
        matches = sum((nid in pa[img]) == (nid in pb[img]) for img in images)
        out[nid] = matches / len(images)
    return out


def cohen_kappa(
    a: list[Annotation], b: list[Annotation], node_set: Iterable[str]
) -> AgreementReport:
    images, pa, pb = _align(a, b)
    if not images:
        raise MisalignedCorpora("corpora are empty")
    n = len(images)
    per_node = {}
    kappas = []
    for nid in sorted(node_set):
        in_a = [nid in pa[img] for img in images]
        in_b = [nid in pb[img] for img in images]
        po = sum(x == y for x, y in zip(in_a, in_b)) / n
        ra, rb = sum(in_a) / n, sum(in_b) / n
        pe = ra * rb + (1 - ra) * (1 - rb)
        if abs(1 - pe) < 1e-12:
            kappa = None
        else:
            kappa = (po - pe) / (1 - pe)
            kappas.append(kappa)
        per_node[nid] = NodeAgreement(observed_po=po, chance_pe=pe, kappa=kappa)
    macro = sum(kappas) / len(kappas) if kappas else None
    return AgreementReport(per_node=per_node, macro_kappa=macro, n_items=n)


def union_node_set(anns: Iterable[Annotation]) -> set[str]:
    """Every node id assigned anywhere in the given annotations."""
    out: set[str] = set()
    for ann in anns:
        out |= ann.assigned_node_ids()
    return out
