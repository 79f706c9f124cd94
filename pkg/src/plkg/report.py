"""Rendered agreement reports: a kappa bar chart plus a delimited table.

Used by the command line's ``agreement --report-dir`` path. Files written
into the target directory:

    kappa.png       horizontal bar chart of per-node kappa
    agreement.tsv   node, observed agreement, expected agreement, kappa
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .agreement import AgreementReport


def write_agreement_tsv(report: AgreementReport, path: Path) -> None:
    lines = ["node\tobserved_po\tchance_pe\tkappa"]
    for nid, agr in sorted(report.per_node.items()):
        kappa = f"{agr.kappa:.6f}" if agr.kappa is not None else ""
        lines.append(f"{nid}\t{agr.observed_po:.6f}\t{agr.chance_pe:.6f}\t{kappa}")
    macro = f"{report.macro_kappa:.6f}" if report.macro_kappa is not None else ""
    lines.append(f"__macro__\t\t\t{macro}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def render_kappa_chart(report: AgreementReport, path: Path) -> None:
    rows = [(nid, agr.kappa) for nid, agr in sorted(report.per_node.items())
            if agr.kappa is not None]
    fig, ax = plt.subplots(figsize=(8, max(2.0, 0.3 * len(rows) + 1.2)))
    if rows:
        names = [r[0] for r in rows]
        values = [r[1] for r in rows]
        positions = range(len(rows))
        ax.barh(positions, values, color="#4878a8")
        ax.set_yticks(list(positions))
        ax.set_yticklabels(names, fontsize=7)
        ax.invert_yaxis()
        ax.axvline(0.0, color="black", linewidth=0.8)
        ax.set_xlim(-1.05, 1.05)
    else:
        ax.text(0.5, 0.5, "no nodes with defined kappa", ha="center", va="center")
        ax.set_axis_off()
    macro = f"{report.macro_kappa:.4f}" if report.macro_kappa is not None else "n/a"
    ax.set_xlabel("Cohen's kappa")
    ax.set_title(f"Per-node agreement over {report.n_items} images (macro {macro})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_agreement_artifacts(report: AgreementReport, report_dir) -> list[Path]:
    """Render the chart and table into a directory; returns written paths."""
    out = Path(report_dir)
    out.mkdir(parents=True, exist_ok=True)
    chart = out / "kappa.png"
    table = out / "agreement.tsv"
    render_kappa_chart(report, chart)
    write_agreement_tsv(report, table)
    return [chart, table]
