"""Report figures rendered alongside the delimited evaluation output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .evaluation import SweepRow


def render_sweep_figure(rows: list[SweepRow], out_path: str | Path) -> Path:
    """Threshold sweep curves with baseline / confidence-aware reference lines."""
    out_path = Path(out_path)
    filtered = [r for r in rows if r.method == "filtered"]
    baseline = next((r for r in rows if r.method == "baseline"), None)
    confidence = next((r for r in rows if r.method == "confidence_aware"), None)

    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    if filtered:
        taus = [r.tau for r in filtered]
        ax.plot(taus, [r.report.auroc for r in filtered], "o-", label="filtered AUROC")
        ax.plot(taus, [r.report.auprc for r in filtered], "s-", label="filtered AUPRC")
    if baseline:
        ax.axhline(baseline.report.auroc, color="gray", linestyle="--", linewidth=1,
                   label="baseline AUROC")
        ax.axhline(baseline.report.auprc, color="gray", linestyle=":", linewidth=1,
                   label="baseline AUPRC")
    if confidence:
        ax.axhline(confidence.report.auroc, color="tab:orange", linestyle="--", linewidth=1,
                   label="confidence-aware AUROC")
    ax.set_xlabel("confidence threshold tau")
    ax.set_ylabel("metric")
    ax.set_ylim(-0.02, 1.05)
    ax.legend(fontsize=7, loc="lower left")
    ax.set_title("Outcome prediction vs. filtering threshold")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_method_figure(rows: list[SweepRow], out_path: str | Path) -> Path:
    """Bar comparison of the baseline, confidence-aware, and filtered rows."""
    out_path = Path(out_path)
    shown = [r for r in rows if r.method != "filtered"]
    best_filtered = max(
        (r for r in rows if r.method == "filtered"),
        key=lambda r: r.report.auroc,
        default=None,
    )
    if best_filtered:
        shown.append(best_filtered)
    names = [r.method if r.tau is None else f"{r.method}({r.tau:.1f})" for r in shown]
    auroc_vals = [r.report.auroc for r in shown]
    auprc_vals = [r.report.auprc for r in shown]

    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    positions = range(len(shown))
    width = 0.38
    ax.bar([p - width / 2 for p in positions], auprc_vals, width, label="AUPRC")
    ax.bar([p + width / 2 for p in positions], auroc_vals, width, label="AUROC")
    ax.set_xticks(list(positions))
    ax.set_xticklabels(names, fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8)
    ax.set_title("Outcome prediction by graph variant")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
