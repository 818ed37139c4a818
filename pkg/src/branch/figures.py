"""Matplotlib renderings of an evaluation report: ROC curve and confusion
matrix, written as PNG files next to the textual output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .dataset import ClassLabeling, Label  # noqa: E402
from .evaluation import EvaluationReport  # noqa: E402


def roc_points(scores, labels) -> tuple[list[float], list[float]]:
    """ROC polyline vertices, sweeping the threshold down over tied groups."""
    n_pos = sum(1 for y in labels if y is Label.POSITIVE)
    n_neg = len(labels) - n_pos
    pairs = sorted(zip(scores, labels), key=lambda p: -p[0])
    fprs, tprs = [0.0], [0.0]
    tp = fp = 0
    i = 0
    while i < len(pairs):
        j = i
        while j < len(pairs) and pairs[j][0] == pairs[i][0]:
            if pairs[j][1] is Label.POSITIVE:
                tp += 1
            else:
                fp += 1
            j += 1
        fprs.append(fp / n_neg if n_neg else 0.0)
        tprs.append(tp / n_pos if n_pos else 0.0)
        i = j
    return fprs, tprs


def save_roc_figure(scores, labels, auc_value: float, path: Path) -> Path:
    fprs, tprs = roc_points(scores, labels)
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.plot(fprs, tprs, marker="o", markersize=3, color="tab:blue")
    ax.plot([0, 1], [0, 1], linestyle="--", color="grey", linewidth=1)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_title(f"ROC (AUC = {auc_value:.3f})")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_confusion_figure(report: EvaluationReport, labeling: ClassLabeling,
                          path: Path) -> Path:
    c = report.confusion
    grid = [[c.tp, c.fn], [c.fp, c.tn]]
    names = [labeling.positive_name, labeling.negative_name]
    fig, ax = plt.subplots(figsize=(4.5, 4.0))
    im = ax.imshow(grid, cmap="Blues")
    for i in range(2):
        for j in range(2):
            ax.text(j, i, str(grid[i][j]), ha="center", va="center",
                    color="black", fontsize=14)
    ax.set_xticks([0, 1], [f"pred {n}" for n in names])
    ax.set_yticks([0, 1], [f"true {n}" for n in names])
    ax.set_title(f"confusion matrix (accuracy = {report.accuracy:.3f})")
    fig.colorbar(im, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_report_figures(report: EvaluationReport, scores, labels,
                        labeling: ClassLabeling, outdir: str | Path) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    return [
        save_roc_figure(scores, labels, report.auc, outdir / "roc.png"),
        save_confusion_figure(report, labeling, outdir / "confusion.png"),
    ]
