"""Matplotlib renders of the delimited reports, written next to the CSVs."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .evaluate import IterationCurve
from .ingest import ThresholdStats


def plot_iteration_curve(curve: IterationCurve, destination: str | Path) -> None:
    """Edges found vs. iteration budget, one line per dataset."""
    by_label: dict[str, list[tuple[int, int]]] = {}
    for label, k, found in curve.points:
        by_label.setdefault(label, []).append((k, found))

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label in sorted(by_label):
        pts = sorted(by_label[label])
        ax.plot([k for k, _ in pts], [f for _, f in pts], marker="o", label=label)
    ax.set_xscale("log")
    ax.set_xlabel("iterations (k)")
    ax.set_ylabel("edges in inferred network")
    ax.grid(True, which="both", alpha=0.3)
    if len(by_label) <= 20:
        ax.legend(fontsize=8, ncol=2)
    fig.tight_layout()
    fig.savefig(destination, dpi=150)
    plt.close(fig)


def plot_threshold_profile(rows: list[ThresholdStats], destination: str | Path) -> None:
    """Data volume left after each minimum-cascade-length cutoff."""
    rows = sorted(rows, key=lambda r: r.min_length)
    xs = [r.min_length for r in rows]

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(xs, [r.contagions for r in rows], marker="o", label="contagions")
    ax.plot(xs, [r.transmissions for r in rows], marker="s", label="transmissions")
    ax.set_yscale("log")
    ax.set_xlabel("minimum cascade length")
    ax.set_ylabel("count")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(destination, dpi=150)
    plt.close(fig)
