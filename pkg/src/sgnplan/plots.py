"""Figure rendering for benchmark reports; writes PNG files, never shows windows."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_COLORS = {
    "dsga": "tab:blue",
    "dsga-wa": "tab:orange",
    "random": "tab:green",
    "greedy": "tab:red",
    "oracle": "tab:purple",
}


def _color(algorithm: str):
    return _COLORS.get(algorithm, "tab:gray")


def convergence_figure(records, path: str, title: str) -> None:
    """Best-so-far profit against evaluation index, one line per run."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    seen = set()
    for rec in records:
        trace = np.asarray(rec.trace)
        x = np.arange(1, trace.size + 1)
        label = rec.algorithm if rec.algorithm not in seen else None
        seen.add(rec.algorithm)
        ax.plot(x, trace, color=_color(rec.algorithm), alpha=0.6,
                linewidth=1.0, label=label)
    ax.set_xlabel("fitness evaluations")
    ax.set_ylabel("best profit so far")
    ax.set_title(title)
    if seen:
        ax.legend(loc="lower right", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def summary_figure(rows, algorithms, path: str) -> None:
    """Grouped bars of mean best profit per instance and algorithm."""
    labels = [row.instance_label for row in rows]
    x = np.arange(len(labels), dtype=float)
    width = 0.8 / max(1, len(algorithms))
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    for j, algo in enumerate(algorithms):
        means = [row.cells[algo][1] if algo in row.cells else 0.0 for row in rows]
        stds = [row.cells[algo][2] if algo in row.cells else 0.0 for row in rows]
        ax.bar(x + (j - (len(algorithms) - 1) / 2) * width, means, width,
               yerr=stds, capsize=3, color=_color(algo), label=algo)
    ax.set_xticks(x)
    ax.set_xticklabels(labels)
    ax.set_xlabel("instance")
    ax.set_ylabel("mean best profit")
    ax.set_title("benchmark summary")
    ax.legend(fontsize=8)
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
