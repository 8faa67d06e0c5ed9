"""Matplotlib figure emitters for benchmark and verification reports.

All functions render straight to a file (format from the suffix) and leave
no open figures behind, so they are safe from the CLI and from tests.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def plot_decision_rate_curves(
    curves: Mapping[str, Sequence[tuple[float, float]]], path: str | Path
) -> None:
    """Accuracy versus decision rate, one line per method."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for method in sorted(curves):
        pts = curves[method]
        ax.plot([r for r, _ in pts], [a for _, a in pts], marker="o", label=method)
    ax.axhline(0.5, color="gray", lw=0.8, ls="--")
    ax.set_xlabel("decision rate")
    ax.set_ylabel("accuracy")
    ax.set_ylim(0.0, 1.02)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_accuracy_by_alpha(
    table: Mapping[str, Sequence[tuple[float, float]]], path: str | Path
) -> None:
    """Accuracy versus noise level, one line per method."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for method in sorted(table):
        pts = table[method]
        ax.plot([a for a, _ in pts], [v for _, v in pts], marker="o", label=method)
    ax.axhline(0.5, color="gray", lw=0.8, ls="--")
    ax.set_xlabel("noise level alpha")
    ax.set_ylabel("accuracy")
    ax.set_ylim(0.0, 1.02)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_variance_ratios(rows: Sequence, path: str | Path) -> None:
    """Monte Carlo variance ratios versus alpha, with quadrature limits.

    ``rows`` are RatioCheck-like objects (model, alpha, mc_ratio, limit).
    """
    by_model: dict[str, list] = {}
    for row in rows:
        by_model.setdefault(row.model, []).append(row)
    fig, ax = plt.subplots(figsize=(6, 4))
    for model in sorted(by_model):
        pts = sorted(by_model[model], key=lambda r: r.alpha)
        alphas = [r.alpha for r in pts]
        ax.plot(alphas, [r.mc_ratio for r in pts], marker="o", label=model)
        limit = pts[0].limit
        if limit is not None:
            ax.plot(alphas[:1] + alphas[-1:], [limit, limit], ls=":", color="gray", lw=0.8)
    ax.axhline(1.0, color="black", lw=0.8)
    ax.set_xlabel("noise level alpha")
    ax.set_ylabel("variance ratio")
    ax.set_yscale("log")
    ax.grid(alpha=0.3)
    if len(by_model) <= 12:
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
