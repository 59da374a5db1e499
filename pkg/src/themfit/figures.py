"""Matplotlib figure rendering for run, grid, sweep, and analysis reports.

All figures go straight to files; the Agg backend keeps this headless-safe.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence, TYPE_CHECKING

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

if TYPE_CHECKING:
    from .runner import GridResult, SweepResult


def save_run_scatter(
    pairs: Sequence[tuple[float, float]], rho: float, title: str, path: str | Path
) -> None:
    """Normalized human rating vs. model value, one point per scored item."""
    fig, ax = plt.subplots(figsize=(5, 5))
    if pairs:
        xs, ys = zip(*pairs)
        ax.scatter(xs, ys, alpha=0.6, edgecolors="none")
    ax.plot([0, 1], [0, 1], linestyle="--", color="gray", linewidth=1)
    ax.set_xlim(-0.05, 1.05)
    ax.set_ylim(-0.05, 1.05)
    ax.set_xlabel("normalized human rating")
    ax.set_ylabel("model fit score")
    ax.set_title(f"{title}  (rho={rho:.3f})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _annotated_heatmap(
    ax, values: np.ndarray, labels: list[list[str]], row_names: Sequence[str], col_names: Sequence[str]
) -> None:
    masked = np.ma.masked_invalid(values)
    image = ax.imshow(masked, cmap="viridis", vmin=-1.0, vmax=1.0, aspect="auto")
    ax.set_xticks(range(len(col_names)), labels=col_names)
    ax.set_yticks(range(len(row_names)), labels=row_names)
    for i in range(len(row_names)):
        for j in range(len(col_names)):
            ax.text(j, i, labels[i][j], ha="center", va="center", color="white", fontsize=9)
    ax.figure.colorbar(image, ax=ax, label="Spearman rho")


def save_grid_heatmap(grid: "GridResult", path: str | Path) -> None:
    """Experiments-by-datasets rho heatmap; failed cells shown as ERR."""
    values = np.full((len(grid.experiment_ids), len(grid.dataset_names)), np.nan)
    labels = [["ERR"] * len(grid.dataset_names) for _ in grid.experiment_ids]
    for i, experiment_id in enumerate(grid.experiment_ids):
        for j, name in enumerate(grid.dataset_names):
            cell = grid.cells[(experiment_id, name)]
            if not isinstance(cell, str):
                values[i, j] = cell.rho
                labels[i][j] = f"{cell.rho:.2f}"
    fig, ax = plt.subplots(figsize=(1.6 * len(grid.dataset_names) + 2, 0.6 * len(grid.experiment_ids) + 2))
    _annotated_heatmap(ax, values, labels, grid.experiment_ids, grid.dataset_names)
    ax.set_xlabel("dataset")
    ax.set_ylabel("experiment")
    ax.set_title("Spearman rho by experiment and dataset")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_sweep_heatmap(sweep: "SweepResult", path: str | Path) -> None:
    """Temperature-by-top_p rho heatmap for the calibration sweep."""
    values = np.full((len(sweep.temperatures), len(sweep.top_ps)), np.nan)
    labels = [["ERR"] * len(sweep.top_ps) for _ in sweep.temperatures]
    for i, temperature in enumerate(sweep.temperatures):
        for j, top_p in enumerate(sweep.top_ps):
            cell = sweep.cells[(temperature, top_p)]
            if not isinstance(cell, str):
                values[i, j] = cell
                labels[i][j] = f"{cell:.2f}"
    fig, ax = plt.subplots(figsize=(1.6 * len(sweep.top_ps) + 2, 0.8 * len(sweep.temperatures) + 2))
    _annotated_heatmap(
        ax,
        values,
        labels,
        [f"{t:g}" for t in sweep.temperatures],
        [f"{p:g}" for p in sweep.top_ps],
    )
    ax.set_xlabel("top_p")
    ax.set_ylabel("temperature")
    ax.set_title("Sweep: Spearman rho per sampling setting")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_diff_histogram(diffs: Sequence[float], threshold: float, path: str | Path) -> None:
    """Distribution of |human - model| diffs with the good/bad threshold marked."""
    fig, ax = plt.subplots(figsize=(6, 4))
    if diffs:
        ax.hist(diffs, bins=20, range=(0, 1), color="steelblue", alpha=0.8)
    ax.axvline(threshold, color="crimson", linestyle="--", label=f"threshold {threshold:g}")
    ax.set_xlabel("|normalized human - model|")
    ax.set_ylabel("items")
    ax.set_title("Score diffs vs. good/bad threshold")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
