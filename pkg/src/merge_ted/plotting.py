"""Figure rendering for the report paths: distance-matrix heatmaps and
periodicity lag profiles, written next to the delimited output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_matrix_heatmap(dm, path, title=None):
    fig, ax = plt.subplots(figsize=(5.6, 4.6))
    im = ax.imshow(dm.values, cmap="viridis", interpolation="nearest")
    fig.colorbar(im, ax=ax, shrink=0.85)
    n = dm.n
    if n <= 24:
        ax.set_xticks(range(n))
        ax.set_yticks(range(n))
        ax.set_xticklabels(dm.labels, rotation=90, fontsize=7)
        ax.set_yticklabels(dm.labels, fontsize=7)
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_lag_profile(report, path, title=None):
    fig, ax = plt.subplots(figsize=(5.6, 3.2))
    ax.plot(report.lags, report.means, lw=1.2, color="tab:blue")
    if report.best_lag is not None:
        k = int(np.flatnonzero(report.lags == report.best_lag)[0])
        ax.plot([report.best_lag], [report.means[k]], "o", color="tab:red",
                label=f"best lag {report.best_lag}")
        ax.legend(fontsize=8)
    ax.set_xlabel("lag")
    ax.set_ylabel("mean distance")
    if title:
        ax.set_title(title, fontsize=10)
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
