"""Figure rendering for the command-line report artifacts.

Every CSV the runner emits gets a PNG rendered next to it.  The figures
are a convenience view of the deterministic CSV data; the reproducibility
guarantee covers the CSV bodies, not the image bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "save_profile_png",
    "save_series_png",
    "save_spectrum_png",
    "save_residuals_png",
]


def _png_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".png")


def save_profile_png(csv_path, x, y, xlabel: str, ylabel: str,
                     title: str) -> Path:
    out = _png_path(csv_path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(np.asarray(x), np.asarray(y), lw=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def save_series_png(csv_path, t, series: dict, xlabel: str,
                    title: str) -> Path:
    out = _png_path(csv_path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, values in series.items():
        ax.plot(np.asarray(t), np.asarray(values), lw=1.2, label=label)
    ax.set_xlabel(xlabel)
    ax.legend()
    ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def save_residuals_png(csv_path, labels, residuals, title: str) -> Path:
    out = _png_path(csv_path)
    n = len(labels)
    fig, ax = plt.subplots(figsize=(8, max(3.0, 0.3 * n + 1.5)))
    vals = np.maximum(np.asarray(residuals, dtype=float), 1e-18)
    ax.barh(np.arange(n), vals, height=0.6)
    ax.set_yticks(np.arange(n))
    ax.set_yticklabels(labels, fontsize=7)
    ax.set_xscale("log")
    ax.set_xlabel("residual")
    ax.set_title(title)
    ax.invert_yaxis()
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def save_spectrum_png(csv_path, eigenvalues, degeneracies, title: str) -> Path:
    out = _png_path(csv_path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ev = np.asarray(eigenvalues, dtype=float)
    dg = np.asarray(degeneracies, dtype=float)
    ax.vlines(ev, 0, dg, lw=1.5)
    ax.set_xlabel("eigenvalue")
    ax.set_ylabel("degeneracy")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out
