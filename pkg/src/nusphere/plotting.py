"""Matplotlib rendering of sweep datasets.

Each figure dataset is drawn as curves over the CP phase and written
next to the delimited output.  Rendering is purely cosmetic: the CSV and
JSON datasets remain the authoritative artifacts.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .sweeps import Dataset

_QUANTITY_LABELS = {
    "r": "Poincare radius r",
    "gamma_p": r"Pancharatnam phase $\gamma_P$ (rad)",
    "phases": "phase (rad)",
}

_COMPONENT_TEX = {
    "gamma_t": r"$\gamma_t$",
    "gamma_d1": r"$\gamma_{d1}$",
    "gamma_d2": r"$\gamma_{d2}$",
    "gamma_d": r"$\gamma_d$",
    "gamma_p": r"$\gamma_P$",
}


def _curve_label(column: str) -> str:
    if column in _COMPONENT_TEX:
        return _COMPONENT_TEX[column]
    for prefix in ("r_", "gamma_p_"):
        if column.startswith(prefix):
            tag = column[len(prefix):]
            if tag.startswith("t"):
                return rf"$t = {tag[1:]}\,\mathrm{{eV^{{-1}}}}$"
            if tag.startswith("eta"):
                return rf"$\eta = {tag[3:]}$"
    return column


def plot_dataset(dataset: Dataset, out_path: str | Path) -> Path:
    """Render every non-phi column as one curve over the CP phase."""
    data = np.asarray(dataset.rows, dtype=float)
    phi = data[:, 0]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for k, col in enumerate(dataset.columns[1:], start=1):
        ax.plot(phi / np.pi, data[:, k], lw=1.4, label=_curve_label(col))
    ax.set_xlabel(r"CP phase $\phi/\pi$")
    if all(c.startswith("r_") for c in dataset.columns[1:]):
        ax.set_ylabel(_QUANTITY_LABELS["r"])
    elif all(c.startswith("gamma_p") for c in dataset.columns[1:]):
        ax.set_ylabel(_QUANTITY_LABELS["gamma_p"])
    else:
        ax.set_ylabel(_QUANTITY_LABELS["phases"])
    title = dataset.meta.get("description", "")
    if dataset.meta.get("figure"):
        title = f"figure {dataset.meta['figure']}: {title}"
    ax.set_title(title, fontsize=10)
    ax.set_xlim(0, 2)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
