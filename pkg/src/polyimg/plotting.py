"""Figure rendering for the CLI report paths (Agg backend, files only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

COLORS = ["#08589e", "#d95f02", "#1b9e77", "#7570b3", "#e7298a"]

PARAMS = {
    "axes.prop_cycle": matplotlib.cycler(color=COLORS),
    "axes.labelsize": 9,
    "font.size": 8,
    "font.family": "serif",
    "mathtext.fontset": "stix",
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.0,
    "figure.dpi": 150,
    "savefig.bbox": "tight",
}


def _save(fig, path) -> None:
    fig.savefig(path)
    plt.close(fig)


def plot_projection(db_image: np.ndarray, extent, labels, path, db_range: float = 20.0) -> None:
    """Max-intensity projection in dB; ``db_image`` is indexed ``[row, col]`` = ``[u, v]``."""
    with plt.rc_context(PARAMS):
        fig, ax = plt.subplots(figsize=(3.4, 3.0))
        im = ax.imshow(db_image.T, origin="lower", extent=extent, aspect="equal",
                       cmap="jet", vmin=-db_range, vmax=0.0)
        ax.set_xlabel(labels[0])
        ax.set_ylabel(labels[1])
        fig.colorbar(im, ax=ax, label="dB")
        _save(fig, path)


def plot_cuts(cuts: dict, path, floor_db: float = -40.0) -> None:
    """One panel per axis showing the normalised through-peak cut in dB."""
    with plt.rc_context(PARAMS):
        fig, axes = plt.subplots(1, len(cuts), figsize=(7.0, 2.2), sharey=True)
        for ax, (name, (coords, mag)) in zip(np.atleast_1d(axes), cuts.items()):
            peak = mag.max() if mag.max() > 0 else 1.0
            with np.errstate(divide="ignore"):
                db = np.maximum(20.0 * np.log10(mag / peak), floor_db)
            ax.plot(coords * 100.0, db)
            ax.set_xlabel(f"{name} (cm)")
            ax.grid(alpha=0.3)
        np.atleast_1d(axes)[0].set_ylabel("normalised amplitude (dB)")
        _save(fig, path)


def plot_bench(records, path) -> None:
    """Grouped bar chart of median wall time per algorithm and modality (log scale)."""
    modalities = sorted({r.modality for r in records})
    algos = list(dict.fromkeys(r.algorithm for r in records))
    width = 0.8 / max(len(algos), 1)
    with plt.rc_context(PARAMS):
        fig, ax = plt.subplots(figsize=(3.4, 2.4))
        for i, algo in enumerate(algos):
            t = [next((r.wall_time for r in records
                       if r.algorithm == algo and r.modality == m), np.nan) for m in modalities]
            ax.bar(np.arange(len(modalities)) + (i - (len(algos) - 1) / 2) * width, t,
                   width, label=algo)
        ax.set_xticks(np.arange(len(modalities)))
        ax.set_xticklabels(modalities)
        ax.set_yscale("log")
        ax.set_ylabel("wall time (s)")
        ax.legend(frameon=False)
        _save(fig, path)
