"""SVG views of harness CSV files.

Figures are drawn from the CSV on disk, never from in-memory results, and are
byte-stable: fixed hash salt, no date metadata.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_RC = {"svg.hashsalt": "ergolab", "svg.fonttype": "path", "font.size": 9}


def _read(path: Path) -> tuple:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return rows


def _save(fig, path: Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)


def plot_sweep_summary(csv_path, svg_path) -> Path:
    """Mean largest-cluster fraction, spanning probability and big-cluster count against ``p``."""
    rows = _read(Path(csv_path))
    p = [float(r["p"]) for r in rows]
    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.2))
        ax1.plot(p, [float(r["meanLargestFrac"]) for r in rows], marker=".", label="largest fraction")
        ax1.plot(p, [float(r["spanProb"]) for r in rows], marker=".", label="spanning")
        ax1.set_xlabel("p")
        ax1.legend(frameon=False)
        ax2.plot(p, [float(r["meanBigClusters"]) for r in rows], marker=".", color="C2")
        ax2.set_xlabel("p")
        ax2.set_ylabel("big clusters (mean)")
        fig.tight_layout()
        _save(fig, Path(svg_path))
    return Path(svg_path)


def plot_probe(csv_path, svg_path) -> Path:
    """Histogram of big-cluster counts over seeds."""
    rows = _read(Path(csv_path))
    counts = [int(r["bigClusters"]) for r in rows]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4, 3))
        top = max(counts) if counts else 0
        ax.hist(counts, bins=range(0, top + 2), align="left", rwidth=0.8)
        ax.set_xlabel("clusters above size threshold")
        ax.set_ylabel("seeds")
        fig.tight_layout()
        _save(fig, Path(svg_path))
    return Path(svg_path)


def plot_spectrum(csv_path, svg_path) -> Path:
    """Window norm and isoperimetric upper bound against radius."""
    rows = _read(Path(csv_path))
    r = [int(x["radius"]) for x in rows]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4, 3))
        ax.plot(r, [float(x["windowNorm"]) for x in rows], marker="o", label="window norm")
        ax.plot(r, [float(x["isoUpperBound"]) for x in rows], marker="s", label="iso upper bound")
        ax.set_xlabel("radius")
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, Path(svg_path))
    return Path(svg_path)
