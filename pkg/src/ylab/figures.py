"""Matplotlib rendering for the report paths of the CLI.

Every experiment writes its figures next to its CSV outputs; all plots go
through the Agg backend so runs work headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .grid import GridField


def _finish(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def line_plot(path, series, xlabel="", ylabel="", title="", xscale="linear",
              yscale="linear"):
    """series: iterable of dicts with keys x, y and optional label, style,
    lo, hi (uncertainty band)."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for s in series:
        style = s.get("style", "-")
        (line,) = ax.plot(s["x"], s["y"], style, label=s.get("label"))
        if "lo" in s and "hi" in s:
            ax.fill_between(s["x"], s["lo"], s["hi"], alpha=0.2,
                            color=line.get_color())
    ax.set_xscale(xscale)
    ax.set_yscale(yscale)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if any(s.get("label") for s in series):
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    _finish(fig, path)


def field_heatmap(path, f: GridField, title=""):
    fig, ax = plt.subplots(figsize=(5.4, 4.6))
    v = f.values
    lim = float(np.max(np.abs(v))) or 1.0
    im = ax.imshow(
        v.T,
        origin="lower",
        extent=(-1, 1, -1, 1),
        cmap="RdBu_r",
        vmin=-lim,
        vmax=lim,
        interpolation="nearest",
    )
    fig.colorbar(im, ax=ax, shrink=0.85)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    if title:
        ax.set_title(title)
    _finish(fig, path)


def trajectory_plot(path, trajectories, labels=None, title=""):
    """trajectories: list of (times, points) with points shaped (m, 2)."""
    fig, ax = plt.subplots(figsize=(5.2, 5.2))
    for k, (_, pts) in enumerate(trajectories):
        label = labels[k] if labels else None
        ax.plot(pts[:, 0], pts[:, 1], "o-", ms=3, lw=1, label=label)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    if labels:
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    _finish(fig, path)
