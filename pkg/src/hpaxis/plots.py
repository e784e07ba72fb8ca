"""SVG figure rendering for trajectories and sweep summaries.

Uses matplotlib's Agg backend. Output is plain SVG with a fixed hash
salt and no embedded creation date, so figures rerun from the same data
are reproducible.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .simulate import Trajectory

__all__ = ["plot_trajectory", "plot_sweep"]

matplotlib.rcParams["svg.hashsalt"] = "hpaxis"

_CHANNELS = (
    ("x1", "CRH (pg/ml)"),
    ("x2", "ACTH (pg/ml)"),
    ("x3", "cortisol (mcg/dl)"),
    ("x4", "receptor availability"),
)
_SAVE = {"format": "svg", "metadata": {"Date": None}}


def plot_trajectory(trajectory: Trajectory, out_dir: Path, stem: str = "trajectory") -> list[Path]:
    """One time-series SVG per channel plus a CRH-cortisol phase plane.

    Returns the written paths in a fixed order.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    t = trajectory.t
    for i, (name, label) in enumerate(_CHANNELS):
        fig, ax = plt.subplots(figsize=(8.0, 3.0))
        ax.plot(t, trajectory.x[:, i], lw=0.8, color="#1f6f8b")
        ax.set_xlabel("t (min)")
        ax.set_ylabel(label)
        ax.margins(x=0.0)
        fig.tight_layout()
        path = out_dir / f"{stem}-{name}.svg"
        fig.savefig(path, **_SAVE)
        plt.close(fig)
        written.append(path)

    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.plot(trajectory.x1, trajectory.x3, lw=0.6, color="#9b2335")
    ax.set_xlabel(_CHANNELS[0][1])
    ax.set_ylabel(_CHANNELS[2][1])
    fig.tight_layout()
    path = out_dir / f"{stem}-phase-x1-x3.svg"
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    written.append(path)
    return written


def plot_sweep(
    rows: list[dict],
    param_name: str,
    out_dir: Path,
    stem: str = "sweep",
) -> Path:
    """Two-branch bifurcation summary: cortisol extent against the swept value.

    Each row dict carries: value, branch, classification, x3_min, x3_max.
    Cycle rows show a filled band between min and max; settled rows a
    single marker at the limit level.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    branches = sorted({r["branch"] for r in rows})
    colors = {b: c for b, c in zip(branches, ("#1f6f8b", "#9b2335", "#4a6f28", "#8a6d1f"))}
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for branch in branches:
        sel = [r for r in rows if r["branch"] == branch]
        color = colors.get(branch, "#444444")
        cyc = [r for r in sel if r["classification"] == "limit-cycle"]
        if cyc:
            ax.fill_between(
                [r["value"] for r in cyc],
                [r["x3_min"] for r in cyc],
                [r["x3_max"] for r in cyc],
                alpha=0.25,
                color=color,
                linewidth=0.0,
            )
            ax.plot([r["value"] for r in cyc], [r["x3_min"] for r in cyc], lw=0.8, color=color)
            ax.plot(
                [r["value"] for r in cyc],
                [r["x3_max"] for r in cyc],
                lw=0.8,
                color=color,
                label=f"{branch} cycle extent",
            )
        pts = [r for r in sel if r["classification"] == "converged-to-point"]
        if pts:
            ax.plot(
                [r["value"] for r in pts],
                [r["x3_min"] for r in pts],
                "o",
                ms=3.0,
                color=color,
                label=f"{branch} settled",
            )
        und = [r for r in sel if r["classification"] == "undecided"]
        if und:
            ax.plot(
                [r["value"] for r in und],
                [0.5 * (r["x3_min"] + r["x3_max"]) for r in und],
                "x",
                ms=3.5,
                color=color,
            )
    ax.set_xlabel(param_name)
    ax.set_ylabel(_CHANNELS[2][1])
    handles, labels = ax.get_legend_handles_labels()
    if labels:
        ax.legend(fontsize=8, loc="best")
    fig.tight_layout()
    path = out_dir / f"{stem}.svg"
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return path
