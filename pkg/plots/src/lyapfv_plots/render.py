"""Render solver CSV output as SVG figures.

The plotter only displays what the solver wrote; it never re-derives
bounds, residuals, or errors. Output is deterministic: a fixed hash salt
and no embedded timestamps, so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "lyapfv-plots"

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("decay", "control_residual", "convergence", "snapshots")

# the decay figure overlays exactly these series
DECAY_CURVES = ("L", "bound_geom", "bound_exp", "exact_ref_grid")


class PlotError(Exception):
    """Input CSV missing, empty, or lacking a required column."""


@dataclass(frozen=True)
class PlotJob:
    kind: str
    inputs: tuple[str, ...]
    output: str
    log_scale: bool = False

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise PlotError(f"unknown figure kind '{self.kind}', expected one of {KINDS}")
        if not self.inputs:
            raise PlotError("at least one input CSV is required")


def read_csv(path: str) -> dict[str, np.ndarray]:
    """Column-oriented CSV read; header-only files are an error."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise PlotError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise PlotError(f"{path} is empty")
    header, data = rows[0], rows[1:]
    if not data:
        raise PlotError(f"{path} has a header but no data rows")
    cols = {}
    for i, name in enumerate(header):
        try:
            cols[name] = np.array([float(r[i]) for r in data])
        except (ValueError, IndexError) as exc:
            raise PlotError(f"{path}: column '{name}' is not numeric") from exc
    return cols


def need(cols: dict[str, np.ndarray], name: str, path: str) -> np.ndarray:
    if name not in cols:
        raise PlotError(f"{path} is missing required column '{name}'")
    return cols[name]


def _figure_decay(job: PlotJob):
    fig, ax = plt.subplots(figsize=(6, 4))
    for path in job.inputs:
        cols = read_csv(path)
        t = need(cols, "t", path)
        for name in DECAY_CURVES:
            ax.plot(t, need(cols, name, path), label=name)
    if job.log_scale:
        ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("Lyapunov value")
    ax.legend()
    return fig


def _figure_control_residual(job: PlotJob):
    # first input: control series; second (optional): residual series
    fig, axes = plt.subplots(
        2 if len(job.inputs) > 1 else 1, 1, figsize=(6, 6), squeeze=False
    )
    path = job.inputs[0]
    cols = read_csv(path)
    axes[0][0].plot(need(cols, "t", path), need(cols, "u", path))
    axes[0][0].set_ylabel("u")
    if len(job.inputs) > 1:
        path = job.inputs[1]
        cols = read_csv(path)
        axes[1][0].plot(need(cols, "t", path), need(cols, "R_total", path))
        axes[1][0].set_ylabel("R_total")
        if job.log_scale:
            axes[1][0].set_yscale("symlog")
    axes[-1][0].set_xlabel("t")
    return fig


def _figure_convergence(job: PlotJob):
    fig, ax = plt.subplots(figsize=(6, 4))
    for path in job.inputs:
        cols = read_csv(path)
        res = need(cols, "resolution", path)
        err = need(cols, "error", path)
        ax.loglog(1.0 / res, err, marker="o", label=path)
    ax.set_xlabel("cell width")
    ax.set_ylabel("error")
    ax.legend()
    return fig


def _figure_snapshots(job: PlotJob):
    n = len(job.inputs)
    fig, axes = plt.subplots(1, n, figsize=(4 * n, 4), squeeze=False)
    for ax, path in zip(axes[0], job.inputs):
        cols = read_csv(path)
        grid = np.column_stack([cols[name] for name in cols])
        im = ax.imshow(grid, origin="lower", aspect="equal")
        fig.colorbar(im, ax=ax)
        ax.set_title(path.rsplit("/", 1)[-1])
    return fig


def build_figure(job: PlotJob):
    """Build the figure in memory; the caller owns closing it."""
    handler = {
        "decay": _figure_decay,
        "control_residual": _figure_control_residual,
        "convergence": _figure_convergence,
        "snapshots": _figure_snapshots,
    }[job.kind]
    return handler(job)


def render(job: PlotJob) -> str:
    """Render one figure to its output path; no file is written on error."""
    fig = build_figure(job)
    fig.savefig(job.output, format="svg", metadata={"Date": None})
    plt.close(fig)
    return job.output
