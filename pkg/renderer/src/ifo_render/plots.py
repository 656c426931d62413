"""Render interferometer sweep CSVs into figures.

The renderer is a pure consumer: it reads the delimited outputs and the run
metadata, never recomputes physics, never reorders or interpolates rows.
Rows flagged as diverged are drawn as gaps.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class RenderError(RuntimeError):
    """Input data cannot be rendered (missing column, empty file, ...)."""


@dataclass(frozen=True)
class Table:
    """One parsed CSV: column names and float columns in file order."""

    path: Path
    columns: dict

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise RenderError(
                f"{self.path}: no column {name!r}; header has "
                f"{sorted(self.columns)}"
            ) from None

    @property
    def nrows(self) -> int:
        return len(next(iter(self.columns.values())))


def load_table(path) -> Table:
    """Parse a sweep CSV; `inf` tokens become float infinities."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise RenderError(f"{path}: file is empty") from None
        rows = [row for row in reader if row]
    if not rows:
        raise RenderError(f"{path}: no data rows")
    cols: dict[str, list] = {name: [] for name in header}
    for lineno, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise RenderError(f"{path}:{lineno}: expected {len(header)} columns")
        for name, value in zip(header, row):
            try:
                cols[name].append(float(value))
            except ValueError:
                raise RenderError(
                    f"{path}:{lineno}: column {name!r} is not numeric: {value!r}"
                ) from None
    return Table(path, {k: np.asarray(v) for k, v in cols.items()})


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: input tables, panel kind, scales, and the output path."""

    kind: str                      # 'transmission' | 'spectrum' | 'budget'
    inputs: tuple
    output: Path
    title: str = ""
    labels: tuple = ()
    dpi: int = 150

    def __post_init__(self):
        if self.kind not in ("transmission", "spectrum", "budget"):
            raise RenderError(f"unknown plot kind {self.kind!r}")
        if not self.inputs:
            raise RenderError("plot needs at least one input CSV")


def _gapped(values: np.ndarray, diverged: np.ndarray) -> np.ndarray:
    """Replace diverged/non-finite rows with NaN so lines break there."""
    out = np.array(values, dtype=float)
    mask = (diverged > 0.5) | ~np.isfinite(out)
    out[mask] = np.nan
    return out


def render(spec: PlotSpec) -> Path:
    """Draw one figure; deterministic for fixed inputs and style."""
    tables = [load_table(p) for p in spec.inputs]
    labels = spec.labels or tuple(Path(p).stem for p in spec.inputs)
    if spec.kind == "transmission":
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for table, label in zip(tables, labels):
            ax.plot(table["phi_e_deg"], table["transmission"],
                    label=label, linewidth=1.0)
        ax.set_xlabel("scanning phase [deg]")
        ax.set_ylabel("transmission")
        ax.set_xlim(0.0, 360.0)
        ax.set_ylim(-0.02, 1.05)
        ax.legend(loc="upper left", fontsize=8)
    elif spec.kind == "spectrum":
        fig, (ax_tf, ax_nsr) = plt.subplots(
            2, 1, figsize=(6.0, 6.5), sharex=True)
        for table, label in zip(tables, labels):
            f = table["frequency_hz"]
            flags = table["diverged"]
            ax_tf.plot(f, _gapped(table["tf_mag_w_per_h"], flags),
                       label=label, linewidth=1.0)
            ax_nsr.plot(f, _gapped(table["nsr_strain_rthz"], flags),
                        label=label, linewidth=1.0)
        for ax in (ax_tf, ax_nsr):
            ax.set_xscale("log")
            ax.set_yscale("log")
            ax.grid(True, which="both", alpha=0.25, linewidth=0.4)
        ax_tf.set_ylabel("transfer [W per unit strain]")
        ax_nsr.set_ylabel("noise-to-signal [strain/rtHz]")
        ax_nsr.set_xlabel("frequency [Hz]")
        ax_tf.legend(loc="lower left", fontsize=8)
    else:  # budget
        fig, ax = plt.subplots(figsize=(6.5, 4.5))
        for table in tables:
            f = table["frequency_hz"]
            sources = [c for c in table.columns
                       if c.endswith("_strain_rthz") and c != "total_strain_rthz"]
            if not sources:
                raise RenderError(f"{table.path}: no strain columns to plot")
            for name in sources:
                vals = np.array(table[name], dtype=float)
                vals[~np.isfinite(vals)] = np.nan
                ax.plot(f, vals, linewidth=0.9,
                        label=name.replace("_strain_rthz", ""))
            total = np.array(table["total_strain_rthz"], dtype=float)
            total[~np.isfinite(total)] = np.nan
            ax.plot(f, total, color="black", linewidth=1.6, label="total")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("frequency [Hz]")
        ax.set_ylabel("strain noise [1/rtHz]")
        ax.grid(True, which="both", alpha=0.25, linewidth=0.4)
        ax.legend(loc="upper right", fontsize=8)
    if spec.title:
        fig.suptitle(spec.title, fontsize=11)
    fig.tight_layout()
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output, dpi=spec.dpi)
    plt.close(fig)
    return spec.output


def plotted_point_count(spec: PlotSpec) -> int:
    """Number of finite points the spectrum panels draw per curve; equals the
    non-diverged row count by construction."""
    total = 0
    for p in spec.inputs:
        table = load_table(p)
        flags = table["diverged"]
        total += int(np.sum(
            np.isfinite(_gapped(table["nsr_strain_rthz"], flags))))
    return total


def discover(in_dir) -> list[PlotSpec]:
    """Build the default plot set from a sweep output directory."""
    in_dir = Path(in_dir)
    specs = []
    fringe = sorted(in_dir.glob("transmission_phin_*.csv"))
    if fringe:
        labels = []
        for p in fringe:
            token = p.stem.replace("transmission_phin_", "")
            labels.append("bias " + token.replace("p", ".").replace("m", "-")
                          + " deg")
        specs.append(PlotSpec("transmission", tuple(fringe),
                              in_dir / "fringe_scan.png",
                              title="transmission fringes",
                              labels=tuple(labels)))
    for name in ("nsr", "transfer"):
        path = in_dir / f"{name}.csv"
        if path.exists():
            specs.append(PlotSpec("spectrum", (path,),
                                  in_dir / f"{name}_spectrum.png",
                                  title="strain transfer and noise ratio",
                                  labels=(name,)))
    budget = in_dir / "budget.csv"
    if budget.exists():
        specs.append(PlotSpec("budget", (budget,), in_dir / "noise_budget.png",
                              title="strain noise budget"))
    return specs
