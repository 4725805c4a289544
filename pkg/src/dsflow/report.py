"""Figure rendering for run outputs.

Consumes the monitors.csv written by `dsflow run` (the CSV stays the data
contract; figures are derived artifacts saved next to it).
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def load_monitors(path: str):
    """monitors.csv as a dict of column name -> list of floats."""
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols = {name: [] for name in header}
        for row in reader:
            for name, value in zip(header, row):
                cols[name].append(float(value))
    return cols


def render_report(out_dir: str) -> list:
    """Render the standard figure set from <out_dir>/monitors.csv."""
    csv_path = os.path.join(out_dir, "monitors.csv")
    if not os.path.exists(csv_path):
        raise FileNotFoundError(f"no monitors.csv in {out_dir}")
    cols = load_monitors(csv_path)
    t = cols["t"]
    written = []

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, cols["min_rho"], label="min rho")
    ax.plot(t, cols["max_rho"], label="max rho")
    ax.set_xlabel("t")
    ax.set_ylabel("radial range")
    ax.legend()
    fig.tight_layout()
    path = os.path.join(out_dir, "radii.png")
    fig.savefig(path, dpi=130)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6, 4))
    for name in cols:
        if name.startswith("A_"):
            ax.plot(t, cols[name], label=name)
    ax.set_xlabel("t")
    ax.set_ylabel("quermassintegrals")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = os.path.join(out_dir, "quermass.png")
    fig.savefig(path, dpi=130)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6, 4))
    for name in ("max_u", "min_F", "max_F", "max_kappa"):
        ax.plot(t, cols[name], label=name)
    ax.set_xlabel("t")
    ax.set_ylabel("bound monitors")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = os.path.join(out_dir, "monitors.png")
    fig.savefig(path, dpi=130)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, cols["gap"], label="xi(A_0) - A_2")
    ax.plot(t, [abs(v) for v in cols["hm_residual_1"]],
            label="|HM residual (m=1)|")
    ax.set_xlabel("t")
    ax.set_yscale("symlog", linthresh=1e-12)
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = os.path.join(out_dir, "gap.png")
    fig.savefig(path, dpi=130)
    plt.close(fig)
    written.append(path)

    return written
